#include "CLI11.hpp"

#include "minkowski/cli.hpp"

#include <iostream>
#include <optional>
#include <string>

int main(int argc, char** argv) {
  using namespace minkowski::cli;

  CLI::App app{"Prescribed-curvature problems for convex surfaces in S^3"};
  app.require_subcommand(1);

  std::string config, out, surface;
  std::optional<double> tol;
  std::uint64_t seed = 1;

  auto* solve = app.add_subcommand("solve", "continuation solve from a config");
  solve->add_option("--config", config, "run config JSON")->required()->check(CLI::ExistingFile);
  solve->add_option("--out", out, "output directory")->required();
  solve->add_option("--tol-override", tol, "Newton tolerance");
  solve->add_option("--seed", seed, "random seed");

  std::optional<std::string> opt_config;
  auto* dual = app.add_subcommand("dual", "polar dual of a surface");
  dual->add_option("--surface", surface, "surface JSON")->required()->check(CLI::ExistingFile);
  dual->add_option("--out", out, "output directory")->required();
  dual->add_option("--config", opt_config, "config whose (F, f) is transferred to the dual");
  dual->add_option("--tol-override", tol, "bound on |F~ - 1/f|");
  dual->add_option("--seed", seed, "random seed");

  std::optional<std::string> report;
  auto* check = app.add_subcommand("check", "diagnostics for a surface");
  check->add_option("--surface", surface, "surface JSON")->required()->check(CLI::ExistingFile);
  check->add_option("--config", opt_config, "config supplying F, f and the group");
  check->add_option("--out", report, "also write the report here");
  check->add_option("--tol-override", tol, "equation residual tolerance");
  check->add_option("--seed", seed, "seed for the support-inequality pairs");

  auto* obj = app.add_subcommand("export-obj", "triangle mesh of the stereographic image");
  obj->add_option("--surface", surface, "surface JSON")->required()->check(CLI::ExistingFile);
  obj->add_option("--out", out, "OBJ file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  const CommonOptions opts{tol, seed};
  if (solve->parsed()) return cmd_solve(config, out, opts, std::cout, std::cerr);
  if (dual->parsed()) return cmd_dual(surface, out, opt_config, opts, std::cout, std::cerr);
  if (check->parsed()) return cmd_check(surface, opt_config, report, opts, std::cout, std::cerr);
  return cmd_export_obj(surface, out, std::cout, std::cerr);
}
