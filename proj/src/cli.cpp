#include "minkowski/cli.hpp"

#include "minkowski/errors.hpp"
#include "minkowski/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace minkowski::cli {

namespace fs = std::filesystem;

namespace {

// Bounds used by the dual command's exit status.
constexpr double kDualReciprocityTol = 1e-6;
constexpr double kDoubleDualTol = 1e-6;
constexpr double kDualEquationTol = 1e-6;

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory " + dir);
}

std::string join(const std::string& dir, const char* name) { return (fs::path(dir) / name).string(); }

int grid_size(const geometry::GraphSurface& s) { return std::max(s.radial.l_max, 4); }

geometry::GraphSurface on_grid(geometry::GraphSurface s) {
  s.radial = s.radial.resized(grid_size(s));
  return s;
}

// Input problems map to 1, everything the numerics reject to 2.
template <class Body>
int guarded(std::ostream& err, const char* cmd, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << cmd << ": " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    err << cmd << ": " << e.what() << "\n";
    return kUsage;
  } catch (const std::runtime_error& e) {
    err << cmd << ": " << e.what() << "\n";
    return kNumerical;
  }
}

}  // namespace

int cmd_solve(const std::string& config_path, const std::string& out_dir,
              const CommonOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, "solve", [&]() -> int {
    auto cfg = io::config_from_json(io::read_file(config_path));
    if (opts.tol_override) {
      if (!(*opts.tol_override > 0.0)) throw ConfigError("--tol-override must be positive");
      cfg.options.tol = *opts.tol_override;
    }
    const auto F = cfg.function();
    const auto data = cfg.data();
    ensure_dir(out_dir);

    // DomainError here means c is not admissible for this f
    const auto rep = solver::continuation(F, data, cfg.symmetry(), cfg.l_max, cfg.options);

    io::write_file(join(out_dir, "report.json"), io::continuation_report_to_json(rep, cfg));
    io::write_file(join(out_dir, "solution.json"), io::surface_to_json(rep.surface));
    try {
      const spectral::QuadratureGrid grid(cfg.l_max);
      std::ostringstream csv;
      io::write_curvature_csv(csv, geometry::curvature_field(rep.surface, grid));
      io::write_file(join(out_dir, "nodes.csv"), csv.str());
    } catch (const DomainError& e) {
      err << "solve: nodes.csv skipped: " << e.what() << "\n";
    }
    for (const auto& w : rep.warnings) err << "solve: warning: " << w << "\n";
    out << "solve: " << rep.status << " (t = " << io::format_number(rep.t_reached)
        << ", residual = " << io::format_number(rep.residual) << ")\n";
    return rep.success ? kSuccess : kNumerical;
  });
}

int cmd_dual(const std::string& surface_path, const std::string& out_dir,
             const std::optional<std::string>& config_path, const CommonOptions& opts,
             std::ostream& out, std::ostream& err) {
  (void)opts;
  const auto surface = [&]() -> std::optional<geometry::GraphSurface> {
    try {
      return on_grid(io::surface_from_json(io::read_file(surface_path)));
    } catch (const ConfigError& e) {
      err << "dual: " << e.what() << "\n";
      return std::nullopt;
    }
  }();
  if (!surface) return kUsage;
  std::optional<io::RunConfig> cfg;
  if (config_path) {
    try {
      cfg = io::config_from_json(io::read_file(*config_path));
    } catch (const ConfigError& e) {
      err << "dual: " << e.what() << "\n";
      return kUsage;
    }
  }

  const spectral::QuadratureGrid grid(grid_size(*surface));
  geometry::CurvatureField field;
  dual::DualSamples samples;
  try {
    field = geometry::curvature_field(*surface, grid);
    samples = dual::gauss_map(field, *surface);
  } catch (const std::exception& e) {
    // outside the hemisphere or not strictly convex: not a valid input
    err << "dual: " << e.what() << "\n";
    return kUsage;
  }

  return guarded(err, "dual", [&]() -> int {
    ensure_dir(out_dir);
    std::ostringstream csv;
    io::write_dual_samples_csv(csv, samples);
    io::write_file(join(out_dir, "dual_samples.csv"), csv.str());

    io::DualityCheck chk;
    chk.reciprocity = samples.max_reciprocity_error();
    chk.orthogonality = samples.max_orthogonality_error();
    chk.second_form_error = dual::dual_second_fundamental_form_error(*surface, grid);
    chk.double_dual_distance = dual::double_dual(*surface, grid).max_distance;
    chk.dual_pole_distance = (samples.pole + surface->pole).norm();

    bool ok = chk.reciprocity <= kDualReciprocityTol && chk.double_dual_distance <= kDoubleDualTol;
    if (cfg) {
      Eigen::VectorXd r(grid.size());
      for (int q = 0; q < grid.size(); ++q) r[q] = field.nodes[q].r;
      const auto transferred = dual::transfer_problem(cfg->function(), cfg->f.values(grid, r));
      double worst = 0.0;
      for (int q = 0; q < grid.size(); ++q)
        worst = std::max(worst, std::abs(transferred.F.value(samples.kappa_dual[q]) - transferred.f[q]));
      chk.equation_residual = worst;
      chk.dual_function = transferred.F.name();
      const double tol = opts.tol_override.value_or(kDualEquationTol);
      ok = ok && worst <= tol;
    }

    int code = ok ? kSuccess : kNumerical;
    try {
      const auto fit = dual::dual_as_graph(samples, grid.l_max(), surface->gauge_tau0);
      chk.fit_residual_max = fit.residual_max;
      chk.fit_residual_rms = fit.residual_rms;
      chk.fit_condition = fit.condition;
      io::write_file(join(out_dir, "dual_surface.json"), io::surface_to_json(fit.surface));
    } catch (const ResolutionError& e) {
      err << "dual: dual surface not written: " << e.what() << "\n";
      code = kNumerical;
    } catch (const DomainError& e) {
      err << "dual: dual surface not written: " << e.what() << "\n";
      code = kNumerical;
    }
    io::write_file(join(out_dir, "duality_report.json"), io::duality_to_json(chk));
    out << "dual: reciprocity " << io::format_number(chk.reciprocity) << ", double dual "
        << io::format_number(chk.double_dual_distance);
    if (chk.equation_residual) out << ", equation " << io::format_number(*chk.equation_residual);
    out << "\n";
    return code;
  });
}

int cmd_check(const std::string& surface_path, const std::optional<std::string>& config_path,
              const std::optional<std::string>& report_path, const CommonOptions& opts,
              std::ostream& out, std::ostream& err) {
  return guarded(err, "check", [&]() -> int {
    const auto surface = io::surface_from_json(io::read_file(surface_path));
    std::optional<io::RunConfig> cfg;
    if (config_path) cfg = io::config_from_json(io::read_file(*config_path));

    validation::Tolerances tol;
    tol.seed = opts.seed;
    if (opts.tol_override) {
      if (!(*opts.tol_override > 0.0)) throw ConfigError("--tol-override must be positive");
      tol.residual = *opts.tol_override;
    }
    const solver::SymmetryGroup group = cfg ? cfg->symmetry() : solver::SymmetryGroup::antipodal();
    std::optional<validation::EquationData> eq;
    if (cfg) eq = validation::EquationData{cfg->function(), cfg->f};

    const auto rep = validation::full_report(surface, group, eq, tol);
    const std::string text = io::diagnostics_to_json(rep);
    out << text;
    if (report_path) io::write_file(*report_path, text);
    for (const auto& c : rep.checks)
      if (!c.pass)
        err << "check: " << c.name << " failed: " << io::format_number(c.value) << " vs limit "
            << io::format_number(c.limit) << "\n";
    return rep.passed() ? kSuccess : kNumerical;
  });
}

int cmd_export_obj(const std::string& surface_path, const std::string& out_path,
                   std::ostream& out, std::ostream& err) {
  return guarded(err, "export-obj", [&]() -> int {
    const auto surface = io::surface_from_json(io::read_file(surface_path));
    const auto mesh = io::stereographic_mesh(surface, grid_size(surface));
    std::ostringstream os;
    io::write_obj(os, mesh);
    io::write_file(out_path, os.str());
    out << "export-obj: " << mesh.vertices.size() << " vertices, " << mesh.faces.size()
        << " faces\n";
    return kSuccess;
  });
}

}  // namespace minkowski::cli
