#pragma once

// Subcommand bodies for the command-line tool. Each returns an exit code:
// 0 success, 1 usage/config/input error, 2 numerical or diagnostic failure.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace minkowski::cli {

enum ExitCode : int { kSuccess = 0, kUsage = 1, kNumerical = 2 };

struct CommonOptions {
  std::optional<double> tol_override;
  std::uint64_t seed = 1;
};

// Writes solution.json, report.json and nodes.csv into out_dir.
int cmd_solve(const std::string& config_path, const std::string& out_dir,
              const CommonOptions& opts, std::ostream& out, std::ostream& err);

// Writes dual_surface.json, dual_samples.csv and duality_report.json. With a
// config, also checks the transferred equation F~ = 1/f at matched nodes.
int cmd_dual(const std::string& surface_path, const std::string& out_dir,
             const std::optional<std::string>& config_path, const CommonOptions& opts,
             std::ostream& out, std::ostream& err);

// Prints the diagnostics JSON (and writes it to report_path if given).
int cmd_check(const std::string& surface_path, const std::optional<std::string>& config_path,
              const std::optional<std::string>& report_path, const CommonOptions& opts,
              std::ostream& out, std::ostream& err);

int cmd_export_obj(const std::string& surface_path, const std::string& out_path,
                   std::ostream& out, std::ostream& err);

}  // namespace minkowski::cli
