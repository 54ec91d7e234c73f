#pragma once

// JSON/CSV serialization for surfaces, run configurations and reports, plus
// the triangle-mesh export of the stereographic image.

#include "minkowski/curvature_functions.hpp"
#include "minkowski/hypersurface_geometry.hpp"
#include "minkowski/polar_dual.hpp"
#include "minkowski/solver.hpp"
#include "minkowski/validation.hpp"

#include <array>
#include <optional>
#include <ostream>
#include <string>

namespace minkowski::io {

using geometry::GraphSurface;

// %.17g; non-finite values become "nan"/"inf"/"-inf".
std::string format_number(double v);

// Surface JSON: {n, pole, L_max, radial:[{l,m,value}], gauge_tau0}.
std::string surface_to_json(const GraphSurface& surface);
// Throws ConfigError with a line/column or key path on malformed input.
GraphSurface surface_from_json(const std::string& text);

struct RunConfig {
  std::string F = "gauss_power";
  int n = 2;
  int l_max = 24;
  std::optional<solver::SymmetryGroup> group;  // unset: antipodal
  solver::PrescribedData f;
  std::optional<double> c;  // unset: 0.9 inf f
  solver::SolverOptions options;

  curvature::CurvatureFunction function() const;
  solver::SymmetryGroup symmetry() const;
  // Data with c filled in (validated by the solver, not here).
  solver::PrescribedData data() const;
};
// Unknown keys rejected; errors carry a line/column or key path.
RunConfig config_from_json(const std::string& text);

std::string continuation_report_to_json(const solver::ContinuationReport& rep,
                                        const RunConfig& config);
std::string diagnostics_to_json(const validation::DiagnosticsReport& rep);

struct DualityCheck {
  double reciprocity = 0.0;
  double orthogonality = 0.0;
  double second_form_error = 0.0;
  double double_dual_distance = 0.0;
  double fit_residual_max = 0.0;
  double fit_residual_rms = 0.0;
  double fit_condition = 0.0;
  double dual_pole_distance = 0.0;  // |pole~ + pole|
  std::optional<double> equation_residual;  // max |F~(k~) - 1/f| at matched nodes
  std::optional<std::string> dual_function;
};
std::string duality_to_json(const DualityCheck& check);

void write_curvature_csv(std::ostream& os, const geometry::CurvatureField& field);
void write_dual_samples_csv(std::ostream& os, const dual::DualSamples& samples);

// Lat-long grid of the given size triangulated with fan caps at the poles.
struct Mesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> faces;  // 0-based
};
Mesh stereographic_mesh(const GraphSurface& surface, int l_max);
void write_obj(std::ostream& os, const Mesh& mesh);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace minkowski::io
