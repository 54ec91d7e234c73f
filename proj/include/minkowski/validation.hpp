#pragma once

// Diagnostics for numerical surfaces: Steiner point of the stereographic
// image, comparison balls, curvature bounds, conformal consistency, support
// inequality, symmetry and equation residual.

#include "minkowski/curvature_functions.hpp"
#include "minkowski/hypersurface_geometry.hpp"
#include "minkowski/solver.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace minkowski::validation {

using geometry::GraphSurface;

// (1/|S^2|) int x K^ dA over the projected surface, K^ = det h^ / det g^.
Eigen::Vector3d steiner_point(const GraphSurface& surface);

struct Balls {
  double r_in = 0.0;
  double r_out = 0.0;
};
// Min and max grid radius about the surface's pole.
Balls enclosing_balls(const GraphSurface& surface);

// Geodesic sphere of the given radius centred at cos(tilt) pole + sin(tilt) e,
// e = first equatorial axis, written as a graph about the pole and expanded
// to l_max.
GraphSurface off_center_sphere(double radius, double tilt, int l_max,
                               const Eigen::Vector4d& pole = Eigen::Vector4d::UnitW());

struct Tolerances {
  double steiner = 1e-8;
  double stereographic = 1e-6;
  double kappa_low = 1e-3;
  double kappa_high = 1e3;
  double symmetry = 1e-10;
  double residual = 1e-8;
  int support_pairs = 10000;
  std::uint64_t seed = 1;
};

struct Check {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool pass = false;
};

struct DiagnosticsReport {
  Eigen::Vector3d steiner = Eigen::Vector3d::Zero();
  double steiner_magnitude = 0.0;
  Balls balls;
  double kappa_min = 0.0;
  double kappa_max = 0.0;
  double stereographic_residual = 0.0;
  std::optional<double> support_margin;    // max off-diagonal <x, x~'>, convex surfaces only
  std::optional<double> support_diagonal;  // max |<x, x~>|
  std::optional<double> symmetry_leakage;
  std::optional<double> residual_max;  // |F - f| at grid nodes
  std::optional<double> residual_rms;
  std::vector<Check> checks;

  bool passed() const;
};

struct EquationData {
  curvature::CurvatureFunction F;
  solver::PrescribedData f;
};

DiagnosticsReport full_report(const GraphSurface& surface,
                              const std::optional<solver::SymmetryGroup>& group = std::nullopt,
                              const std::optional<EquationData>& equation = std::nullopt,
                              const Tolerances& tol = {});

}  // namespace minkowski::validation
