#pragma once

// Spherical Gauss map x -> x~ of a strictly convex graph, the polar
// hypersurface as a graph about the antipodal pole, and the reciprocal
// curvature relations between the two.

#include "minkowski/curvature_functions.hpp"
#include "minkowski/hypersurface_geometry.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace minkowski::dual {

using geometry::CurvatureField;
using geometry::GraphSurface;
using spectral::SphericalPoint;

struct DualSamples {
  Eigen::Vector4d pole;  // pole of the dual graph (antipode of the source pole)
  std::vector<SphericalPoint> source_points;
  std::vector<Eigen::Vector4d> x;      // source points
  std::vector<Eigen::Vector4d> x_dual; // unit normals, as points of S^3
  std::vector<double> r_star;          // distance of x_dual from the dual pole
  std::vector<SphericalPoint> eta;     // direction of x_dual over the dual equator
  std::vector<Eigen::Vector2d> kappa;       // source, ascending
  std::vector<Eigen::Vector2d> kappa_dual;  // ascending
  std::vector<Eigen::Matrix2d> g_dual, h_dual;

  std::size_t size() const { return x.size(); }
  // max |<x, x~>| and max |kappa~_i kappa_{n+1-i} - 1|
  double max_orthogonality_error() const;
  double max_reciprocity_error() const;
};

// Throws ConvexityError unless every kappa > 0.
DualSamples gauss_map(const CurvatureField& field, const Eigen::Vector4d& source_pole);
DualSamples gauss_map(const CurvatureField& field, const GraphSurface& source);

struct DualGraphFit {
  GraphSurface surface;
  double residual_max = 0.0;
  double residual_rms = 0.0;
  double condition = 0.0;
  int truncated = 0;  // singular values discarded
};

// Least-squares harmonic fit of r*(eta). Throws ResolutionError when the
// design matrix condition number exceeds 1e8 or there are too few samples.
DualGraphFit dual_as_graph(const DualSamples& samples, int l_max, double gauge_tau0);
DualGraphFit dual_as_graph(const DualSamples& samples, int l_max);

struct SupportReport {
  int pairs = 0;
  double max_offdiagonal = -1e300;  // max <x(xi), x~(xi')> over xi != xi'
  double max_diagonal = 0.0;        // max |<x(xi), x~(xi)>|
  bool passed() const { return max_offdiagonal < 0.0 && max_diagonal <= 1e-10; }
};

// Random node pairs of the surface's own quadrature grid.
SupportReport support_test(const GraphSurface& surface, int sample_count, std::uint64_t seed = 1);

struct TransferredProblem {
  curvature::CurvatureFunction F;
  Eigen::VectorXd f;
};

// (F, f) -> (F~, 1/f). Throws DomainError if any f <= 0 or is not finite.
TransferredProblem transfer_problem(const curvature::CurvatureFunction& F,
                                    const Eigen::VectorXd& f_values);

// M** pointwise: the unit normal of M* = {x~(xi)} from its own parametric
// embedding, x~_i taken from the harmonic expansion of the normal field.
struct DoubleDual {
  std::vector<Eigen::Vector4d> x;  // x~~ per grid node
  double max_distance = 0.0;       // max |x~~ - x|
};
DoubleDual double_dual(const GraphSurface& surface, const spectral::QuadratureGrid& grid);

// max |h_ij - <x~_i, x_j>| over grid nodes, with x~_i from the harmonic
// expansion of the normal field.
double dual_second_fundamental_form_error(const GraphSurface& surface,
                                          const spectral::QuadratureGrid& grid);

}  // namespace minkowski::dual
