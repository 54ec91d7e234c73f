#pragma once

// Homotopy continuation for F(h_ij(u)) = t f(u, xi) + (1 - t) c over graphs
// invariant under a finite fixed-point-free group, starting from a geodesic
// sphere at t = 0.

#include "minkowski/curvature_functions.hpp"
#include "minkowski/hypersurface_geometry.hpp"

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

namespace minkowski::solver {

using curvature::CurvatureFunction;
using geometry::GraphSurface;
using spectral::HarmonicCoeffs;
using spectral::QuadratureGrid;
using spectral::SphericalPoint;

// Orthogonal 3x3 matrices acting on the equatorial S^2 (frame coordinates).
class SymmetryGroup {
 public:
  // Validates orthogonality, identity, closure, inverses and absence of
  // fixed points; throws DomainError naming the offending element.
  SymmetryGroup(std::string name, std::vector<Eigen::Matrix3d> elements);

  static SymmetryGroup antipodal();
  static SymmetryGroup trivial();  // {id}

  const std::string& name() const { return name_; }
  const std::vector<Eigen::Matrix3d>& elements() const { return elements_; }
  std::size_t order() const { return elements_.size(); }

 private:
  std::string name_;
  std::vector<Eigen::Matrix3d> elements_;
};

// Orbit-averaging projector on coefficient space and an orthonormal basis Q
// of its range.
struct InvariantProjector {
  int l_max = 0;
  Eigen::MatrixXd P;  // coeff_count x coeff_count
  Eigen::MatrixXd Q;  // coeff_count x dim
  bool coordinate = false;  // P is diagonal 0/1, Q made of unit vectors

  int dim() const { return static_cast<int>(Q.cols()); }
  HarmonicCoeffs apply(const HarmonicCoeffs& u) const;
  // Norm of the part of u outside range(P).
  double leakage(const HarmonicCoeffs& u) const;
};

InvariantProjector invariant_projector(const SymmetryGroup& group, int l_max);
// Identity on the full coefficient space.
InvariantProjector full_space(int l_max);

// f(r, xi) = exp(a(r)) * exp(sum b_lm Y_lm(xi)), a a polynomial in r.
struct PrescribedData {
  std::vector<double> a_poly;  // a(r) = sum a_k r^k
  HarmonicCoeffs b;
  double c = 0.0;

  double a(double r) const;
  double da(double r) const;
  // exp(sum b Y) at grid nodes
  Eigen::VectorXd angular(const QuadratureGrid& grid) const;
  Eigen::VectorXd values(const QuadratureGrid& grid, const Eigen::VectorXd& r) const;
  // inf of f over r in (0, pi/2) and the grid directions
  double infimum(const QuadratureGrid& grid) const;
};

// Constant data f == value.
PrescribedData constant_data(double value, int l_max);
// 0.9 * inf f, used when a configuration does not fix c.
double default_homotopy_constant(const PrescribedData& data, const QuadratureGrid& grid);
// Throws DomainError unless b lies in range(P) within 1e-12 and 0 < c < inf f.
void validate_data(const PrescribedData& data, const InvariantProjector& proj,
                   const QuadratureGrid& grid);

GraphSurface initial_sphere(const CurvatureFunction& F, double c, int l_max,
                            const Eigen::Vector4d& pole = Eigen::Vector4d::UnitW());

enum class JacobianMode {
  NodeJet,  // per-node derivatives w.r.t. the radial 2-jet, chained through the basis
  Columns,  // central differences of the projected residual, one column per unknown
};

struct SolverOptions {
  double tol = 1e-10;
  double kappa_floor = 1e-4;
  double kappa_ceil = 1e4;
  int max_newton = 30;
  int max_halvings = 20;
  double fd_step = 1e-6;
  double dt0 = 0.1;
  double dt_min = 1e-4;
  double dt_max = 0.25;
  JacobianMode jacobian = JacobianMode::NodeJet;
};

// Residual Lambda(u, t) on the grid, in reduced coordinates y with
// coefficients = Q y.
class ResidualModel {
 public:
  ResidualModel(CurvatureFunction F, PrescribedData data, int l_max,
                InvariantProjector proj, Eigen::Vector4d pole = Eigen::Vector4d::UnitW(),
                double gauge_tau0 = geometry::default_gauge_tau0());

  const QuadratureGrid& grid() const { return grid_; }
  const InvariantProjector& projector() const { return proj_; }
  const CurvatureFunction& function() const { return F_; }
  const PrescribedData& data() const { return data_; }
  int dim() const { return proj_.dim(); }

  Eigen::VectorXd reduce(const HarmonicCoeffs& u) const;
  HarmonicCoeffs expand(const Eigen::VectorXd& y) const;
  GraphSurface surface(const Eigen::VectorXd& y) const;

  struct Evaluation {
    Eigen::VectorXd lambda;   // node values
    Eigen::VectorXd reduced;  // Q^T analyze(lambda)
    Eigen::VectorXd r;
    double kappa_min = 0.0, kappa_max = 0.0;
    bool convex = false;  // every kappa > 0
  };
  // Throws DomainError if r leaves the hemisphere.
  Evaluation evaluate(const Eigen::VectorXd& y, double t) const;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& y, double t, JacobianMode mode,
                           double step = 1e-6) const;

 private:
  double node_lambda(const geometry::RadialJetAt& jet, int q, double t) const;

  CurvatureFunction F_;
  PrescribedData data_;
  QuadratureGrid grid_;
  InvariantProjector proj_;
  GraphSurface base_;
  geometry::Frame frame_;
  Eigen::VectorXd angular_;
  std::vector<SphericalPoint> points_;
  // Basis jet on the grid restricted to range(P): node x dim each.
  std::array<Eigen::MatrixXd, 6> basis_q_;
  Eigen::MatrixXd analyze_q_;  // dim x nodes, Q^T B^T W
};

struct NewtonResult {
  Eigen::VectorXd y;
  GraphSurface surface;
  int iterations = 0;
  double residual = 0.0;  // grid infinity norm
  double kappa_min = 0.0, kappa_max = 0.0;
};

// Throws KernelError (singular Jacobian), ConvexityError (no admissible step
// after max halvings) or ConvergenceError (max iterations).
NewtonResult newton_solve(const ResidualModel& model, double t, const Eigen::VectorXd& y0,
                          const SolverOptions& opts = {});

struct KernelReport {
  Eigen::VectorXd singular_values;  // ascending
  int near_kernel_dim = 0;          // sigma <= 1e-6 sigma_max
  Eigen::MatrixXd kernel_coeffs;    // coefficient vectors spanning the near-kernel
};
KernelReport kernel_report(const ResidualModel& model, const Eigen::MatrixXd& jacobian);

struct ContinuationStep {
  double t = 0.0;
  double dt = 0.0;
  bool accepted = false;
  int iterations = 0;
  double residual = 0.0;
  double kappa_min = 0.0, kappa_max = 0.0;
  double r_min = 0.0, r_max = 0.0;
  std::string note;
};

struct ContinuationReport {
  std::vector<ContinuationStep> steps;
  GraphSurface surface;
  bool success = false;
  double t_reached = 0.0;
  double residual = 0.0;
  std::string status;
  std::vector<std::string> warnings;
  double leakage = 0.0;  // coefficients outside range(P)
};

// Throws DomainError when c >= inf f or c <= 0; a non class-K F only warns.
ContinuationReport continuation(const CurvatureFunction& F, const PrescribedData& data,
                                const SymmetryGroup& group, int l_max,
                                const SolverOptions& opts = {});

struct BarrierReport {
  bool lower_ok = false;
  bool upper_ok = false;
  double lower_margin = 0.0;  // min of f - F on the lower barrier
  double upper_margin = 0.0;  // min of F - f on the upper barrier
  int lower_worst_node = -1;
  int upper_worst_node = -1;
  SphericalPoint lower_worst_point, upper_worst_point;
  bool valid() const { return lower_ok && upper_ok; }
};

// Lower barrier: F <= f. Upper barrier: F >= f, enclosed by the lower one
// (r_upper <= r_lower pointwise). Throws DomainError if not nested.
BarrierReport check_barriers(const CurvatureFunction& F, const PrescribedData& data,
                             const GraphSurface& lower, const GraphSurface& upper,
                             double tol = 1e-12);

}  // namespace minkowski::solver
