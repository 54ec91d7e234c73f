#pragma once

// Symmetric curvature functions of the principal curvatures, positively
// homogeneous of degree one, with analytic gradients and Hessians.

#include <Eigen/Dense>

#include <string>
#include <string_view>
#include <vector>

namespace minkowski::curvature {

enum class Family { Mean, SigmaK, NormA };

// F(kappa) = scale * B(kappa)           (direct form), or
// F(kappa) = scale / B(1 / kappa)       (reciprocal form),
// with B a catalog base normalized to B(1, ..., 1) = n.
class CurvatureFunction {
 public:
  const std::string& name() const { return name_; }
  int n() const { return n_; }

  double value(const Eigen::VectorXd& kappa) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& kappa) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& kappa) const;

  // The inverse 1 / F(kappa^{-1}) exactly, without renormalization, so that
  // F.inverse().inverse() == F and dual data is the reciprocal of primal data.
  CurvatureFunction inverse() const;

  double operator()(const Eigen::VectorXd& kappa) const { return value(kappa); }

 private:
  friend CurvatureFunction make_curvature_function(std::string_view name, int n);

  double base_value(const Eigen::VectorXd& k) const;
  Eigen::VectorXd base_gradient(const Eigen::VectorXd& k) const;
  Eigen::MatrixXd base_hessian(const Eigen::VectorXd& k) const;

  std::string name_;
  std::string base_name_;
  Family family_ = Family::Mean;
  int n_ = 2;
  int k_ = 1;
  double scale_ = 1.0;
  bool reciprocal_ = false;
};

// Names: "mean", "sigma_<k>" (k <= n), "gauss_power", "norm_A",
// "inverse_of(<name>)" (normalized to F(1,...,1) = n) and "dual(<name>)"
// (the exact inverse, as returned by CurvatureFunction::inverse()).
// Throws DomainError for unknown names, k > n or n < 1.
CurvatureFunction make_curvature_function(std::string_view name, int n);

// Elementary symmetric polynomial sigma_k of the entries.
double elementary_symmetric(const Eigen::VectorXd& x, int k);

struct ShapeOperatorEvaluation {
  double value = 0.0;
  Eigen::VectorXd kappa;         // ascending
  Eigen::MatrixXd eigenvectors;  // g-orthonormal columns
  Eigen::MatrixXd dF_dh;         // F^{ij} = dF / dh_ij
};

// Evaluates F on the shape operator h^i_j of a metric g_ij.
// Throws ConvexityError when kappa is not in the positive cone.
ShapeOperatorEvaluation apply_to_shape_operator(const CurvatureFunction& f,
                                                const Eigen::MatrixXd& shape,
                                                const Eigen::MatrixXd& g);

// F^{ij,kl} eta_ij eta_kl for symmetric eta, with divided differences replaced
// by derivatives when two eigenvalues are within 1e-9.
double second_variation(const CurvatureFunction& f, const ShapeOperatorEvaluation& at,
                        const Eigen::MatrixXd& eta);

struct ClassKReport {
  bool monotone = true;
  bool gradient_ordering = true;
  bool boundary_vanish = true;
  bool concave_if_deg1 = true;
  double worst_ordering_excess = 0.0;  // max of F_i k_i - F_j k_j over k_j <= k_i
  double max_hessian_eigenvalue = -1e300;
  double min_gradient = 1e300;
  int samples = 0;

  bool passes() const { return monotone && gradient_ordering && boundary_vanish && concave_if_deg1; }
};

ClassKReport class_K_check(const CurvatureFunction& f,
                           const std::vector<Eigen::VectorXd>& samples);

}  // namespace minkowski::curvature
