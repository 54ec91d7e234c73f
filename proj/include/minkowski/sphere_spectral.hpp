#pragma once

// Real spherical harmonics on S^2: Gauss-Legendre x uniform-longitude
// quadrature, analysis/synthesis, point evaluation and covariant derivatives
// with respect to the round metric dtheta^2 + sin^2(theta) dphi^2.

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace minkowski::spectral {

constexpr double kPi = 3.14159265358979323846;
constexpr double kFourPi = 4.0 * kPi;

// Coefficients are ordered lexicographically in (l, m), m = -l..l.
constexpr int coeff_count(int l_max) { return (l_max + 1) * (l_max + 1); }
constexpr int coeff_index(int l, int m) { return l * l + l + m; }

struct HarmonicIndex {
  int l;
  int m;
};
HarmonicIndex index_to_lm(int k);

struct HarmonicCoeffs {
  int l_max = 0;
  Eigen::VectorXd values;

  static HarmonicCoeffs zeros(int l_max);
  static HarmonicCoeffs single(int l_max, int l, int m, double value = 1.0);

  double operator()(int l, int m) const { return values[coeff_index(l, m)]; }
  double& operator()(int l, int m) { return values[coeff_index(l, m)]; }

  // Copy truncated or zero-padded to another band limit.
  HarmonicCoeffs resized(int new_l_max) const;
};

struct SphericalPoint {
  double theta = 0.0;
  double phi = 0.0;
};

// A scalar field sampled together with its partial derivatives in (theta, phi).
struct FieldJet {
  Eigen::VectorXd value;
  Eigen::VectorXd d_theta;
  Eigen::VectorXd d_phi;
  Eigen::VectorXd d_theta_theta;
  Eigen::VectorXd d_theta_phi;
  Eigen::VectorXd d_phi_phi;

  Eigen::Index size() const { return value.size(); }
};

// Basis functions and their partial derivatives at a set of points.
// Every matrix is points x coeff_count(l_max).
struct BasisJet {
  Eigen::MatrixXd value;
  Eigen::MatrixXd d_theta;
  Eigen::MatrixXd d_phi;
  Eigen::MatrixXd d_theta_theta;
  Eigen::MatrixXd d_theta_phi;
  Eigen::MatrixXd d_phi_phi;
};

class QuadratureGrid {
 public:
  // Throws DomainError for l_max < 4.
  explicit QuadratureGrid(int l_max);

  int l_max() const { return l_max_; }
  int n_theta() const { return n_theta_; }
  int n_phi() const { return n_phi_; }
  int size() const { return n_theta_ * n_phi_; }

  // Node q = ring * n_phi + column.
  int node(int ring, int column) const { return ring * n_phi_ + column; }
  double theta(int ring) const { return theta_[ring]; }
  double phi(int column) const { return phi_[column]; }
  SphericalPoint point(int q) const { return {theta_[q / n_phi_], phi_[q % n_phi_]}; }
  std::vector<SphericalPoint> points() const;

  const Eigen::VectorXd& weights() const { return weights_; }

  // Sequential weighted sum over nodes.
  double integrate(const Eigen::VectorXd& values) const;

  HarmonicCoeffs analyze(const Eigen::VectorXd& values) const;
  Eigen::VectorXd synthesize(const HarmonicCoeffs& coeffs) const;
  FieldJet synthesize_jet(const HarmonicCoeffs& coeffs) const;

  // Dense basis matrix on the nodes (size() x coeff_count(l_max)).
  Eigen::MatrixXd basis_matrix() const;

 private:
  int l_max_;
  int n_theta_;
  int n_phi_;
  std::vector<double> theta_;
  std::vector<double> phi_;
  std::vector<double> ring_weight_;
  Eigen::VectorXd weights_;
  // Per ring, normalized associated Legendre functions and theta-derivatives,
  // triangular layout l(l+1)/2 + m.
  std::vector<std::vector<double>> legendre_;
  std::vector<std::vector<double>> legendre_dt_;
  std::vector<std::vector<double>> legendre_dtt_;
  Eigen::MatrixXd cos_table_;  // n_phi x (l_max + 1)
  Eigen::MatrixXd sin_table_;
};

QuadratureGrid build_grid(int l_max);

// Gauss-Legendre nodes/weights on [-1, 1], nodes descending.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Real, orthonormal spherical harmonic Y_lm (no Condon-Shortley phase).
double real_harmonic(int l, int m, double theta, double phi);

BasisJet evaluate_basis(int l_max, std::span<const SphericalPoint> points);
Eigen::MatrixXd basis_values(int l_max, std::span<const SphericalPoint> points);
FieldJet evaluate_jet(const HarmonicCoeffs& coeffs, std::span<const SphericalPoint> points);
Eigen::VectorXd evaluate(const HarmonicCoeffs& coeffs, std::span<const SphericalPoint> points);

// Covariant derivatives with respect to sigma = dtheta^2 + sin^2 theta dphi^2.
// Gradient components (u_theta, u_phi); Hessian u_{;ij} in (theta, phi) indices.
std::vector<Eigen::Vector2d> surface_gradient(const QuadratureGrid& grid, const HarmonicCoeffs& coeffs);
std::vector<Eigen::Matrix2d> surface_hessian(const QuadratureGrid& grid, const HarmonicCoeffs& coeffs);
Eigen::Matrix2d covariant_hessian(const FieldJet& jet, Eigen::Index q, double theta);
Eigen::VectorXd laplace_beltrami(const QuadratureGrid& grid, const HarmonicCoeffs& coeffs);

// Unit vector of S^2 for (theta, phi) and its partial derivatives.
struct DirectionJet {
  Eigen::Vector3d w, w_t, w_p, w_tt, w_tp, w_pp;
};
DirectionJet direction_jet(double theta, double phi);
SphericalPoint to_spherical(const Eigen::Vector3d& direction);

}  // namespace minkowski::spectral
