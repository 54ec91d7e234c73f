#include "doctest.h"

#include "minkowski/errors.hpp"
#include "minkowski/sphere_spectral.hpp"

#include <cmath>
#include <random>

using namespace minkowski;
using namespace minkowski::spectral;

namespace {

// Laplace-Beltrami by centered differences of point evaluations on a refined
// lat-long stencil: u_tt + cot(t) u_t + u_pp / sin^2(t).
double fd_laplacian(int l, int m, double theta, double phi, double h) {
  auto u = [&](double t, double p) { return real_harmonic(l, m, t, p); };
  const double u0 = u(theta, phi);
  const double ut = (u(theta + h, phi) - u(theta - h, phi)) / (2 * h);
  const double utt = (u(theta + h, phi) - 2 * u0 + u(theta - h, phi)) / (h * h);
  const double upp = (u(theta, phi + h) - 2 * u0 + u(theta, phi - h)) / (h * h);
  const double s = std::sin(theta);
  return utt + std::cos(theta) / s * ut + upp / (s * s);
}

}  // namespace

TEST_CASE("grid construction and weights") {
  CHECK_THROWS_AS(build_grid(3), DomainError);
  const auto grid = build_grid(8);
  CHECK(grid.n_theta() >= 9);
  CHECK(grid.n_phi() >= 17);
  CHECK(std::abs(grid.weights().sum() - kFourPi) < 1e-12);
  CHECK(std::abs(grid.integrate(Eigen::VectorXd::Ones(grid.size())) - kFourPi) < 1e-12);
  for (int i = 0; i < grid.n_theta(); ++i) {
    CHECK(grid.theta(i) > 0.0);
    CHECK(grid.theta(i) < kPi);
  }
  const auto def = build_grid(24);
  CHECK(def.n_theta() == 25);
  CHECK(def.n_phi() == 49);
}

TEST_CASE("orthonormality from the dense Gram matrix of basis columns") {
  for (int l_max : {8, 24}) {
    const auto grid = build_grid(l_max);
    const Eigen::MatrixXd b = grid.basis_matrix();
    const Eigen::MatrixXd gram = b.transpose() * grid.weights().asDiagonal() * b;
    const double err = (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
    CHECK(err < 1e-10);
    const int k = coeff_index(2, 0);
    CHECK(std::abs(gram(k, k) - 1.0) < 1e-12);
  }
}

TEST_CASE("analysis against direct quadrature inner products") {
  const auto grid = build_grid(8);
  const Eigen::MatrixXd b = grid.basis_matrix();

  SUBCASE("Y_3^1") {
    const Eigen::VectorXd v = b.col(coeff_index(3, 1));
    const auto a = grid.analyze(v);
    const Eigen::VectorXd direct = b.transpose() * grid.weights().cwiseProduct(v);
    CHECK((a.values - direct).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(std::abs(a(3, 1) - 1.0) < 1e-10);
    Eigen::VectorXd rest = a.values;
    rest[coeff_index(3, 1)] = 0.0;
    CHECK(rest.cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("zero field") {
    CHECK(grid.analyze(Eigen::VectorXd::Zero(grid.size())).values.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("Y_1^0 + Y_2^2") {
    const Eigen::VectorXd v = b.col(coeff_index(1, 0)) + b.col(coeff_index(2, 2));
    const auto a = grid.analyze(v);
    int nonzero = 0;
    for (int k = 0; k < a.values.size(); ++k) nonzero += std::abs(a.values[k]) > 1e-10;
    CHECK(nonzero == 2);
    CHECK(std::abs(a(1, 0) - 1.0) < 1e-10);
    CHECK(std::abs(a(2, 2) - 1.0) < 1e-10);
  }
  SUBCASE("size mismatch") {
    CHECK_THROWS_AS(grid.analyze(Eigen::VectorXd::Zero(3)), DomainError);
    CHECK_THROWS_AS(grid.synthesize(HarmonicCoeffs::zeros(6)), DomainError);
  }
}

TEST_CASE("round trip and Parseval on random band-limited fields") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  for (int l_max : {4, 11, 24}) {
    const auto grid = build_grid(l_max);
    for (int trial = 0; trial < 3; ++trial) {
      auto c = HarmonicCoeffs::zeros(l_max);
      for (int k = 0; k < c.values.size(); ++k) c.values[k] = normal(rng);
      const Eigen::VectorXd v = grid.synthesize(c);
      const auto back = grid.analyze(v);
      CHECK((back.values - c.values).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((grid.synthesize(back) - v).cwiseAbs().maxCoeff() < 1e-10);
      const double energy = grid.integrate(v.cwiseProduct(v));
      CHECK(std::abs(energy - c.values.squaredNorm()) < 1e-10 * std::max(1.0, energy));
    }
  }
}

TEST_CASE("grid synthesis agrees with point evaluation") {
  const auto grid = build_grid(12);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uni(-1, 1);
  auto c = HarmonicCoeffs::zeros(12);
  for (int k = 0; k < c.values.size(); ++k) c.values[k] = uni(rng);
  const auto jet = grid.synthesize_jet(c);
  const auto pts = grid.points();
  const auto pjet = evaluate_jet(c, pts);
  CHECK((jet.value - pjet.value).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((jet.d_theta - pjet.d_theta).cwiseAbs().maxCoeff() < 1e-11);
  CHECK((jet.d_phi - pjet.d_phi).cwiseAbs().maxCoeff() < 1e-11);
  CHECK((jet.d_theta_theta - pjet.d_theta_theta).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((jet.d_theta_phi - pjet.d_theta_phi).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((jet.d_phi_phi - pjet.d_phi_phi).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("Laplace-Beltrami of low harmonics against finite differences") {
  const auto grid = build_grid(8);
  for (auto [l, m] : {std::pair{2, 0}, std::pair{1, 0}}) {
    const auto c = HarmonicCoeffs::single(8, l, m);
    const Eigen::VectorXd lap = laplace_beltrami(grid, c);
    const Eigen::VectorXd u = grid.synthesize(c);
    CHECK((lap + l * (l + 1) * u).cwiseAbs().maxCoeff() < 1e-10);
    // Independent finite-difference oracle at a handful of nodes.
    for (int q = 0; q < grid.size(); q += 37) {
      const auto p = grid.point(q);
      CHECK(std::abs(fd_laplacian(l, m, p.theta, p.phi, 1e-4) - lap[q]) < 1e-5);
    }
  }
}

TEST_CASE("Laplace-Beltrami eigenrelation for every degree up to l_max - 2") {
  const int l_max = 24;
  const auto grid = build_grid(l_max);
  double worst = 0.0;
  for (int l = 0; l <= l_max - 2; ++l) {
    for (int m = -l; m <= l; ++m) {
      const auto c = HarmonicCoeffs::single(l_max, l, m);
      const Eigen::VectorXd res = laplace_beltrami(grid, c) + l * (l + 1.0) * grid.synthesize(c);
      worst = std::max(worst, res.cwiseAbs().maxCoeff());
    }
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("constant field has vanishing derivatives; Hessian symmetric") {
  const auto grid = build_grid(8);
  const auto c = HarmonicCoeffs::single(8, 0, 0, 3.0);
  for (const auto& g : surface_gradient(grid, c)) CHECK(g.cwiseAbs().maxCoeff() < 1e-13);
  for (const auto& h : surface_hessian(grid, c)) CHECK(h.cwiseAbs().maxCoeff() < 1e-13);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uni(-1, 1);
  auto r = HarmonicCoeffs::zeros(8);
  for (int k = 0; k < r.values.size(); ++k) r.values[k] = uni(rng);
  for (const auto& h : surface_hessian(grid, r)) CHECK(std::abs(h(0, 1) - h(1, 0)) <= 1e-12);
}

TEST_CASE("index helpers") {
  for (int k = 0; k < coeff_count(10); ++k) {
    const auto [l, m] = index_to_lm(k);
    CHECK(coeff_index(l, m) == k);
    CHECK(std::abs(m) <= l);
  }
  const auto p = to_spherical(direction_jet(0.7, 5.1).w);
  CHECK(std::abs(p.theta - 0.7) < 1e-14);
  CHECK(std::abs(p.phi - 5.1) < 1e-14);
}
