#include "doctest.h"

#include "minkowski/errors.hpp"
#include "minkowski/solver.hpp"

#include <cmath>
#include <map>
#include <random>

using namespace minkowski;
using namespace minkowski::solver;
using spectral::kPi;

namespace {

Eigen::Matrix3d rot_z(double a) {
  Eigen::Matrix3d m;
  m << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
  return m;
}

// f = 2 exp(0.2 Yhat), Yhat = (Y20 + Y22)/sqrt2
PrescribedData even_data(int l_max, double c = 1.0) {
  PrescribedData d;
  d.a_poly = {std::log(2.0)};
  d.b = HarmonicCoeffs::zeros(l_max);
  d.b(2, 0) = 0.2 / std::sqrt(2.0);
  d.b(2, 2) = 0.2 / std::sqrt(2.0);
  d.c = c;
  return d;
}

const auto kGauss = curvature::make_curvature_function("gauss_power", 2);

}  // namespace

TEST_CASE("symmetry group validation") {
  CHECK_NOTHROW(SymmetryGroup::antipodal());
  CHECK_NOTHROW(SymmetryGroup::trivial());
  CHECK(SymmetryGroup::antipodal().order() == 2);

  const Eigen::Matrix3d id = Eigen::Matrix3d::Identity();
  // half-turn about the z axis fixes (0, 0, +-1)
  try {
    SymmetryGroup("half-turn", {id, rot_z(kPi)});
    FAIL("expected a fixed point error");
  } catch (const DomainError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("fixes the direction") != std::string::npos);
  }
  CHECK_THROWS_AS(SymmetryGroup("klein", {id, -id, rot_z(kPi), -rot_z(kPi)}), DomainError);
  CHECK_THROWS_AS(SymmetryGroup("open", {id, -rot_z(kPi / 2)}), DomainError);  // not closed
  CHECK_THROWS_AS(SymmetryGroup("no-id", {-id}), DomainError);
  Eigen::Matrix3d skew = id;
  skew(0, 1) = 0.1;
  CHECK_THROWS_AS(SymmetryGroup("skew", {id, skew}), DomainError);
}

TEST_CASE("invariant projector for the antipodal group") {
  const int L = 8;
  auto proj = invariant_projector(SymmetryGroup::antipodal(), L);
  CHECK(proj.coordinate);
  CHECK(((proj.P * proj.P) - proj.P).cwiseAbs().maxCoeff() <= 1e-12);

  auto y10 = HarmonicCoeffs::single(L, 1, 0);
  CHECK(proj.apply(y10).values.norm() <= 1e-12);
  auto y21 = HarmonicCoeffs::single(L, 2, 1);
  CHECK((proj.apply(y21).values - y21.values).norm() <= 1e-12);
  auto one = HarmonicCoeffs::single(L, 0, 0, 3.0);
  CHECK((proj.apply(one).values - one.values).norm() <= 1e-12);
  for (int m = -1; m <= 1; ++m)
    CHECK(proj.apply(HarmonicCoeffs::single(L, 1, m)).values.norm() <= 1e-12);

  // dimension = sum over even l of (2l + 1)
  int dim = 0;
  for (int l = 0; l <= L; l += 2) dim += 2 * l + 1;
  CHECK(proj.dim() == dim);
  CHECK((proj.Q.transpose() * proj.Q - Eigen::MatrixXd::Identity(dim, dim)).norm() <= 1e-12);

  auto triv = invariant_projector(SymmetryGroup::trivial(), L);
  CHECK(triv.dim() == spectral::coeff_count(L));
}

TEST_CASE("prescribed data") {
  const int L = 12;
  auto d = even_data(L);
  QuadratureGrid grid(L);
  auto proj = invariant_projector(SymmetryGroup::antipodal(), L);
  CHECK_NOTHROW(validate_data(d, proj, grid));

  // orbit sampling: f(r, -xi) = f(r, xi)
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    Eigen::Vector3d w(u(rng), u(rng), u(rng));
    const SphericalPoint a[2] = {spectral::to_spherical(w), spectral::to_spherical(-w)};
    auto v = spectral::evaluate(d.b, a);
    worst = std::max(worst, std::abs(std::exp(v[0]) - std::exp(v[1])));
  }
  CHECK(worst <= 1e-12);

  CHECK(default_homotopy_constant(d, grid) == doctest::Approx(0.9 * d.infimum(grid)));
  CHECK(d.infimum(grid) < 2.0);

  auto odd = d;
  odd.b(1, 0) = 0.1;
  CHECK_THROWS_AS(validate_data(odd, proj, grid), DomainError);
  auto high = d;
  high.c = d.infimum(grid);
  CHECK_THROWS_AS(validate_data(high, proj, grid), DomainError);
  high.c = 0.0;
  CHECK_THROWS_AS(validate_data(high, proj, grid), DomainError);

  PrescribedData poly;
  poly.a_poly = {0.5, -1.0, 0.25};
  CHECK(poly.a(2.0) == doctest::Approx(0.5 - 2.0 + 1.0));
  CHECK(poly.da(2.0) == doctest::Approx(-1.0 + 1.0));
}

TEST_CASE("initial sphere") {
  auto r0 = [](double c) { return initial_sphere(kGauss, c, 8).radial(0, 0) / std::sqrt(4 * kPi); };
  CHECK(r0(2.0) == doctest::Approx(kPi / 4).epsilon(1e-14));
  CHECK(r0(2.0 * std::sqrt(3.0)) == doctest::Approx(kPi / 6).epsilon(1e-14));
  CHECK(r0(200.0) == doctest::Approx(0.00999966668666524).epsilon(1e-12));
  CHECK_THROWS_AS(initial_sphere(kGauss, 0.0, 8), DomainError);

  const int L = 12;
  auto d = constant_data(2.0, L);
  d.c = 1.3;
  ResidualModel model(kGauss, d, L, invariant_projector(SymmetryGroup::antipodal(), L));
  auto ev = model.evaluate(model.reduce(initial_sphere(kGauss, d.c, L).radial), 0.0);
  CHECK(ev.lambda.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("Jacobian against finite differences") {
  const int L = 12;
  auto d = even_data(L);
  d.a_poly = {std::log(2.0), 0.3};  // exercise the radial dependence too
  ResidualModel model(kGauss, d, L, invariant_projector(SymmetryGroup::antipodal(), L));
  auto start = initial_sphere(kGauss, d.c, L).radial;
  start(2, 0) += 0.03;
  start(4, -3) -= 0.01;
  const Eigen::VectorXd y = model.reduce(start);
  const double t = 0.6;

  const Eigen::MatrixXd jet = model.jacobian(y, t, JacobianMode::NodeJet);
  const Eigen::MatrixXd cols = model.jacobian(y, t, JacobianMode::Columns);
  CHECK((jet - cols).norm() <= 1e-6 * cols.norm());

  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int k = 0; k < 20; ++k) {
    Eigen::VectorXd v(model.dim());
    for (auto& x : v) x = g(rng);
    v.normalize();
    const double h = 1e-5;
    const Eigen::VectorXd fd =
        (model.evaluate(y + h * v, t).reduced - model.evaluate(y - h * v, t).reduced) / (2 * h);
    const Eigen::VectorXd an = jet * v;
    CHECK((an - fd).norm() <= 1e-5 * fd.norm());
  }
}

TEST_CASE("linearization at the sphere is a multiple of -(Laplacian + 2)") {
  const int L = 12;
  auto d = constant_data(2.0, L);
  d.c = 1.0;
  ResidualModel model(kGauss, d, L, invariant_projector(SymmetryGroup::antipodal(), L));
  const Eigen::VectorXd y = model.reduce(initial_sphere(kGauss, d.c, L).radial);
  const Eigen::MatrixXd jac = model.jacobian(y, 0.0, JacobianMode::NodeJet);
  const auto& Q = model.projector().Q;

  // J restricted to each degree is a scalar
  auto column_of = [&](int l, int m) {
    Eigen::Index k;
    (Q.transpose() * HarmonicCoeffs::single(L, l, m).values).cwiseAbs().maxCoeff(&k);
    return k;
  };
  std::map<int, double> lambda;
  for (int l = 0; l <= L; l += 2) {
    lambda[l] = jac(column_of(l, 0), column_of(l, 0));
    for (int m = -l; m <= l; ++m) {
      const auto k = column_of(l, m);
      CHECK(std::abs(jac(k, k) - lambda[l]) <= 1e-7 * std::abs(lambda[l]));
      Eigen::VectorXd col = jac.col(k);
      col[k] = 0.0;
      CHECK(col.cwiseAbs().maxCoeff() <= 1e-7 * std::abs(lambda[l]));
    }
  }
  auto ratio = [](int l) { return double(l * (l + 1) - 2); };
  for (int l : {2, 4})
    CHECK(std::abs(lambda[l] / lambda[0] - ratio(l) / ratio(0)) <= 1e-4);
  CHECK(std::abs(lambda[4] / lambda[2] - ratio(4) / ratio(2)) <= 1e-4);
}

TEST_CASE("degree-one kernel on the full space") {
  const int L = 10;
  auto d = constant_data(2.0, L);
  d.c = 1.0;
  ResidualModel model(kGauss, d, L, full_space(L));
  const Eigen::VectorXd y = model.reduce(initial_sphere(kGauss, d.c, L).radial);
  const Eigen::MatrixXd jac = model.jacobian(y, 0.0, JacobianMode::NodeJet);
  auto rep = kernel_report(model, jac);
  CHECK(rep.near_kernel_dim == 3);
  // the near-kernel is spanned by degree-one harmonics
  for (int k = 0; k < rep.near_kernel_dim; ++k) {
    const Eigen::VectorXd c = rep.kernel_coeffs.col(k);
    CHECK(c.segment(1, 3).norm() >= 1.0 - 1e-8);
  }
  CHECK(rep.singular_values[3] > 1e-3 * rep.singular_values[rep.singular_values.size() - 1]);

  SolverOptions opts;
  opts.tol = 1e-17;  // force a Newton step
  CHECK_THROWS_AS(newton_solve(model, 0.0, y, opts), KernelError);

  // on the invariant subspace the same point is regular
  ResidualModel inv(kGauss, d, L, invariant_projector(SymmetryGroup::antipodal(), L));
  auto irep = kernel_report(inv, inv.jacobian(inv.reduce(initial_sphere(kGauss, d.c, L).radial),
                                              0.0, JacobianMode::NodeJet));
  CHECK(irep.near_kernel_dim == 0);
}

TEST_CASE("Newton at t = 0: exact start and uniqueness") {
  const int L = 16;
  auto d = constant_data(2.0, L);
  d.c = 1.5;
  ResidualModel model(kGauss, d, L, invariant_projector(SymmetryGroup::antipodal(), L));
  auto sphere = initial_sphere(kGauss, d.c, L);
  const double r0 = sphere.radial(0, 0) / std::sqrt(4 * kPi);

  auto exact = newton_solve(model, 0.0, model.reduce(sphere.radial));
  CHECK(exact.iterations <= 1);
  CHECK(exact.residual <= 1e-12);

  auto start = sphere.radial;
  start(2, 0) += 0.02;
  auto res = newton_solve(model, 0.0, model.reduce(start));
  CHECK(res.residual <= 1e-10);
  const Eigen::VectorXd r = model.grid().synthesize(res.surface.radial);
  CHECK((r.array() - r0).abs().maxCoeff() <= 1e-9);
  CHECK(model.projector().leakage(res.surface.radial) <= 1e-12);

  auto bad = sphere.radial;
  bad(2, 0) += 2.0;  // far from convex
  CHECK_THROWS(newton_solve(model, 0.0, model.reduce(bad)));
}

TEST_CASE("continuation with constant data returns the sphere") {
  const int L = 16;
  auto d = constant_data(2.0, L);
  d.c = 1.0;
  auto rep = continuation(kGauss, d, SymmetryGroup::antipodal(), L);
  REQUIRE(rep.success);
  CHECK(rep.warnings.empty());
  CHECK(rep.residual <= 1e-10);
  CHECK(rep.t_reached == 1.0);
  QuadratureGrid grid(L);
  const Eigen::VectorXd r = grid.synthesize(rep.surface.radial);
  CHECK((r.array() - kPi / 4).abs().maxCoeff() <= 1e-9);
  double prev = -1.0;
  for (const auto& st : rep.steps) {
    if (!st.accepted) continue;
    CHECK(st.t > prev);
    CHECK(st.kappa_min > 0.0);
    prev = st.t;
  }
}

TEST_CASE("continuation with even data") {
  const int L = 24;
  auto d = even_data(L);
  auto rep = continuation(kGauss, d, SymmetryGroup::antipodal(), L);
  REQUIRE(rep.success);
  CHECK(rep.residual <= 1e-8);
  CHECK(rep.leakage <= 1e-10);
  double odd = 0.0;
  for (int l = 1; l <= L; l += 2)
    for (int m = -l; m <= l; ++m) odd = std::max(odd, std::abs(rep.surface.radial(l, m)));
  CHECK(odd <= 1e-10);
  CHECK(rep.steps.back().kappa_min > 0.05);
  CHECK(rep.steps.back().r_min > 0.0);
  CHECK(rep.steps.back().r_max < kPi / 2);

  // F = f pointwise, also away from the grid, and the residual is invariant
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<SphericalPoint> pts, anti;
  for (int i = 0; i < 100; ++i) {
    Eigen::Vector3d w(u(rng), u(rng), u(rng));
    pts.push_back(spectral::to_spherical(w));
    anti.push_back(spectral::to_spherical(-w));
  }
  auto lambda_at = [&](const std::vector<SphericalPoint>& p) {
    auto field = geometry::curvature_field_at(rep.surface, p);
    auto bv = spectral::evaluate(d.b, p);
    Eigen::VectorXd out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
      out[i] = kGauss(field.nodes[i].kappa) - std::exp(d.a(field.nodes[i].r) + bv[i]);
    return out;
  };
  const Eigen::VectorXd a = lambda_at(pts), b = lambda_at(anti);
  CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(a.cwiseAbs().maxCoeff() <= 1e-7);
}

TEST_CASE("continuation preconditions and warnings") {
  const int L = 8;
  auto d = even_data(L, 5.0);
  CHECK_THROWS_AS(continuation(kGauss, d, SymmetryGroup::antipodal(), L), DomainError);

  auto c = constant_data(2.0, L);
  c.c = 1.0;
  auto rep = continuation(curvature::make_curvature_function("mean", 2), c,
                          SymmetryGroup::antipodal(), L);
  CHECK_FALSE(rep.warnings.empty());
  CHECK(rep.success);
}

TEST_CASE("barriers") {
  const int L = 8;
  auto f = constant_data(2.0, L);
  auto lower = GraphSurface::sphere(kPi / 3, L);
  auto upper = GraphSurface::sphere(kPi / 6, L);
  auto rep = check_barriers(kGauss, f, lower, upper);
  CHECK(rep.valid());
  CHECK(rep.lower_margin == doctest::Approx(2.0 - 2.0 / std::sqrt(3.0)).epsilon(1e-10));
  CHECK(rep.upper_margin == doctest::Approx(2.0 * std::sqrt(3.0) - 2.0).epsilon(1e-10));

  auto sol = GraphSurface::sphere(kPi / 4, L);
  auto same = check_barriers(kGauss, f, sol, sol);
  CHECK(same.valid());
  CHECK(std::abs(same.lower_margin) <= 1e-12);
  CHECK(std::abs(same.upper_margin) <= 1e-12);

  // a lower barrier with F > f somewhere
  auto small = GraphSurface::sphere(kPi / 4 - 0.05, L);
  small.radial(2, 1) += 0.02;
  auto viol = check_barriers(kGauss, f, small, upper);
  CHECK_FALSE(viol.lower_ok);
  CHECK(viol.lower_margin < 0.0);
  CHECK(viol.lower_worst_node >= 0);

  CHECK_THROWS_AS(check_barriers(kGauss, f, upper, lower), DomainError);
}
