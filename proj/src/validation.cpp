#include "minkowski/validation.hpp"

#include "minkowski/errors.hpp"
#include "minkowski/polar_dual.hpp"

#include <algorithm>
#include <cmath>

namespace minkowski::validation {

using spectral::QuadratureGrid;

namespace {

int grid_size_for(const GraphSurface& s) { return std::max(s.radial.l_max, 4); }

GraphSurface on_grid(const GraphSurface& s, int l_max) {
  GraphSurface out = s;
  out.radial = s.radial.resized(l_max);
  return out;
}

}  // namespace

Eigen::Vector3d steiner_point(const GraphSurface& surface) {
  const int l_max = grid_size_for(surface);
  const QuadratureGrid grid(l_max);
  const auto proj = geometry::stereographic_project(on_grid(surface, l_max), grid);
  Eigen::Vector3d p = Eigen::Vector3d::Zero();
  for (int q = 0; q < grid.size(); ++q) {
    // K^ dA = det h / sqrt(det g) dtheta dphi; the weights carry sin(theta)
    const double k_area = proj.h[q].determinant() / std::sqrt(proj.g[q].determinant());
    const double s = std::sin(grid.point(q).theta);
    p += grid.weights()[q] * k_area / s * proj.points[q];
  }
  return p / spectral::kFourPi;
}

Balls enclosing_balls(const GraphSurface& surface) {
  const int l_max = grid_size_for(surface);
  const QuadratureGrid grid(l_max);
  const Eigen::VectorXd r = grid.synthesize(surface.radial.resized(l_max));
  geometry::check_hemisphere(r, "enclosing_balls");
  return {r.minCoeff(), r.maxCoeff()};
}

GraphSurface off_center_sphere(double radius, double tilt, int l_max, const Eigen::Vector4d& pole) {
  if (!(radius > 0.0) || !(std::abs(tilt) < radius) || !(radius + std::abs(tilt) < spectral::kPi / 2))
    throw DomainError("off_center_sphere: need |tilt| < radius and radius + |tilt| < pi/2");
  const QuadratureGrid grid(l_max);
  Eigen::VectorXd r(grid.size());
  for (int q = 0; q < grid.size(); ++q) {
    const auto pt = grid.point(q);
    const Eigen::Vector3d w = spectral::direction_jet(pt.theta, pt.phi).w;
    // <sin r w + cos r p, cos a p + sin a e> = cos R
    const double a = std::sin(tilt) * w[0], b = std::cos(tilt);
    const double amp = std::hypot(a, b);
    r[q] = std::atan2(a, b) + std::acos(std::cos(radius) / amp);
  }
  GraphSurface s;
  s.pole = pole.normalized();
  s.radial = grid.analyze(r);
  return s;
}

bool DiagnosticsReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

DiagnosticsReport full_report(const GraphSurface& surface,
                              const std::optional<solver::SymmetryGroup>& group,
                              const std::optional<EquationData>& equation, const Tolerances& tol) {
  const int l_max = grid_size_for(surface);
  const QuadratureGrid grid(l_max);
  const GraphSurface s = on_grid(surface, l_max);

  DiagnosticsReport rep;
  const auto field = geometry::curvature_field(s, grid);
  rep.kappa_min = field.kappa_min();
  rep.kappa_max = field.kappa_max();
  rep.balls = enclosing_balls(s);
  rep.steiner = steiner_point(s);
  rep.steiner_magnitude = rep.steiner.norm();
  rep.stereographic_residual =
      geometry::conformal_relation_residual(field, geometry::stereographic_project(s, grid));

  auto add = [&](std::string name, double value, double limit, bool pass) {
    rep.checks.push_back({std::move(name), value, limit, pass});
  };
  add("kappa_min", rep.kappa_min, tol.kappa_low, rep.kappa_min >= tol.kappa_low);
  add("kappa_max", rep.kappa_max, tol.kappa_high, rep.kappa_max <= tol.kappa_high);
  add("balls_in_hemisphere", rep.balls.r_out, spectral::kPi / 2,
      rep.balls.r_in > 0.0 && rep.balls.r_out < spectral::kPi / 2);
  add("stereographic_residual", rep.stereographic_residual, tol.stereographic,
      rep.stereographic_residual <= tol.stereographic);

  if (field.strictly_convex()) {
    const auto sup = dual::support_test(s, tol.support_pairs, tol.seed);
    rep.support_margin = sup.max_offdiagonal;
    rep.support_diagonal = sup.max_diagonal;
    add("support_margin", sup.max_offdiagonal, 0.0, sup.max_offdiagonal < 0.0);
    add("support_diagonal", sup.max_diagonal, 1e-10, sup.max_diagonal <= 1e-10);
  } else {
    add("strict_convexity", rep.kappa_min, 0.0, false);
  }

  if (group) {
    const auto proj = solver::invariant_projector(*group, l_max);
    rep.symmetry_leakage = proj.leakage(s.radial);
    add("symmetry_leakage", *rep.symmetry_leakage, tol.symmetry,
        *rep.symmetry_leakage <= tol.symmetry);
    add("steiner_point", rep.steiner_magnitude, tol.steiner, rep.steiner_magnitude <= tol.steiner);
  }

  if (equation) {
    Eigen::VectorXd r(grid.size());
    for (int q = 0; q < grid.size(); ++q) r[q] = field.nodes[q].r;
    const Eigen::VectorXd f = equation->f.values(grid, r);
    Eigen::VectorXd res(grid.size());
    for (int q = 0; q < grid.size(); ++q) res[q] = equation->F.value(field.nodes[q].kappa) - f[q];
    rep.residual_max = res.cwiseAbs().maxCoeff();
    rep.residual_rms = std::sqrt(res.squaredNorm() / double(res.size()));
    add("equation_residual", *rep.residual_max, tol.residual, *rep.residual_max <= tol.residual);
  }
  return rep;
}

}  // namespace minkowski::validation
