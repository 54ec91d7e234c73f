#include "minkowski/hypersurface_geometry.hpp"

#include "minkowski/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace minkowski::geometry {

using spectral::kPi;

double default_gauge_tau0() { return std::log(2.0 * std::tan(kGaugeRadius / 2.0)); }

Eigen::Vector4d Frame::lift(const Eigen::Vector3d& e) const {
  return e[0] * axes[0] + e[1] * axes[1] + e[2] * axes[2];
}

Eigen::Vector3d Frame::project(const Eigen::Vector4d& y) const {
  return {y.dot(axes[0]), y.dot(axes[1]), y.dot(axes[2])};
}

Frame equatorial_frame(const Eigen::Vector4d& pole_in) {
  const double norm = pole_in.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw DomainError("equatorial_frame: zero pole");
  Frame f;
  f.pole = pole_in / norm;
  // Drop the coordinate axis most aligned with the pole, project the rest.
  int drop = 0;
  for (int k = 1; k < 4; ++k)
    if (std::abs(f.pole[k]) > std::abs(f.pole[drop])) drop = k;
  int slot = 0;
  for (int k = 0; k < 4; ++k) {
    if (k == drop) continue;
    Eigen::Vector4d v = Eigen::Vector4d::Unit(k);
    v -= v.dot(f.pole) * f.pole;
    for (int s = 0; s < slot; ++s) v -= v.dot(f.axes[s]) * f.axes[s];
    f.axes[slot++] = v.normalized();
  }
  return f;
}

GraphSurface GraphSurface::sphere(double radius, int l_max, const Eigen::Vector4d& pole) {
  GraphSurface s;
  s.pole = pole.normalized();
  s.radial = HarmonicCoeffs::zeros(l_max);
  s.radial(0, 0) = radius * std::sqrt(spectral::kFourPi);
  return s;
}

double CurvatureField::kappa_min() const {
  double v = std::numeric_limits<double>::infinity();
  for (const auto& n : nodes) v = std::min(v, n.kappa[0]);
  return v;
}

double CurvatureField::kappa_max() const {
  double v = -std::numeric_limits<double>::infinity();
  for (const auto& n : nodes) v = std::max(v, n.kappa[1]);
  return v;
}

void principal_curvatures(const Eigen::Matrix2d& g, const Eigen::Matrix2d& h,
                          Eigen::Vector2d& kappa, Eigen::Matrix2d& vectors) {
  const double l11 = std::sqrt(g(0, 0));
  const double l21 = g(0, 1) / l11;
  const double l22sq = g(1, 1) - l21 * l21;
  if (!(g(0, 0) > 0.0) || !(l22sq > 0.0)) {
    throw std::logic_error("principal_curvatures: metric is not positive definite");
  }
  const double l22 = std::sqrt(l22sq);
  Eigen::Matrix2d linv;
  linv << 1.0 / l11, 0.0, -l21 / (l11 * l22), 1.0 / l22;
  const Eigen::Matrix2d m = linv * h * linv.transpose();
  const double a = m(0, 0), b = 0.5 * (m(0, 1) + m(1, 0)), c = m(1, 1);
  const double mean = 0.5 * (a + c);
  const double rad = std::hypot(0.5 * (a - c), b);
  kappa = {mean - rad, mean + rad};
  const double angle = 0.5 * std::atan2(2.0 * b, a - c);
  Eigen::Matrix2d u;
  u << -std::sin(angle), std::cos(angle), std::cos(angle), std::sin(angle);
  vectors = linv.transpose() * u;
}

Eigen::Vector4d cross4(const Eigen::Vector4d& a, const Eigen::Vector4d& b,
                       const Eigen::Vector4d& c) {
  Eigen::Matrix<double, 3, 4> m;
  m.row(0) = a.transpose();
  m.row(1) = b.transpose();
  m.row(2) = c.transpose();
  Eigen::Vector4d out;
  for (int k = 0; k < 4; ++k) {
    Eigen::Matrix3d minor;
    int col = 0;
    for (int j = 0; j < 4; ++j) {
      if (j == k) continue;
      minor.col(col++) = m.col(j);
    }
    out[k] = ((k % 2 == 0) ? 1.0 : -1.0) * minor.determinant();
  }
  return out;
}

NodeGeometry node_geometry(const Frame& frame, const RadialJetAt& j, const SphericalPoint& at) {
  const auto d = spectral::direction_jet(at.theta, at.phi);
  const Eigen::Vector4d w = frame.lift(d.w), w_t = frame.lift(d.w_t), w_p = frame.lift(d.w_p);
  const Eigen::Vector4d w_tt = frame.lift(d.w_tt), w_tp = frame.lift(d.w_tp),
                        w_pp = frame.lift(d.w_pp);
  const Eigen::Vector4d& p = frame.pole;
  const double s = std::sin(j.r), c = std::cos(j.r);

  NodeGeometry n;
  n.r = j.r;
  n.x = s * w + c * p;
  n.x_t = c * j.r_t * w + s * w_t - s * j.r_t * p;
  n.x_p = c * j.r_p * w + s * w_p - s * j.r_p * p;

  // Partial second derivatives of x = sin r w + cos r p.
  auto second = [&](double ri, double rj, double rij, const Eigen::Vector4d& wi,
                    const Eigen::Vector4d& wj, const Eigen::Vector4d& wij) -> Eigen::Vector4d {
    return (-s * ri * rj + c * rij) * w + c * ri * wj + c * rj * wi + s * wij -
           (c * ri * rj + s * rij) * p;
  };
  const Eigen::Vector4d x_tt = second(j.r_t, j.r_t, j.r_tt, w_t, w_t, w_tt);
  const Eigen::Vector4d x_tp = second(j.r_t, j.r_p, j.r_tp, w_t, w_p, w_tp);
  const Eigen::Vector4d x_pp = second(j.r_p, j.r_p, j.r_pp, w_p, w_p, w_pp);

  n.normal = cross4(n.x, n.x_t, n.x_p).normalized();
  const Eigen::Vector4d radial = c * w - s * p;
  if (n.normal.dot(radial) < 0.0) n.normal = -n.normal;

  n.g << n.x_t.dot(n.x_t), n.x_t.dot(n.x_p), n.x_p.dot(n.x_t), n.x_p.dot(n.x_p);
  // x_ij = -g_ij x - h_ij n; the Christoffel part of the covariant derivative
  // is tangent and drops out against n.
  n.h << -x_tt.dot(n.normal), -x_tp.dot(n.normal), -x_tp.dot(n.normal), -x_pp.dot(n.normal);
  n.shape = n.g.inverse() * n.h;
  principal_curvatures(n.g, n.h, n.kappa, n.principal);
  return n;
}

void check_hemisphere(const Eigen::VectorXd& radius, const char* where) {
  for (Eigen::Index q = 0; q < radius.size(); ++q) {
    const double r = radius[q];
    if (!(r > kHemisphereMargin && r < kPi / 2.0 - kHemisphereMargin)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << where << ": radius " << r << " at sample " << q
          << " is outside the open hemisphere (0, pi/2)";
      throw DomainError(msg.str());
    }
  }
}

Embedding embed(const GraphSurface& surface, const QuadratureGrid& grid) {
  const auto field = curvature_field(surface, grid);
  Embedding e;
  for (const auto& n : field.nodes) {
    e.x.push_back(n.x);
    e.x_t.push_back(n.x_t);
    e.x_p.push_back(n.x_p);
  }
  return e;
}

CurvatureField curvature_from_jet(const GraphSurface& surface, const spectral::FieldJet& jet,
                                  std::span<const SphericalPoint> points) {
  check_hemisphere(jet.value, "curvature_field");
  const Frame frame = surface.frame();
  CurvatureField field;
  field.points.assign(points.begin(), points.end());
  field.nodes.reserve(points.size());
  for (std::size_t q = 0; q < points.size(); ++q) {
    const RadialJetAt rj{jet.value[q],         jet.d_theta[q],     jet.d_phi[q],
                         jet.d_theta_theta[q], jet.d_theta_phi[q], jet.d_phi_phi[q]};
    field.nodes.push_back(node_geometry(frame, rj, points[q]));
  }
  return field;
}

CurvatureField curvature_field(const GraphSurface& surface, const QuadratureGrid& grid) {
  if (surface.radial.l_max != grid.l_max()) {
    throw DomainError("curvature_field: surface band limit does not match grid");
  }
  const auto jet = grid.synthesize_jet(surface.radial);
  const auto pts = grid.points();
  return curvature_from_jet(surface, jet, pts);
}

CurvatureField curvature_field_at(const GraphSurface& surface,
                                  std::span<const SphericalPoint> points) {
  const auto jet = spectral::evaluate_jet(surface.radial, points);
  return curvature_from_jet(surface, jet, points);
}

ConformalPsi conformal_psi(double tau, double tau0) {
  // With s = rho^2 / 4: psi' = (1 - s)/(1 + s), psi'' = -4 s / (1 + s)^2.
  const double log_rho = tau + tau0;
  const double s = 0.25 * std::exp(2.0 * log_rho);
  return {log_rho - std::log1p(s), (1.0 - s) / (1.0 + s), -4.0 * s / ((1.0 + s) * (1.0 + s))};
}

double conformal_tau(double r, double tau0) { return std::log(2.0 * std::tan(0.5 * r)) - tau0; }

std::vector<Eigen::Matrix2d> conformal_second_fundamental_form(const GraphSurface& surface,
                                                               const QuadratureGrid& grid) {
  const auto jet = grid.synthesize_jet(surface.radial);
  check_hemisphere(jet.value, "conformal_second_fundamental_form");
  std::vector<Eigen::Matrix2d> out(grid.size());
  for (int q = 0; q < grid.size(); ++q) {
    const double theta = grid.point(q).theta;
    const double st = std::sin(theta);
    const double r = jet.value[q];
    const double sr = std::sin(r), cr = std::cos(r);
    // u = tau(r): du/dr = 1/sin r, d2u/dr2 = -cos r / sin^2 r.
    const Eigen::Vector2d dr(jet.d_theta[q], jet.d_phi[q]);
    const Eigen::Vector2d du = dr / sr;
    const Eigen::Matrix2d hess_r = spectral::covariant_hessian(jet, q, theta);
    const Eigen::Matrix2d hess_u = hess_r / sr - (cr / (sr * sr)) * dr * dr.transpose();
    Eigen::Matrix2d sigma;
    sigma << 1.0, 0.0, 0.0, st * st;
    const double v = std::sqrt(1.0 + du[0] * du[0] + du[1] * du[1] / (st * st));
    const Eigen::Matrix2d g_tilde = du * du.transpose() + sigma;
    const auto psi = conformal_psi(conformal_tau(r, surface.gauge_tau0), surface.gauge_tau0);
    out[q] = std::exp(psi.psi) * (-hess_u / v + psi.dpsi * g_tilde / v);
  }
  return out;
}

double stereographic_radius(double r) { return 2.0 * std::tan(0.5 * r); }

StereographicSamples stereographic_project(const GraphSurface& surface,
                                           const QuadratureGrid& grid) {
  const auto jet = grid.synthesize_jet(surface.radial);
  check_hemisphere(jet.value, "stereographic_project");
  StereographicSamples out;
  out.rho.resize(grid.size());
  for (int q = 0; q < grid.size(); ++q) {
    const auto pt = grid.point(q);
    const auto d = spectral::direction_jet(pt.theta, pt.phi);
    const double rho = stereographic_radius(jet.value[q]);
    const double drho = 1.0 + 0.25 * rho * rho;
    const double ddrho = 0.5 * rho * drho;
    const double rt = jet.d_theta[q], rp = jet.d_phi[q];
    const double rho_t = drho * rt, rho_p = drho * rp;
    const double rho_tt = ddrho * rt * rt + drho * jet.d_theta_theta[q];
    const double rho_tp = ddrho * rt * rp + drho * jet.d_theta_phi[q];
    const double rho_pp = ddrho * rp * rp + drho * jet.d_phi_phi[q];

    const Eigen::Vector3d X = rho * d.w;
    const Eigen::Vector3d X_t = rho_t * d.w + rho * d.w_t;
    const Eigen::Vector3d X_p = rho_p * d.w + rho * d.w_p;
    const Eigen::Vector3d X_tt = rho_tt * d.w + 2.0 * rho_t * d.w_t + rho * d.w_tt;
    const Eigen::Vector3d X_tp = rho_tp * d.w + rho_t * d.w_p + rho_p * d.w_t + rho * d.w_tp;
    const Eigen::Vector3d X_pp = rho_pp * d.w + 2.0 * rho_p * d.w_p + rho * d.w_pp;

    Eigen::Vector3d N = X_t.cross(X_p).normalized();
    if (N.dot(X) < 0.0) N = -N;
    Eigen::Matrix2d g, h;
    g << X_t.dot(X_t), X_t.dot(X_p), X_p.dot(X_t), X_p.dot(X_p);
    h << -X_tt.dot(N), -X_tp.dot(N), -X_tp.dot(N), -X_pp.dot(N);

    out.points.push_back(X);
    out.normals.push_back(N);
    out.g.push_back(g);
    out.h.push_back(h);
    out.shape.push_back(g.inverse() * h);
    out.rho[q] = rho;
  }
  return out;
}

double conformal_relation_residual(const CurvatureField& field,
                                   const StereographicSamples& projected) {
  double worst = 0.0;
  for (std::size_t q = 0; q < field.nodes.size(); ++q) {
    const double rho = projected.rho[q];
    const double conf = 1.0 + 0.25 * rho * rho;
    const double e_psi = 1.0 / conf;
    const double psi_normal = -0.5 * projected.points[q].dot(projected.normals[q]) / conf;
    const Eigen::Matrix2d lhs = e_psi * field.nodes[q].shape;
    const Eigen::Matrix2d rhs = projected.shape[q] + psi_normal * Eigen::Matrix2d::Identity();
    worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace minkowski::geometry
