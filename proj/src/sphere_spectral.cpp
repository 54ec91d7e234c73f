#include "minkowski/sphere_spectral.hpp"

#include "minkowski/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace minkowski::spectral {

namespace {

constexpr int tri(int l, int m) { return l * (l + 1) / 2 + m; }

// Orthonormal associated Legendre functions at one colatitude together with
// their first and second theta-derivatives.
struct LegendreColumn {
  std::vector<double> p, dp, dpp;
};

LegendreColumn legendre_column(int l_max, double theta) {
  const int n = tri(l_max, l_max) + 1;
  LegendreColumn out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                     std::vector<double>(n, 0.0)};
  const double x = std::cos(theta);
  const double s = std::sin(theta);
  auto& p = out.p;

  p[tri(0, 0)] = 1.0 / std::sqrt(kFourPi);
  for (int m = 1; m <= l_max; ++m) {
    p[tri(m, m)] = std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * p[tri(m - 1, m - 1)];
  }
  for (int m = 0; m < l_max; ++m) {
    p[tri(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * x * p[tri(m, m)];
  }
  for (int m = 0; m <= l_max; ++m) {
    for (int l = m + 2; l <= l_max; ++l) {
      const double ll = l, mm = m;
      const double a = std::sqrt((4.0 * ll * ll - 1.0) / (ll * ll - mm * mm));
      const double b = std::sqrt(((ll - 1.0) * (ll - 1.0) - mm * mm) /
                                 (4.0 * (ll - 1.0) * (ll - 1.0) - 1.0));
      p[tri(l, m)] = a * (x * p[tri(l - 1, m)] - b * p[tri(l - 2, m)]);
    }
  }

  // Derivatives are left at zero exactly on the axis; nodes never sit there.
  if (std::abs(s) < 1e-12) return out;
  for (int l = 0; l <= l_max; ++l) {
    for (int m = 0; m <= l; ++m) {
      const double ll = l, mm = m;
      const double lower =
          (l > m) ? std::sqrt((2.0 * ll + 1.0) * (ll - mm) * (ll + mm) / (2.0 * ll - 1.0)) *
                        p[tri(l - 1, m)]
                  : 0.0;
      const double dp = (ll * x * p[tri(l, m)] - lower) / s;
      out.dp[tri(l, m)] = dp;
      // Associated Legendre equation in theta.
      out.dpp[tri(l, m)] = -(x / s) * dp - (ll * (ll + 1.0) - mm * mm / (s * s)) * p[tri(l, m)];
    }
  }
  return out;
}

}  // namespace

HarmonicIndex index_to_lm(int k) {
  const int l = static_cast<int>(std::sqrt(static_cast<double>(k)));
  int ll = l;
  while (ll * ll > k) --ll;
  while ((ll + 1) * (ll + 1) <= k) ++ll;
  return {ll, k - ll * ll - ll};
}

HarmonicCoeffs HarmonicCoeffs::zeros(int l_max) {
  return {l_max, Eigen::VectorXd::Zero(coeff_count(l_max))};
}

HarmonicCoeffs HarmonicCoeffs::single(int l_max, int l, int m, double value) {
  auto c = zeros(l_max);
  c(l, m) = value;
  return c;
}

HarmonicCoeffs HarmonicCoeffs::resized(int new_l_max) const {
  auto out = zeros(new_l_max);
  const int n = std::min(coeff_count(new_l_max), coeff_count(l_max));
  out.values.head(n) = values.head(n);
  return out;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int k = 0; k < n; ++k) {
    double x = std::cos(kPi * (k + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      const double pn = (n == 1) ? x : p1;
      const double pn1 = (n == 1) ? 1.0 : p0;
      dp = n * (x * pn - pn1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int j = 2; j <= n; ++j) {
      const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    nodes[k] = x;
    weights[k] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

QuadratureGrid::QuadratureGrid(int l_max) : l_max_(l_max) {
  if (l_max < 4) {
    throw DomainError("build_grid: l_max must be at least 4, got " + std::to_string(l_max));
  }
  n_theta_ = l_max + 1;
  n_phi_ = 2 * l_max + 1;

  std::vector<double> x, w;
  gauss_legendre(n_theta_, x, w);
  theta_.resize(n_theta_);
  ring_weight_.resize(n_theta_);
  for (int i = 0; i < n_theta_; ++i) {
    theta_[i] = std::acos(x[i]);
    ring_weight_[i] = w[i] * 2.0 * kPi / n_phi_;
  }
  phi_.resize(n_phi_);
  for (int j = 0; j < n_phi_; ++j) phi_[j] = 2.0 * kPi * j / n_phi_;

  weights_.resize(size());
  for (int i = 0; i < n_theta_; ++i)
    for (int j = 0; j < n_phi_; ++j) weights_[node(i, j)] = ring_weight_[i];

  legendre_.resize(n_theta_);
  legendre_dt_.resize(n_theta_);
  legendre_dtt_.resize(n_theta_);
  for (int i = 0; i < n_theta_; ++i) {
    auto col = legendre_column(l_max_, theta_[i]);
    legendre_[i] = std::move(col.p);
    legendre_dt_[i] = std::move(col.dp);
    legendre_dtt_[i] = std::move(col.dpp);
  }

  cos_table_.resize(n_phi_, l_max_ + 1);
  sin_table_.resize(n_phi_, l_max_ + 1);
  for (int j = 0; j < n_phi_; ++j) {
    for (int m = 0; m <= l_max_; ++m) {
      cos_table_(j, m) = std::cos(m * phi_[j]);
      sin_table_(j, m) = std::sin(m * phi_[j]);
    }
  }
}

QuadratureGrid build_grid(int l_max) { return QuadratureGrid(l_max); }

std::vector<SphericalPoint> QuadratureGrid::points() const {
  std::vector<SphericalPoint> out(size());
  for (int q = 0; q < size(); ++q) out[q] = point(q);
  return out;
}

double QuadratureGrid::integrate(const Eigen::VectorXd& values) const {
  if (values.size() != size()) throw DomainError("integrate: grid/value size mismatch");
  double sum = 0.0;
  for (int q = 0; q < size(); ++q) sum += weights_[q] * values[q];
  return sum;
}

HarmonicCoeffs QuadratureGrid::analyze(const Eigen::VectorXd& values) const {
  if (values.size() != size()) {
    throw DomainError("analyze: expected " + std::to_string(size()) + " grid values, got " +
                      std::to_string(values.size()));
  }
  auto out = HarmonicCoeffs::zeros(l_max_);
  std::vector<double> fc(l_max_ + 1), fs(l_max_ + 1);
  const double root2 = std::sqrt(2.0);
  for (int i = 0; i < n_theta_; ++i) {
    std::fill(fc.begin(), fc.end(), 0.0);
    std::fill(fs.begin(), fs.end(), 0.0);
    for (int j = 0; j < n_phi_; ++j) {
      const double v = values[node(i, j)];
      for (int m = 0; m <= l_max_; ++m) {
        fc[m] += v * cos_table_(j, m);
        fs[m] += v * sin_table_(j, m);
      }
    }
    const auto& p = legendre_[i];
    for (int l = 0; l <= l_max_; ++l) {
      out(l, 0) += ring_weight_[i] * p[tri(l, 0)] * fc[0];
      for (int m = 1; m <= l; ++m) {
        const double pw = ring_weight_[i] * root2 * p[tri(l, m)];
        out(l, m) += pw * fc[m];
        out(l, -m) += pw * fs[m];
      }
    }
  }
  return out;
}

Eigen::VectorXd QuadratureGrid::synthesize(const HarmonicCoeffs& coeffs) const {
  if (coeffs.l_max != l_max_ || coeffs.values.size() != coeff_count(l_max_)) {
    throw DomainError("synthesize: coefficient band limit does not match grid");
  }
  Eigen::VectorXd out(size());
  std::vector<double> c(l_max_ + 1), s(l_max_ + 1);
  const double root2 = std::sqrt(2.0);
  for (int i = 0; i < n_theta_; ++i) {
    const auto& p = legendre_[i];
    for (int m = 0; m <= l_max_; ++m) {
      double cm = 0.0, sm = 0.0;
      const double norm = (m == 0) ? 1.0 : root2;
      for (int l = m; l <= l_max_; ++l) {
        const double pl = norm * p[tri(l, m)];
        cm += coeffs(l, m) * pl;
        if (m > 0) sm += coeffs(l, -m) * pl;
      }
      c[m] = cm;
      s[m] = sm;
    }
    for (int j = 0; j < n_phi_; ++j) {
      double v = c[0];
      for (int m = 1; m <= l_max_; ++m) v += c[m] * cos_table_(j, m) + s[m] * sin_table_(j, m);
      out[node(i, j)] = v;
    }
  }
  return out;
}

FieldJet QuadratureGrid::synthesize_jet(const HarmonicCoeffs& coeffs) const {
  if (coeffs.l_max != l_max_ || coeffs.values.size() != coeff_count(l_max_)) {
    throw DomainError("synthesize_jet: coefficient band limit does not match grid");
  }
  FieldJet jet;
  for (auto* v : {&jet.value, &jet.d_theta, &jet.d_phi, &jet.d_theta_theta, &jet.d_theta_phi,
                  &jet.d_phi_phi})
    v->resize(size());

  const int nm = l_max_ + 1;
  std::vector<double> c(nm), s(nm), ct(nm), st(nm), ctt(nm), stt(nm);
  const double root2 = std::sqrt(2.0);
  for (int i = 0; i < n_theta_; ++i) {
    const auto& p = legendre_[i];
    const auto& pt = legendre_dt_[i];
    const auto& ptt = legendre_dtt_[i];
    for (int m = 0; m <= l_max_; ++m) {
      double c0 = 0, c1 = 0, c2 = 0, s0 = 0, s1 = 0, s2 = 0;
      const double norm = (m == 0) ? 1.0 : root2;
      for (int l = m; l <= l_max_; ++l) {
        const int t = tri(l, m);
        const double a = coeffs(l, m);
        c0 += a * p[t];
        c1 += a * pt[t];
        c2 += a * ptt[t];
        if (m > 0) {
          const double b = coeffs(l, -m);
          s0 += b * p[t];
          s1 += b * pt[t];
          s2 += b * ptt[t];
        }
      }
      c[m] = norm * c0;
      ct[m] = norm * c1;
      ctt[m] = norm * c2;
      s[m] = norm * s0;
      st[m] = norm * s1;
      stt[m] = norm * s2;
    }
    for (int j = 0; j < n_phi_; ++j) {
      double v = c[0], vt = ct[0], vtt = ctt[0], vp = 0, vtp = 0, vpp = 0;
      for (int m = 1; m <= l_max_; ++m) {
        const double co = cos_table_(j, m), si = sin_table_(j, m);
        v += c[m] * co + s[m] * si;
        vt += ct[m] * co + st[m] * si;
        vtt += ctt[m] * co + stt[m] * si;
        vp += m * (-c[m] * si + s[m] * co);
        vtp += m * (-ct[m] * si + st[m] * co);
        vpp += -double(m * m) * (c[m] * co + s[m] * si);
      }
      const int q = node(i, j);
      jet.value[q] = v;
      jet.d_theta[q] = vt;
      jet.d_phi[q] = vp;
      jet.d_theta_theta[q] = vtt;
      jet.d_theta_phi[q] = vtp;
      jet.d_phi_phi[q] = vpp;
    }
  }
  return jet;
}

Eigen::MatrixXd QuadratureGrid::basis_matrix() const {
  const auto pts = points();
  return basis_values(l_max_, pts);
}

double real_harmonic(int l, int m, double theta, double phi) {
  const SphericalPoint pt{theta, phi};
  return basis_values(l, std::span<const SphericalPoint>(&pt, 1))(0, coeff_index(l, m));
}

BasisJet evaluate_basis(int l_max, std::span<const SphericalPoint> points) {
  const auto np = static_cast<Eigen::Index>(points.size());
  const int nc = coeff_count(l_max);
  BasisJet b;
  for (auto* mat : {&b.value, &b.d_theta, &b.d_phi, &b.d_theta_theta, &b.d_theta_phi,
                    &b.d_phi_phi})
    mat->setZero(np, nc);
  const double root2 = std::sqrt(2.0);
  for (Eigen::Index q = 0; q < np; ++q) {
    const auto col = legendre_column(l_max, points[q].theta);
    const double phi = points[q].phi;
    for (int l = 0; l <= l_max; ++l) {
      const int t0 = tri(l, 0);
      const int k0 = coeff_index(l, 0);
      b.value(q, k0) = col.p[t0];
      b.d_theta(q, k0) = col.dp[t0];
      b.d_theta_theta(q, k0) = col.dpp[t0];
      for (int m = 1; m <= l; ++m) {
        const int t = tri(l, m);
        const double co = std::cos(m * phi), si = std::sin(m * phi);
        const double p = root2 * col.p[t], pt = root2 * col.dp[t], ptt = root2 * col.dpp[t];
        const int kc = coeff_index(l, m), ks = coeff_index(l, -m);
        const double mm = m;
        b.value(q, kc) = p * co;
        b.value(q, ks) = p * si;
        b.d_theta(q, kc) = pt * co;
        b.d_theta(q, ks) = pt * si;
        b.d_theta_theta(q, kc) = ptt * co;
        b.d_theta_theta(q, ks) = ptt * si;
        b.d_phi(q, kc) = -mm * p * si;
        b.d_phi(q, ks) = mm * p * co;
        b.d_theta_phi(q, kc) = -mm * pt * si;
        b.d_theta_phi(q, ks) = mm * pt * co;
        b.d_phi_phi(q, kc) = -mm * mm * p * co;
        b.d_phi_phi(q, ks) = -mm * mm * p * si;
      }
    }
  }
  return b;
}

Eigen::MatrixXd basis_values(int l_max, std::span<const SphericalPoint> points) {
  const auto np = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(np, coeff_count(l_max));
  const double root2 = std::sqrt(2.0);
  for (Eigen::Index q = 0; q < np; ++q) {
    const auto col = legendre_column(l_max, points[q].theta);
    for (int l = 0; l <= l_max; ++l) {
      out(q, coeff_index(l, 0)) = col.p[tri(l, 0)];
      for (int m = 1; m <= l; ++m) {
        const double p = root2 * col.p[tri(l, m)];
        out(q, coeff_index(l, m)) = p * std::cos(m * points[q].phi);
        out(q, coeff_index(l, -m)) = p * std::sin(m * points[q].phi);
      }
    }
  }
  return out;
}

FieldJet evaluate_jet(const HarmonicCoeffs& coeffs, std::span<const SphericalPoint> points) {
  const auto b = evaluate_basis(coeffs.l_max, points);
  return {b.value * coeffs.values,         b.d_theta * coeffs.values,
          b.d_phi * coeffs.values,         b.d_theta_theta * coeffs.values,
          b.d_theta_phi * coeffs.values,   b.d_phi_phi * coeffs.values};
}

Eigen::VectorXd evaluate(const HarmonicCoeffs& coeffs, std::span<const SphericalPoint> points) {
  return basis_values(coeffs.l_max, points) * coeffs.values;
}

Eigen::Matrix2d covariant_hessian(const FieldJet& jet, Eigen::Index q, double theta) {
  const double s = std::sin(theta), c = std::cos(theta);
  // Christoffel symbols of the round metric: Gamma^theta_{phi phi} = -sin cos,
  // Gamma^phi_{theta phi} = cot.
  Eigen::Matrix2d h;
  h(0, 0) = jet.d_theta_theta[q];
  h(0, 1) = jet.d_theta_phi[q] - (c / s) * jet.d_phi[q];
  h(1, 0) = h(0, 1);
  h(1, 1) = jet.d_phi_phi[q] + s * c * jet.d_theta[q];
  return h;
}

std::vector<Eigen::Vector2d> surface_gradient(const QuadratureGrid& grid,
                                              const HarmonicCoeffs& coeffs) {
  const auto jet = grid.synthesize_jet(coeffs);
  std::vector<Eigen::Vector2d> out(grid.size());
  for (int q = 0; q < grid.size(); ++q) out[q] = {jet.d_theta[q], jet.d_phi[q]};
  return out;
}

std::vector<Eigen::Matrix2d> surface_hessian(const QuadratureGrid& grid,
                                             const HarmonicCoeffs& coeffs) {
  const auto jet = grid.synthesize_jet(coeffs);
  std::vector<Eigen::Matrix2d> out(grid.size());
  for (int q = 0; q < grid.size(); ++q) out[q] = covariant_hessian(jet, q, grid.point(q).theta);
  return out;
}

Eigen::VectorXd laplace_beltrami(const QuadratureGrid& grid, const HarmonicCoeffs& coeffs) {
  const auto hess = surface_hessian(grid, coeffs);
  Eigen::VectorXd out(grid.size());
  for (int q = 0; q < grid.size(); ++q) {
    const double s = std::sin(grid.point(q).theta);
    out[q] = hess[q](0, 0) + hess[q](1, 1) / (s * s);
  }
  return out;
}

DirectionJet direction_jet(double theta, double phi) {
  const double st = std::sin(theta), ct = std::cos(theta);
  const double sp = std::sin(phi), cp = std::cos(phi);
  DirectionJet d;
  d.w = {st * cp, st * sp, ct};
  d.w_t = {ct * cp, ct * sp, -st};
  d.w_p = {-st * sp, st * cp, 0.0};
  d.w_tt = -d.w;
  d.w_tp = {-ct * sp, ct * cp, 0.0};
  d.w_pp = {-st * cp, -st * sp, 0.0};
  return d;
}

SphericalPoint to_spherical(const Eigen::Vector3d& direction) {
  const Eigen::Vector3d u = direction.normalized();
  double phi = std::atan2(u.y(), u.x());
  if (phi < 0.0) phi += 2.0 * kPi;
  return {std::acos(std::clamp(u.z(), -1.0, 1.0)), phi};
}

}  // namespace minkowski::spectral
