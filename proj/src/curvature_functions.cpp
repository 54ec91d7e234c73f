#include "minkowski/curvature_functions.hpp"

#include "minkowski/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace minkowski::curvature {

namespace {

double binomial(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

// sigma_k of x with the entries listed in skip removed.
double sigma_without(const Eigen::VectorXd& x, int k, int skip_a, int skip_b = -1) {
  if (k < 0) return 0.0;
  std::vector<double> e(k + 1, 0.0);
  e[0] = 1.0;
  for (int i = 0; i < x.size(); ++i) {
    if (i == skip_a || i == skip_b) continue;
    for (int j = k; j >= 1; --j) e[j] += x[i] * e[j - 1];
  }
  return e[k];
}

bool strip_call(std::string_view name, std::string_view head, std::string_view& inner) {
  if (name.size() <= head.size() + 2) return false;
  if (name.substr(0, head.size()) != head) return false;
  if (name[head.size()] != '(' || name.back() != ')') return false;
  inner = name.substr(head.size() + 1, name.size() - head.size() - 2);
  return true;
}

}  // namespace

double elementary_symmetric(const Eigen::VectorXd& x, int k) {
  return sigma_without(x, k, -1);
}

double CurvatureFunction::base_value(const Eigen::VectorXd& k) const {
  switch (family_) {
    case Family::Mean:
      return k.sum();
    case Family::SigmaK: {
      double s = elementary_symmetric(k, k_) / binomial(n_, k_);
      return n_ * std::pow(s, 1.0 / k_);
    }
    case Family::NormA:
      return std::sqrt(double(n_)) * k.norm();
  }
  return 0.0;
}

Eigen::VectorXd CurvatureFunction::base_gradient(const Eigen::VectorXd& k) const {
  Eigen::VectorXd g(n_);
  switch (family_) {
    case Family::Mean:
      g.setOnes();
      break;
    case Family::SigmaK: {
      double c = std::pow(binomial(n_, k_), -1.0 / k_);
      double sk = elementary_symmetric(k, k_);
      double pre = n_ * c / k_ * std::pow(sk, 1.0 / k_ - 1.0);
      for (int i = 0; i < n_; ++i) g[i] = pre * sigma_without(k, k_ - 1, i);
      break;
    }
    case Family::NormA:
      g = std::sqrt(double(n_)) * k / k.norm();
      break;
  }
  return g;
}

Eigen::MatrixXd CurvatureFunction::base_hessian(const Eigen::VectorXd& k) const {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n_, n_);
  switch (family_) {
    case Family::Mean:
      break;
    case Family::SigmaK: {
      double c = std::pow(binomial(n_, k_), -1.0 / k_);
      double sk = elementary_symmetric(k, k_);
      double a = 1.0 / k_;
      Eigen::VectorXd d(n_);
      for (int i = 0; i < n_; ++i) d[i] = sigma_without(k, k_ - 1, i);
      for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
          double dd = i == j ? 0.0 : sigma_without(k, k_ - 2, i, j);
          h(i, j) = n_ * c *
                    (a * (a - 1.0) * std::pow(sk, a - 2.0) * d[i] * d[j] +
                     a * std::pow(sk, a - 1.0) * dd);
        }
      }
      break;
    }
    case Family::NormA: {
      double nk = k.norm();
      h = std::sqrt(double(n_)) *
          (Eigen::MatrixXd::Identity(n_, n_) / nk - k * k.transpose() / (nk * nk * nk));
      break;
    }
  }
  return h;
}

double CurvatureFunction::value(const Eigen::VectorXd& kappa) const {
  if (kappa.size() != n_) throw DomainError("curvature function: wrong number of curvatures");
  if (!reciprocal_) return scale_ * base_value(kappa);
  return scale_ / base_value(kappa.cwiseInverse());
}

Eigen::VectorXd CurvatureFunction::gradient(const Eigen::VectorXd& kappa) const {
  if (kappa.size() != n_) throw DomainError("curvature function: wrong number of curvatures");
  if (!reciprocal_) return scale_ * base_gradient(kappa);
  Eigen::VectorXd mu = kappa.cwiseInverse();
  double b = base_value(mu);
  Eigen::VectorXd bg = base_gradient(mu);
  return scale_ * bg.cwiseProduct(mu.cwiseAbs2()) / (b * b);
}

Eigen::MatrixXd CurvatureFunction::hessian(const Eigen::VectorXd& kappa) const {
  if (kappa.size() != n_) throw DomainError("curvature function: wrong number of curvatures");
  if (!reciprocal_) return scale_ * base_hessian(kappa);
  Eigen::VectorXd mu = kappa.cwiseInverse();
  double b = base_value(mu);
  Eigen::VectorXd bg = base_gradient(mu);
  Eigen::MatrixXd bh = base_hessian(mu);
  Eigen::MatrixXd out(n_, n_);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      double mi2 = mu[i] * mu[i], mj2 = mu[j] * mu[j];
      double v = -bh(i, j) * mi2 * mj2 / (b * b) + 2.0 * bg[i] * bg[j] * mi2 * mj2 / (b * b * b);
      if (i == j) v -= 2.0 * bg[i] * mi2 * mu[i] / (b * b);
      out(i, j) = scale_ * v;
    }
  }
  return out;
}

CurvatureFunction CurvatureFunction::inverse() const {
  CurvatureFunction out = *this;
  out.reciprocal_ = !reciprocal_;
  out.scale_ = 1.0 / scale_;
  std::string_view inner;
  if (strip_call(name_, "dual", inner))
    out.name_ = std::string(inner);
  else
    out.name_ = "dual(" + name_ + ")";
  return out;
}

CurvatureFunction make_curvature_function(std::string_view name, int n) {
  if (n < 1) throw DomainError("curvature function: n must be positive");
  std::string_view inner;
  if (strip_call(name, "dual", inner)) return make_curvature_function(inner, n).inverse();
  if (strip_call(name, "inverse_of", inner)) {
    CurvatureFunction f = make_curvature_function(inner, n).inverse();
    f.scale_ *= double(n) * n;
    f.name_ = std::string(name);
    return f;
  }

  CurvatureFunction f;
  f.n_ = n;
  f.name_ = std::string(name);
  f.base_name_ = f.name_;
  if (name == "mean") {
    f.family_ = Family::Mean;
  } else if (name == "gauss_power") {
    f.family_ = Family::SigmaK;
    f.k_ = n;
  } else if (name == "norm_A") {
    f.family_ = Family::NormA;
  } else if (name.substr(0, 6) == "sigma_") {
    auto digits = name.substr(6);
    int k = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty())
      throw DomainError("unknown curvature function: " + std::string(name));
    if (k < 1 || k > n)
      throw DomainError("sigma_k requires 1 <= k <= n, got " + std::string(name));
    f.family_ = Family::SigmaK;
    f.k_ = k;
  } else {
    throw DomainError("unknown curvature function: " + std::string(name));
  }
  return f;
}

ShapeOperatorEvaluation apply_to_shape_operator(const CurvatureFunction& f,
                                                const Eigen::MatrixXd& shape,
                                                const Eigen::MatrixXd& g) {
  const int n = f.n();
  if (shape.rows() != n || shape.cols() != n || g.rows() != n || g.cols() != n)
    throw DomainError("apply_to_shape_operator: dimension mismatch");
  Eigen::MatrixXd h = g * shape;
  h = 0.5 * (h + h.transpose()).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(h, g);
  if (es.info() != Eigen::Success) throw DomainError("apply_to_shape_operator: metric not positive");

  ShapeOperatorEvaluation out;
  out.kappa = es.eigenvalues();
  out.eigenvectors = es.eigenvectors();
  if (!(out.kappa.minCoeff() > 0.0))
    throw ConvexityError("principal curvatures outside the positive cone");
  out.value = f.value(out.kappa);
  Eigen::VectorXd dk = f.gradient(out.kappa);
  out.dF_dh = out.eigenvectors * dk.asDiagonal() * out.eigenvectors.transpose();
  return out;
}

double second_variation(const CurvatureFunction& f, const ShapeOperatorEvaluation& at,
                        const Eigen::MatrixXd& eta) {
  const int n = f.n();
  Eigen::MatrixXd e = at.eigenvectors.transpose() * eta * at.eigenvectors;
  Eigen::VectorXd dk = f.gradient(at.kappa);
  Eigen::MatrixXd hk = f.hessian(at.kappa);
  double total = 0.0;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) total += hk(k, l) * e(k, k) * e(l, l);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      if (k == l) continue;
      double gap = at.kappa[k] - at.kappa[l];
      double q = std::abs(gap) < 1e-9 ? hk(k, k) - hk(k, l) : (dk[k] - dk[l]) / gap;
      total += q * e(k, l) * e(k, l);
    }
  }
  return total;
}

ClassKReport class_K_check(const CurvatureFunction& f,
                           const std::vector<Eigen::VectorXd>& samples) {
  ClassKReport rep;
  const int n = f.n();
  for (const auto& kappa : samples) {
    if (kappa.size() != n || !(kappa.minCoeff() > 0.0))
      throw DomainError("class_K_check: samples must lie in the positive cone");
    ++rep.samples;
    double val = f.value(kappa);
    Eigen::VectorXd grad = f.gradient(kappa);
    rep.min_gradient = std::min(rep.min_gradient, grad.minCoeff());
    if (!(grad.minCoeff() > 0.0)) rep.monotone = false;

    double tol = 1e-12 * std::max(1.0, std::abs(val));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (kappa[j] > kappa[i]) continue;
        double excess = grad[i] * kappa[i] - grad[j] * kappa[j];
        rep.worst_ordering_excess = std::max(rep.worst_ordering_excess, excess);
        if (excess > tol) rep.gradient_ordering = false;
      }
    }

    int imin = 0;
    kappa.minCoeff(&imin);
    Eigen::VectorXd lo = kappa, mid = kappa;
    lo[imin] = 1e-9;
    mid[imin] = 1e-3;
    double f_lo = f.value(lo), f_mid = f.value(mid);
    if (!(f_lo < f_mid && f_lo <= 1e-2 * f_mid)) rep.boundary_vanish = false;

    Eigen::MatrixXd hess = f.hessian(kappa);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (hess + hess.transpose()),
                                                     Eigen::EigenvaluesOnly);
    double top = es.eigenvalues().maxCoeff();
    rep.max_hessian_eigenvalue = std::max(rep.max_hessian_eigenvalue, top);
    if (top > 1e-10 * std::max(1.0, hess.norm())) rep.concave_if_deg1 = false;
  }
  return rep;
}

}  // namespace minkowski::curvature
