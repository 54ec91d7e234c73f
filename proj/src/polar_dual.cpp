#include "minkowski/polar_dual.hpp"

#include "minkowski/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace minkowski::dual {

double DualSamples::max_orthogonality_error() const {
  double worst = 0.0;
  for (std::size_t q = 0; q < size(); ++q) worst = std::max(worst, std::abs(x[q].dot(x_dual[q])));
  return worst;
}

double DualSamples::max_reciprocity_error() const {
  double worst = 0.0;
  for (std::size_t q = 0; q < size(); ++q) {
    worst = std::max(worst, std::abs(kappa_dual[q][0] * kappa[q][1] - 1.0));
    worst = std::max(worst, std::abs(kappa_dual[q][1] * kappa[q][0] - 1.0));
  }
  return worst;
}

DualSamples gauss_map(const CurvatureField& field, const Eigen::Vector4d& source_pole) {
  if (!(field.kappa_min() > 0.0))
    throw ConvexityError("gauss_map: source surface is not strictly convex");
  const Eigen::Vector4d pole = -source_pole.normalized();
  const geometry::Frame frame = geometry::equatorial_frame(pole);

  DualSamples out;
  out.pole = pole;
  out.source_points = field.points;
  const std::size_t n = field.nodes.size();
  out.x.reserve(n);
  for (const auto& node : field.nodes) {
    const Eigen::Vector4d xd = node.normal.normalized();
    out.x.push_back(node.x);
    out.x_dual.push_back(xd);
    out.r_star.push_back(std::acos(std::clamp(xd.dot(pole), -1.0, 1.0)));
    out.eta.push_back(spectral::to_spherical(frame.project(xd)));
    out.kappa.push_back(node.kappa);

    // g~ = h g^{-1} h, h~ = h
    const Eigen::Matrix2d gd = node.h * node.g.inverse() * node.h;
    const Eigen::Matrix2d gds = 0.5 * (gd + gd.transpose());
    Eigen::Vector2d kd;
    Eigen::Matrix2d vd;
    geometry::principal_curvatures(gds, node.h, kd, vd);
    out.kappa_dual.push_back(kd);
    out.g_dual.push_back(gds);
    out.h_dual.push_back(node.h);
  }
  return out;
}

DualSamples gauss_map(const CurvatureField& field, const GraphSurface& source) {
  return gauss_map(field, source.pole);
}

DualGraphFit dual_as_graph(const DualSamples& samples, int l_max, double gauge_tau0) {
  const int m = spectral::coeff_count(l_max);
  const auto rows = static_cast<Eigen::Index>(samples.size());
  if (rows < m) throw ResolutionError("dual_as_graph: fewer samples than coefficients");

  const Eigen::MatrixXd a = spectral::basis_values(l_max, samples.eta);
  const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(samples.r_star.data(), rows);

  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  DualGraphFit fit;
  fit.condition = s[0] / s[s.size() - 1];
  if (!(fit.condition <= 1e8))
    throw ResolutionError("dual_as_graph: ill-conditioned fit, raise the grid density");

  Eigen::VectorXd ub = svd.matrixU().transpose() * b;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] < 1e-12 * s[0]) {
      ub[i] = 0.0;
      ++fit.truncated;
    } else {
      ub[i] /= s[i];
    }
  }
  fit.surface.n = 2;
  fit.surface.pole = samples.pole;
  fit.surface.gauge_tau0 = gauge_tau0;
  fit.surface.radial.l_max = l_max;
  fit.surface.radial.values = svd.matrixV() * ub;

  const Eigen::VectorXd fitted = a * fit.surface.radial.values;
  geometry::check_hemisphere(fitted, "dual_as_graph");
  const Eigen::VectorXd res = fitted - b;
  fit.residual_max = res.cwiseAbs().maxCoeff();
  fit.residual_rms = std::sqrt(res.squaredNorm() / double(rows));
  return fit;
}

DualGraphFit dual_as_graph(const DualSamples& samples, int l_max) {
  return dual_as_graph(samples, l_max, geometry::default_gauge_tau0());
}

SupportReport support_test(const GraphSurface& surface, int sample_count, std::uint64_t seed) {
  const spectral::QuadratureGrid grid(surface.radial.l_max);
  const auto field = geometry::curvature_field(surface, grid);
  const auto dual = gauss_map(field, surface);

  SupportReport rep;
  for (std::size_t q = 0; q < dual.size(); ++q)
    rep.max_diagonal = std::max(rep.max_diagonal, std::abs(dual.x[q].dot(dual.x_dual[q])));

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, dual.size() - 1);
  while (rep.pairs < sample_count) {
    const std::size_t a = pick(rng), b = pick(rng);
    if (a == b) continue;
    rep.max_offdiagonal = std::max(rep.max_offdiagonal, dual.x[a].dot(dual.x_dual[b]));
    ++rep.pairs;
  }
  return rep;
}

TransferredProblem transfer_problem(const curvature::CurvatureFunction& F,
                                    const Eigen::VectorXd& f_values) {
  for (Eigen::Index i = 0; i < f_values.size(); ++i) {
    if (!(f_values[i] > 0.0) || !std::isfinite(f_values[i]))
      throw DomainError("transfer_problem: f must be positive");
  }
  return {F.inverse(), f_values.cwiseInverse()};
}

namespace {

struct NormalJets {
  geometry::CurvatureField field;
  std::vector<Eigen::Vector4d> d_theta, d_phi;
};

NormalJets normal_jets(const GraphSurface& surface, const spectral::QuadratureGrid& grid) {
  NormalJets out{geometry::curvature_field(surface, grid), {}, {}};
  const int nq = grid.size();
  out.d_theta.assign(nq, Eigen::Vector4d::Zero());
  out.d_phi.assign(nq, Eigen::Vector4d::Zero());
  for (int c = 0; c < 4; ++c) {
    Eigen::VectorXd comp(nq);
    for (int q = 0; q < nq; ++q) comp[q] = out.field.nodes[q].normal[c];
    const auto jet = grid.synthesize_jet(grid.analyze(comp));
    for (int q = 0; q < nq; ++q) {
      out.d_theta[q][c] = jet.d_theta[q];
      out.d_phi[q][c] = jet.d_phi[q];
    }
  }
  return out;
}

}  // namespace

DoubleDual double_dual(const GraphSurface& surface, const spectral::QuadratureGrid& grid) {
  const auto nj = normal_jets(surface, grid);
  if (!(nj.field.kappa_min() > 0.0))
    throw ConvexityError("double_dual: source surface is not strictly convex");
  const Eigen::Vector4d pole = -surface.pole.normalized();
  DoubleDual out;
  for (int q = 0; q < grid.size(); ++q) {
    const Eigen::Vector4d xd = nj.field.nodes[q].normal;
    Eigen::Vector4d n = geometry::cross4(xd, nj.d_theta[q], nj.d_phi[q]).normalized();
    // outward from the dual pole, as for any graph
    const Eigen::Vector4d away = pole.dot(xd) * xd - pole;
    if (n.dot(away) < 0.0) n = -n;
    out.max_distance = std::max(out.max_distance, (n - nj.field.nodes[q].x).norm());
    out.x.push_back(n);
  }
  return out;
}

double dual_second_fundamental_form_error(const GraphSurface& surface,
                                          const spectral::QuadratureGrid& grid) {
  const auto nj = normal_jets(surface, grid);
  double worst = 0.0;
  for (int q = 0; q < grid.size(); ++q) {
    const auto& node = nj.field.nodes[q];
    const Eigen::Vector4d& nt = nj.d_theta[q];
    const Eigen::Vector4d& np = nj.d_phi[q];
    Eigen::Matrix2d h;
    h << nt.dot(node.x_t), nt.dot(node.x_p), np.dot(node.x_t), np.dot(node.x_p);
    worst = std::max(worst, (h - node.h).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace minkowski::dual
