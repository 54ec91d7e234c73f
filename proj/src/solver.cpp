#include "minkowski/solver.hpp"

#include "minkowski/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace minkowski::solver {

namespace {

std::string format_vector(const Eigen::VectorXd& v) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ")";
  return os.str();
}

bool near(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
  return (a - b).cwiseAbs().maxCoeff() <= 1e-10;
}

int find_element(const std::vector<Eigen::Matrix3d>& els, const Eigen::Matrix3d& m) {
  for (std::size_t i = 0; i < els.size(); ++i)
    if (near(els[i], m)) return static_cast<int>(i);
  return -1;
}

double infinity_norm(const Eigen::VectorXd& v) {
  return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
}

}  // namespace

SymmetryGroup::SymmetryGroup(std::string name, std::vector<Eigen::Matrix3d> elements)
    : name_(std::move(name)), elements_(std::move(elements)) {
  if (elements_.empty()) throw DomainError("symmetry group '" + name_ + "' has no elements");
  const Eigen::Matrix3d id = Eigen::Matrix3d::Identity();
  if (find_element(elements_, id) < 0)
    throw DomainError("symmetry group '" + name_ + "' does not contain the identity");
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    const auto& a = elements_[i];
    if (!near(a.transpose() * a, id))
      throw DomainError("symmetry group '" + name_ + "': element " + std::to_string(i) +
                        " is not orthogonal");
    if (find_element(elements_, a.transpose()) < 0)
      throw DomainError("symmetry group '" + name_ + "': inverse of element " +
                        std::to_string(i) + " missing");
    for (std::size_t j = 0; j < elements_.size(); ++j) {
      if (find_element(elements_, a * elements_[j]) < 0)
        throw DomainError("symmetry group '" + name_ + "': not closed, element " +
                          std::to_string(i) + " * element " + std::to_string(j));
    }
    if (near(a, id)) continue;
    // smallest singular value of A - id
    const Eigen::Matrix3d m = (a - id).transpose() * (a - id);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m);
    if (std::sqrt(std::max(0.0, es.eigenvalues()[0])) <= 1e-10) {
      throw DomainError("symmetry group '" + name_ + "': element " + std::to_string(i) +
                        " fixes the direction " + format_vector(es.eigenvectors().col(0)));
    }
  }
}

SymmetryGroup SymmetryGroup::antipodal() {
  return SymmetryGroup("antipodal", {Eigen::Matrix3d::Identity(), -Eigen::Matrix3d::Identity()});
}

SymmetryGroup SymmetryGroup::trivial() {
  return SymmetryGroup("trivial", {Eigen::Matrix3d::Identity()});
}

HarmonicCoeffs InvariantProjector::apply(const HarmonicCoeffs& u) const {
  const HarmonicCoeffs v = u.resized(l_max);
  return {l_max, P * v.values};
}

double InvariantProjector::leakage(const HarmonicCoeffs& u) const {
  const HarmonicCoeffs v = u.resized(l_max);
  return (v.values - Q * (Q.transpose() * v.values)).norm();
}

namespace {

void finish_projector(InvariantProjector& proj) {
  const Eigen::Index nc = proj.P.rows();
  const Eigen::VectorXd d = proj.P.diagonal();
  Eigen::MatrixXd off = proj.P;
  off.diagonal().setZero();
  bool coordinate = off.cwiseAbs().maxCoeff() <= 1e-12;
  for (Eigen::Index i = 0; coordinate && i < nc; ++i)
    coordinate = std::abs(d[i]) <= 1e-12 || std::abs(d[i] - 1.0) <= 1e-12;
  proj.coordinate = coordinate;
  if (coordinate) {
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < nc; ++i)
      if (d[i] > 0.5) keep.push_back(i);
    proj.Q = Eigen::MatrixXd::Zero(nc, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) {
      proj.Q(keep[k], static_cast<Eigen::Index>(k)) = 1.0;
      proj.P(keep[k], keep[k]) = 1.0;
    }
    for (Eigen::Index i = 0; i < nc; ++i)
      if (d[i] <= 0.5) proj.P(i, i) = 0.0;
    return;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (proj.P + proj.P.transpose()));
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < nc; ++i)
    if (es.eigenvalues()[i] > 0.5) keep.push_back(i);
  proj.Q.resize(nc, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k)
    proj.Q.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(keep[k]);
}

}  // namespace

InvariantProjector invariant_projector(const SymmetryGroup& group, int l_max) {
  const QuadratureGrid grid(l_max);
  const int nc = spectral::coeff_count(l_max);
  const auto pts = grid.points();
  // analysis as a matrix: coefficients = B^T W values
  const Eigen::MatrixXd bw = grid.basis_matrix().transpose() * grid.weights().asDiagonal();

  InvariantProjector proj;
  proj.l_max = l_max;
  proj.P = Eigen::MatrixXd::Zero(nc, nc);
  for (const auto& a : group.elements()) {
    std::vector<SphericalPoint> moved(pts.size());
    for (std::size_t q = 0; q < pts.size(); ++q) {
      const auto w = spectral::direction_jet(pts[q].theta, pts[q].phi).w;
      moved[q] = spectral::to_spherical(a * w);
    }
    // (u o A) sampled on the grid, re-analyzed
    proj.P += bw * spectral::basis_values(l_max, moved);
  }
  proj.P /= double(group.order());
  finish_projector(proj);
  return proj;
}

InvariantProjector full_space(int l_max) {
  const int nc = spectral::coeff_count(l_max);
  InvariantProjector proj;
  proj.l_max = l_max;
  proj.P = Eigen::MatrixXd::Identity(nc, nc);
  proj.Q = Eigen::MatrixXd::Identity(nc, nc);
  proj.coordinate = true;
  return proj;
}

double PrescribedData::a(double r) const {
  double v = 0.0;
  for (std::size_t k = a_poly.size(); k-- > 0;) v = v * r + a_poly[k];
  return v;
}

double PrescribedData::da(double r) const {
  double v = 0.0;
  for (std::size_t k = a_poly.size(); k-- > 1;) v = v * r + double(k) * a_poly[k];
  return v;
}

Eigen::VectorXd PrescribedData::angular(const QuadratureGrid& grid) const {
  if (b.values.size() == 0) return Eigen::VectorXd::Ones(grid.size());
  const auto pts = grid.points();
  return spectral::evaluate(b, pts).array().exp();
}

Eigen::VectorXd PrescribedData::values(const QuadratureGrid& grid, const Eigen::VectorXd& r) const {
  Eigen::VectorXd out = angular(grid);
  for (Eigen::Index q = 0; q < out.size(); ++q) out[q] *= std::exp(a(r[q]));
  return out;
}

double PrescribedData::infimum(const QuadratureGrid& grid) const {
  double amin = std::numeric_limits<double>::infinity();
  const int samples = 4000;
  for (int i = 0; i <= samples; ++i) amin = std::min(amin, a(0.5 * spectral::kPi * i / samples));
  return std::exp(amin) * angular(grid).minCoeff();
}

PrescribedData constant_data(double value, int l_max) {
  if (!(value > 0.0)) throw DomainError("constant_data: f must be positive");
  PrescribedData d;
  d.a_poly = {std::log(value)};
  d.b = HarmonicCoeffs::zeros(l_max);
  return d;
}

double default_homotopy_constant(const PrescribedData& data, const QuadratureGrid& grid) {
  return 0.9 * data.infimum(grid);
}

void validate_data(const PrescribedData& data, const InvariantProjector& proj,
                   const QuadratureGrid& grid) {
  if (data.a_poly.empty()) throw DomainError("prescribed data: a(r) has no coefficients");
  if (data.b.values.size() && data.b.l_max > proj.l_max)
    throw DomainError("prescribed data: b exceeds the band limit");
  if (data.b.values.size() && proj.leakage(data.b) > 1e-12)
    throw DomainError("prescribed data: b is not invariant under the symmetry group");
  if (!(data.c > 0.0)) throw DomainError("homotopy constant c must be positive");
  const double inf = data.infimum(grid);
  if (!(data.c < inf)) {
    std::ostringstream os;
    os.precision(17);
    os << "homotopy constant c = " << data.c << " must be below inf f = " << inf;
    throw DomainError(os.str());
  }
}

GraphSurface initial_sphere(const CurvatureFunction& F, double c, int l_max,
                            const Eigen::Vector4d& pole) {
  if (!(c > 0.0)) throw DomainError("initial_sphere: c must be positive");
  // F = F(1,...,1) cot r on geodesic spheres
  const double f1 = F.value(Eigen::VectorXd::Ones(F.n()));
  return GraphSurface::sphere(std::atan(f1 / c), l_max, pole);
}

ResidualModel::ResidualModel(CurvatureFunction F, PrescribedData data, int l_max,
                             InvariantProjector proj, Eigen::Vector4d pole, double gauge_tau0)
    : F_(std::move(F)), data_(std::move(data)), grid_(l_max), proj_(std::move(proj)) {
  if (proj_.l_max != l_max) throw DomainError("ResidualModel: projector band limit mismatch");
  base_ = GraphSurface::sphere(1.0, l_max, pole);
  base_.gauge_tau0 = gauge_tau0;
  frame_ = base_.frame();
  angular_ = data_.angular(grid_);
  points_ = grid_.points();
  const auto b = spectral::evaluate_basis(l_max, points_);
  const auto& q = proj_.Q;
  basis_q_ = {b.value * q,         b.d_theta * q,     b.d_phi * q,
              b.d_theta_theta * q, b.d_theta_phi * q, b.d_phi_phi * q};
  analyze_q_ = (grid_.weights().asDiagonal() * basis_q_[0]).transpose();
}

Eigen::VectorXd ResidualModel::reduce(const HarmonicCoeffs& u) const {
  return proj_.Q.transpose() * u.resized(grid_.l_max()).values;
}

HarmonicCoeffs ResidualModel::expand(const Eigen::VectorXd& y) const {
  return {grid_.l_max(), proj_.Q * y};
}

GraphSurface ResidualModel::surface(const Eigen::VectorXd& y) const {
  GraphSurface s = base_;
  s.radial = expand(y);
  return s;
}

double ResidualModel::node_lambda(const geometry::RadialJetAt& jet, int q, double t) const {
  const auto node = geometry::node_geometry(frame_, jet, points_[q]);
  const double f = std::exp(data_.a(jet.r)) * angular_[q];
  return F_.value(node.kappa) - (t * f + (1.0 - t) * data_.c);
}

ResidualModel::Evaluation ResidualModel::evaluate(const Eigen::VectorXd& y, double t) const {
  Evaluation ev;
  std::array<Eigen::VectorXd, 6> jet;
  for (int k = 0; k < 6; ++k) jet[k] = basis_q_[k] * y;
  geometry::check_hemisphere(jet[0], "solver iterate");
  const int nq = grid_.size();
  ev.r = jet[0];
  ev.lambda.resize(nq);
  ev.kappa_min = std::numeric_limits<double>::infinity();
  ev.kappa_max = -ev.kappa_min;
  for (int q = 0; q < nq; ++q) {
    const geometry::RadialJetAt rj{jet[0][q], jet[1][q], jet[2][q],
                                   jet[3][q], jet[4][q], jet[5][q]};
    const auto node = geometry::node_geometry(frame_, rj, points_[q]);
    ev.kappa_min = std::min(ev.kappa_min, node.kappa[0]);
    ev.kappa_max = std::max(ev.kappa_max, node.kappa[1]);
    const double f = std::exp(data_.a(rj.r)) * angular_[q];
    ev.lambda[q] = F_.value(node.kappa) - (t * f + (1.0 - t) * data_.c);
  }
  ev.convex = ev.kappa_min > 0.0;
  ev.reduced = analyze_q_ * ev.lambda;
  return ev;
}

Eigen::MatrixXd ResidualModel::jacobian(const Eigen::VectorXd& y, double t, JacobianMode mode,
                                        double step) const {
  const int nq = grid_.size();
  if (mode == JacobianMode::Columns) {
    Eigen::MatrixXd jac(dim(), dim());
    for (int j = 0; j < dim(); ++j) {
      Eigen::VectorXd yp = y, ym = y;
      yp[j] += step;
      ym[j] -= step;
      jac.col(j) = (evaluate(yp, t).reduced - evaluate(ym, t).reduced) / (2.0 * step);
    }
    return jac;
  }

  std::array<Eigen::VectorXd, 6> jet;
  for (int k = 0; k < 6; ++k) jet[k] = basis_q_[k] * y;
  geometry::check_hemisphere(jet[0], "solver iterate");
  // dLambda_q / d(jet_k) by central differences at each node
  Eigen::MatrixXd d(nq, 6);
  for (int q = 0; q < nq; ++q) {
    std::array<double, 6> v{jet[0][q], jet[1][q], jet[2][q], jet[3][q], jet[4][q], jet[5][q]};
    for (int k = 0; k < 6; ++k) {
      auto at = [&](double delta) {
        auto w = v;
        w[k] += delta;
        return node_lambda({w[0], w[1], w[2], w[3], w[4], w[5]}, q, t);
      };
      d(q, k) = (at(step) - at(-step)) / (2.0 * step);
    }
  }
  Eigen::MatrixXd chained = d.col(0).asDiagonal() * basis_q_[0];
  for (int k = 1; k < 6; ++k) chained.noalias() += d.col(k).asDiagonal() * basis_q_[k];
  return analyze_q_ * chained;
}

NewtonResult newton_solve(const ResidualModel& model, double t, const Eigen::VectorXd& y0,
                          const SolverOptions& opts) {
  auto admissible = [&](const ResidualModel::Evaluation& ev) {
    return ev.convex && ev.kappa_min >= opts.kappa_floor && ev.kappa_max <= opts.kappa_ceil &&
           ev.lambda.allFinite();
  };

  Eigen::VectorXd y = y0;
  auto ev = model.evaluate(y, t);
  if (!admissible(ev))
    throw ConvexityError("newton_solve: start is not strictly convex within the curvature bounds");

  NewtonResult out;
  for (int it = 0;; ++it) {
    const double res = infinity_norm(ev.lambda);
    if (res <= opts.tol) {
      out.y = y;
      out.surface = model.surface(y);
      out.iterations = it;
      out.residual = res;
      out.kappa_min = ev.kappa_min;
      out.kappa_max = ev.kappa_max;
      return out;
    }
    if (it >= opts.max_newton) {
      std::ostringstream os;
      os << "newton_solve: no convergence in " << opts.max_newton << " iterations, residual "
         << res;
      throw ConvergenceError(os.str());
    }

    const Eigen::MatrixXd jac = model.jacobian(y, t, opts.jacobian, opts.fd_step);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
    if (!(lu.rcond() > 1e-10))
      throw KernelError("newton_solve: Jacobian singular on the working subspace (rcond " +
                        std::to_string(lu.rcond()) + ")");
    const Eigen::VectorXd dy = -lu.solve(ev.reduced);

    const double merit = ev.reduced.norm();
    double alpha = 1.0;
    bool accepted = false;
    bool convexity_blocked = false;
    for (int h = 0; h <= opts.max_halvings; ++h, alpha *= 0.5) {
      const Eigen::VectorXd y1 = y + alpha * dy;
      ResidualModel::Evaluation ev1;
      try {
        ev1 = model.evaluate(y1, t);
      } catch (const DomainError&) {
        convexity_blocked = true;
        continue;
      }
      if (!admissible(ev1)) {
        convexity_blocked = true;
        continue;
      }
      if (ev1.reduced.norm() < merit || infinity_norm(ev1.lambda) <= opts.tol) {
        y = y1;
        ev = std::move(ev1);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      std::ostringstream os;
      os << "newton_solve: line search failed after " << opts.max_halvings
         << " halvings, residual " << res;
      if (convexity_blocked) throw ConvexityError(os.str() + " (convexity lost)");
      throw ConvergenceError(os.str());
    }
  }
}

KernelReport kernel_report(const ResidualModel& model, const Eigen::MatrixXd& jacobian) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(jacobian, Eigen::ComputeThinV);
  const Eigen::VectorXd s = svd.singularValues();  // descending
  KernelReport rep;
  const Eigen::Index n = s.size();
  rep.singular_values = s.reverse();
  const double cut = 1e-6 * s[0];
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < n; ++i)
    if (s[i] <= cut) idx.push_back(i);
  rep.near_kernel_dim = static_cast<int>(idx.size());
  rep.kernel_coeffs.resize(model.projector().Q.rows(), rep.near_kernel_dim);
  for (std::size_t k = 0; k < idx.size(); ++k)
    rep.kernel_coeffs.col(static_cast<Eigen::Index>(k)) =
        model.projector().Q * svd.matrixV().col(idx[k]);
  return rep;
}

ContinuationReport continuation(const CurvatureFunction& F, const PrescribedData& data,
                                const SymmetryGroup& group, int l_max,
                                const SolverOptions& opts) {
  ContinuationReport rep;
  InvariantProjector proj = invariant_projector(group, l_max);
  ResidualModel model(F, data, l_max, proj);
  validate_data(data, model.projector(), model.grid());

  {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(std::log(1e-3), std::log(1e3));
    std::vector<Eigen::VectorXd> samples;
    for (int i = 0; i < 1000; ++i) {
      Eigen::VectorXd k(F.n());
      for (int j = 0; j < F.n(); ++j) k[j] = std::exp(u(rng));
      samples.push_back(k);
    }
    const auto ck = curvature::class_K_check(F, samples);
    if (!ck.monotone || !ck.gradient_ordering)
      rep.warnings.push_back("curvature function " + F.name() +
                             " fails the class K monotonicity/gradient-ordering check");
  }

  auto record = [&](double t, double dt, const NewtonResult* res, const std::string& note) {
    ContinuationStep st;
    st.t = t;
    st.dt = dt;
    st.note = note;
    if (res) {
      st.accepted = true;
      st.iterations = res->iterations;
      st.residual = res->residual;
      st.kappa_min = res->kappa_min;
      st.kappa_max = res->kappa_max;
      const Eigen::VectorXd r = model.grid().synthesize(res->surface.radial);
      st.r_min = r.minCoeff();
      st.r_max = r.maxCoeff();
    }
    rep.steps.push_back(st);
  };

  SolverOptions step_opts = opts;
  step_opts.tol = std::max(opts.tol, 1e-8);

  Eigen::VectorXd y = model.reduce(initial_sphere(F, data.c, l_max).radial);
  NewtonResult current;
  try {
    current = newton_solve(model, 0.0, y, opts);
  } catch (const std::runtime_error& e) {
    rep.status = std::string("failed at t = 0: ") + e.what();
    rep.surface = model.surface(y);
    return rep;
  }
  record(0.0, 0.0, &current, "initial sphere");
  y = current.y;

  Eigen::VectorXd y_prev = y;
  double t = 0.0, dt = opts.dt0, dt_prev = 0.0;
  while (t < 1.0) {
    const double t_try = std::min(1.0, t + dt);
    const bool last = t_try >= 1.0;
    // secant predictor along the accepted path
    Eigen::VectorXd start = y;
    if (dt_prev > 0.0) {
      const Eigen::VectorXd guess = y + (y - y_prev) * ((t_try - t) / dt_prev);
      try {
        const auto ev = model.evaluate(guess, t_try);
        if (ev.convex && ev.kappa_min >= opts.kappa_floor) start = guess;
      } catch (const DomainError&) {
      }
    }
    try {
      NewtonResult res = newton_solve(model, t_try, start, last ? opts : step_opts);
      record(t_try, t_try - t, &res, "");
      y_prev = y;
      dt_prev = t_try - t;
      y = res.y;
      t = t_try;
      current = std::move(res);
      if (current.iterations <= 3) dt = std::min(dt * 1.5, opts.dt_max);
    } catch (const std::runtime_error& e) {
      record(t_try, t_try - t, nullptr, e.what());
      dt *= 0.5;
      if (dt < opts.dt_min) {
        rep.status = std::string("step size underflow: ") + e.what();
        break;
      }
    }
  }

  rep.t_reached = t;
  rep.surface = model.surface(y);
  rep.residual = current.residual;
  rep.leakage = model.projector().leakage(rep.surface.radial);
  rep.success = t >= 1.0;
  if (rep.success) rep.status = "converged";
  return rep;
}

BarrierReport check_barriers(const CurvatureFunction& F, const PrescribedData& data,
                             const GraphSurface& lower, const GraphSurface& upper, double tol) {
  if (!lower.pole.isApprox(upper.pole, 1e-12))
    throw DomainError("check_barriers: barriers must be graphs about the same pole");
  const int l_max = std::max({lower.radial.l_max, upper.radial.l_max, 4});
  const QuadratureGrid grid(l_max);
  GraphSurface lo = lower, up = upper;
  lo.radial = lower.radial.resized(l_max);
  up.radial = upper.radial.resized(l_max);
  const auto fl = geometry::curvature_field(lo, grid);
  const auto fu = geometry::curvature_field(up, grid);
  if (!fl.strictly_convex() || !fu.strictly_convex())
    throw ConvexityError("check_barriers: barriers must be strictly convex");

  const int nq = grid.size();
  Eigen::VectorXd rl(nq), ru(nq);
  for (int q = 0; q < nq; ++q) {
    rl[q] = fl.nodes[q].r;
    ru[q] = fu.nodes[q].r;
    if (ru[q] > rl[q] + 1e-12) {
      std::ostringstream os;
      os << "check_barriers: not nested, upper barrier leaves the lower one at node " << q
         << " (r_upper = " << ru[q] << ", r_lower = " << rl[q] << ")";
      throw DomainError(os.str());
    }
  }
  const Eigen::VectorXd f_lo = data.values(grid, rl), f_up = data.values(grid, ru);

  BarrierReport rep;
  rep.lower_margin = rep.upper_margin = std::numeric_limits<double>::infinity();
  for (int q = 0; q < nq; ++q) {
    const double ml = f_lo[q] - F.value(fl.nodes[q].kappa);
    const double mu = F.value(fu.nodes[q].kappa) - f_up[q];
    if (ml < rep.lower_margin) {
      rep.lower_margin = ml;
      rep.lower_worst_node = q;
    }
    if (mu < rep.upper_margin) {
      rep.upper_margin = mu;
      rep.upper_worst_node = q;
    }
  }
  rep.lower_worst_point = grid.point(rep.lower_worst_node);
  rep.upper_worst_point = grid.point(rep.upper_worst_node);
  rep.lower_ok = rep.lower_margin >= -tol;
  rep.upper_ok = rep.upper_margin >= -tol;
  return rep;
}

}  // namespace minkowski::solver
