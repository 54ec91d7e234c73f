#include "minkowski/io.hpp"

#include "minkowski/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace minkowski::io {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;
using spectral::coeff_count;
using spectral::coeff_index;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

// nlohmann prints the shortest round-trip form; we want a fixed %.17g.
void emit(std::ostream& os, const ojson& j, int depth) {
  const std::string pad(2 * (depth + 1), ' '), end_pad(2 * depth, ' ');
  switch (j.type()) {
    case ojson::value_t::number_float: {
      const double v = j.get<double>();
      os << (std::isfinite(v) ? format_number(v) : "null");
      return;
    }
    case ojson::value_t::object: {
      if (j.empty()) { os << "{}"; return; }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad << ojson(it.key()).dump() << ": ";
        emit(os, it.value(), depth + 1);
      }
      os << "\n" << end_pad << "}";
      return;
    }
    case ojson::value_t::array: {
      if (j.empty()) { os << "[]"; return; }
      // short numeric arrays stay on one line
      const bool flat = j.size() <= 4 && std::all_of(j.begin(), j.end(), [](const ojson& e) {
                          return e.is_number();
                        });
      os << (flat ? "[" : "[\n");
      bool first = true;
      for (const auto& e : j) {
        if (!first) os << (flat ? ", " : ",\n");
        first = false;
        if (!flat) os << pad;
        emit(os, e, depth + 1);
      }
      if (!flat) os << "\n" << end_pad;
      os << "]";
      return;
    }
    default:
      os << j.dump();
  }
}

std::string dump(const ojson& j) {
  std::ostringstream os;
  emit(os, j, 0);
  os << "\n";
  return os.str();
}

ojson opt(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

json parse(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // e.what() already names line and column
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path + ": " + msg);
}

void reject_unknown(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) fail(path, "unknown key '" + it.key() + "'");
}

double get_number(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = obj.at(key);
  if (!v.is_number()) fail(path + "/" + key, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(path + "/" + key, "must be finite");
  return d;
}

int get_int(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) fail(path + "/" + key, "expected an integer");
  return v.get<int>();
}

double get_positive(const json& obj, const std::string& key, const std::string& path) {
  const double d = get_number(obj, key, path);
  if (!(d > 0.0)) fail(path + "/" + key, "must be positive");
  return d;
}

ojson coeffs_to_json(const spectral::HarmonicCoeffs& c) {
  ojson arr = ojson::array();
  for (int l = 0; l <= c.l_max; ++l)
    for (int m = -l; m <= l; ++m) {
      ojson e;
      e["l"] = l;
      e["m"] = m;
      e["value"] = c(l, m);
      arr.push_back(std::move(e));
    }
  return arr;
}

spectral::HarmonicCoeffs coeffs_from_json(const json& arr, int l_max, const std::string& path) {
  if (!arr.is_array()) fail(path, "expected an array of {l, m, value}");
  auto out = spectral::HarmonicCoeffs::zeros(l_max);
  std::set<int> seen;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string p = path + "/" + std::to_string(i);
    const auto& e = arr[i];
    reject_unknown(e, p, {"l", "m", "value"});
    for (const char* k : {"l", "m", "value"})
      if (!e.contains(k)) fail(p, std::string("missing key '") + k + "'");
    const int l = get_int(e, "l", p), m = get_int(e, "m", p);
    if (l < 0 || std::abs(m) > l) fail(p, "need l >= 0 and |m| <= l");
    if (l > l_max) fail(p, "degree " + std::to_string(l) + " exceeds L_max " + std::to_string(l_max));
    if (!seen.insert(coeff_index(l, m)).second) fail(p, "duplicate (l, m)");
    out(l, m) = get_number(e, "value", p);
  }
  return out;
}

}  // namespace

std::string surface_to_json(const GraphSurface& surface) {
  ojson j;
  j["n"] = surface.n;
  j["pole"] = {surface.pole[0], surface.pole[1], surface.pole[2], surface.pole[3]};
  j["L_max"] = surface.radial.l_max;
  j["radial"] = coeffs_to_json(surface.radial);
  j["gauge_tau0"] = surface.gauge_tau0;
  return dump(j);
}

GraphSurface surface_from_json(const std::string& text) {
  const json j = parse(text, "surface");
  const std::string root = "surface";
  reject_unknown(j, root, {"n", "pole", "L_max", "radial", "gauge_tau0"});
  for (const char* k : {"L_max", "radial"})
    if (!j.contains(k)) fail(root, std::string("missing key '") + k + "'");
  GraphSurface s;
  if (j.contains("n")) {
    s.n = get_int(j, "n", root);
    if (s.n != 2) fail(root + "/n", "only n = 2 (surfaces in S^3) is supported");
  }
  const int l_max = get_int(j, "L_max", root);
  if (l_max < 0) fail(root + "/L_max", "must be non-negative");
  s.radial = coeffs_from_json(j["radial"], l_max, root + "/radial");
  if (j.contains("pole")) {
    const auto& p = j["pole"];
    if (!p.is_array() || p.size() != 4) fail(root + "/pole", "expected 4 numbers");
    for (int i = 0; i < 4; ++i) {
      if (!p[i].is_number()) fail(root + "/pole", "expected 4 numbers");
      s.pole[i] = p[i].get<double>();
    }
    const double norm = s.pole.norm();
    if (!(std::abs(norm - 1.0) <= 1e-9)) fail(root + "/pole", "must be a unit vector");
    s.pole /= norm;
  }
  if (j.contains("gauge_tau0")) s.gauge_tau0 = get_number(j, "gauge_tau0", root);
  return s;
}

curvature::CurvatureFunction RunConfig::function() const {
  return curvature::make_curvature_function(F, n);
}

solver::SymmetryGroup RunConfig::symmetry() const {
  return group ? *group : solver::SymmetryGroup::antipodal();
}

solver::PrescribedData RunConfig::data() const {
  solver::PrescribedData d = f;
  d.c = c ? *c : solver::default_homotopy_constant(f, spectral::QuadratureGrid(std::max(l_max, 4)));
  return d;
}

RunConfig config_from_json(const std::string& text) {
  const json j = parse(text, "config");
  const std::string root = "config";
  reject_unknown(j, root,
                 {"F", "n", "L_max", "group", "f", "c", "tol", "kappa_floor", "kappa_ceil", "dt0",
                  "dt_min", "dt_max", "max_newton"});
  for (const char* k : {"F", "f"})
    if (!j.contains(k)) fail(root, std::string("missing key '") + k + "'");

  RunConfig cfg;
  if (!j["F"].is_string()) fail(root + "/F", "expected a function name");
  cfg.F = j["F"].get<std::string>();
  if (j.contains("n")) cfg.n = get_int(j, "n", root);
  if (cfg.n != 2) fail(root + "/n", "only n = 2 (surfaces in S^3) is supported");
  try {
    (void)cfg.function();
  } catch (const DomainError& e) {
    fail(root + "/F", e.what());
  }
  if (j.contains("L_max")) cfg.l_max = get_int(j, "L_max", root);
  if (cfg.l_max < 4) fail(root + "/L_max", "must be at least 4");

  if (j.contains("group")) {
    const auto& g = j["group"];
    if (g.is_string()) {
      const auto name = g.get<std::string>();
      if (name == "antipodal") cfg.group = solver::SymmetryGroup::antipodal();
      else if (name == "trivial") cfg.group = solver::SymmetryGroup::trivial();
      else fail(root + "/group", "unknown group '" + name + "'");
    } else {
      const std::string gp = root + "/group";
      reject_unknown(g, gp, {"name", "matrices"});
      if (!g.contains("matrices") || !g["matrices"].is_array())
        fail(gp, "expected {matrices: [[[...3], ...3], ...]}");
      std::vector<Eigen::Matrix3d> mats;
      for (std::size_t k = 0; k < g["matrices"].size(); ++k) {
        const auto& m = g["matrices"][k];
        const std::string mp = gp + "/matrices/" + std::to_string(k);
        if (!m.is_array() || m.size() != 3) fail(mp, "expected a 3x3 array");
        Eigen::Matrix3d A;
        for (int r = 0; r < 3; ++r) {
          if (!m[r].is_array() || m[r].size() != 3) fail(mp, "expected a 3x3 array");
          for (int c = 0; c < 3; ++c) {
            if (!m[r][c].is_number()) fail(mp, "expected numbers");
            A(r, c) = m[r][c].get<double>();
          }
        }
        mats.push_back(A);
      }
      std::string name = "custom";
      if (g.contains("name")) {
        if (!g["name"].is_string()) fail(gp + "/name", "expected a string");
        name = g["name"].get<std::string>();
      }
      try {
        cfg.group = solver::SymmetryGroup(name, std::move(mats));
      } catch (const DomainError& e) {
        fail(gp, e.what());
      }
    }
  }

  const auto& f = j["f"];
  const std::string fp = root + "/f";
  reject_unknown(f, fp, {"a_poly", "b"});
  if (f.contains("a_poly")) {
    if (!f["a_poly"].is_array()) fail(fp + "/a_poly", "expected an array of numbers");
    for (const auto& v : f["a_poly"]) {
      if (!v.is_number()) fail(fp + "/a_poly", "expected an array of numbers");
      cfg.f.a_poly.push_back(v.get<double>());
    }
  }
  cfg.f.b = f.contains("b") ? coeffs_from_json(f["b"], cfg.l_max, fp + "/b")
                            : spectral::HarmonicCoeffs::zeros(cfg.l_max);

  if (j.contains("c")) cfg.c = get_number(j, "c", root);
  auto& o = cfg.options;
  if (j.contains("tol")) o.tol = get_positive(j, "tol", root);
  if (j.contains("kappa_floor")) o.kappa_floor = get_positive(j, "kappa_floor", root);
  if (j.contains("kappa_ceil")) o.kappa_ceil = get_positive(j, "kappa_ceil", root);
  if (j.contains("dt0")) o.dt0 = get_positive(j, "dt0", root);
  if (j.contains("dt_min")) o.dt_min = get_positive(j, "dt_min", root);
  if (j.contains("dt_max")) o.dt_max = get_positive(j, "dt_max", root);
  if (j.contains("max_newton")) {
    o.max_newton = get_int(j, "max_newton", root);
    if (o.max_newton < 1) fail(root + "/max_newton", "must be at least 1");
  }
  if (!(o.kappa_floor < o.kappa_ceil)) fail(root, "need kappa_floor < kappa_ceil");
  if (!(o.dt_min <= o.dt0 && o.dt0 <= o.dt_max)) fail(root, "need dt_min <= dt0 <= dt_max");
  return cfg;
}

std::string continuation_report_to_json(const solver::ContinuationReport& rep,
                                        const RunConfig& config) {
  ojson j;
  j["status"] = rep.status;
  j["success"] = rep.success;
  j["t_reached"] = rep.t_reached;
  j["residual"] = rep.residual;
  j["leakage"] = rep.leakage;
  j["warnings"] = rep.warnings;

  const auto data = config.data();
  ojson cfg;
  cfg["F"] = config.F;
  cfg["n"] = config.n;
  cfg["L_max"] = config.l_max;
  cfg["group"] = config.symmetry().name();
  cfg["c"] = data.c;
  cfg["tol"] = config.options.tol;
  cfg["kappa_floor"] = config.options.kappa_floor;
  cfg["kappa_ceil"] = config.options.kappa_ceil;
  j["config"] = cfg;

  if (!rep.steps.empty() || rep.success) {
    const int l_max = std::max(rep.surface.radial.l_max, 4);
    const spectral::QuadratureGrid grid(l_max);
    const Eigen::VectorXd r = grid.synthesize(rep.surface.radial.resized(l_max));
    double odd = 0.0;
    for (int l = 1; l <= rep.surface.radial.l_max; l += 2)
      for (int m = -l; m <= l; ++m) odd = std::max(odd, std::abs(rep.surface.radial(l, m)));
    ojson fin;
    fin["r_min"] = r.minCoeff();
    fin["r_max"] = r.maxCoeff();
    // sup distance to the nearest constant radius
    fin["sphere_deviation"] = 0.5 * (r.maxCoeff() - r.minCoeff());
    fin["odd_coeff_max"] = odd;
    if (!rep.steps.empty()) {
      const auto it = std::find_if(rep.steps.rbegin(), rep.steps.rend(),
                                   [](const solver::ContinuationStep& s) { return s.accepted; });
      if (it != rep.steps.rend()) {
        fin["kappa_min"] = it->kappa_min;
        fin["kappa_max"] = it->kappa_max;
      }
    }
    j["final"] = fin;
  }

  ojson steps = ojson::array();
  for (const auto& s : rep.steps) {
    ojson e;
    e["t"] = s.t;
    e["dt"] = s.dt;
    e["accepted"] = s.accepted;
    e["iterations"] = s.iterations;
    e["residual"] = s.residual;
    e["kappa_min"] = s.kappa_min;
    e["kappa_max"] = s.kappa_max;
    e["r_min"] = s.r_min;
    e["r_max"] = s.r_max;
    e["note"] = s.note;
    steps.push_back(std::move(e));
  }
  j["steps"] = steps;
  return dump(j);
}

std::string diagnostics_to_json(const validation::DiagnosticsReport& rep) {
  ojson j;
  j["passed"] = rep.passed();
  j["kappa_min"] = rep.kappa_min;
  j["kappa_max"] = rep.kappa_max;
  j["balls"] = {{"r_in", rep.balls.r_in}, {"r_out", rep.balls.r_out}};
  j["steiner"] = {rep.steiner[0], rep.steiner[1], rep.steiner[2]};
  j["steiner_magnitude"] = rep.steiner_magnitude;
  j["stereographic_residual"] = rep.stereographic_residual;
  j["support_margin"] = opt(rep.support_margin);
  j["support_diagonal"] = opt(rep.support_diagonal);
  j["symmetry_leakage"] = opt(rep.symmetry_leakage);
  j["residual_max"] = opt(rep.residual_max);
  j["residual_rms"] = opt(rep.residual_rms);
  ojson checks = ojson::array();
  for (const auto& c : rep.checks) {
    ojson e;
    e["name"] = c.name;
    e["value"] = c.value;
    e["limit"] = c.limit;
    e["pass"] = c.pass;
    checks.push_back(std::move(e));
  }
  j["checks"] = checks;
  return dump(j);
}

std::string duality_to_json(const DualityCheck& c) {
  ojson j;
  j["reciprocity"] = c.reciprocity;
  j["orthogonality"] = c.orthogonality;
  j["second_form_error"] = c.second_form_error;
  j["double_dual_distance"] = c.double_dual_distance;
  j["fit_residual_max"] = c.fit_residual_max;
  j["fit_residual_rms"] = c.fit_residual_rms;
  j["fit_condition"] = c.fit_condition;
  j["dual_pole_distance"] = c.dual_pole_distance;
  j["dual_function"] = c.dual_function ? ojson(*c.dual_function) : ojson(nullptr);
  j["equation_residual"] = opt(c.equation_residual);
  return dump(j);
}

void write_curvature_csv(std::ostream& os, const geometry::CurvatureField& field) {
  os << "theta,phi,r,kappa1,kappa2,x0,x1,x2,x3,n0,n1,n2,n3\n";
  for (std::size_t q = 0; q < field.nodes.size(); ++q) {
    const auto& nd = field.nodes[q];
    os << format_number(field.points[q].theta) << ',' << format_number(field.points[q].phi) << ','
       << format_number(nd.r) << ',' << format_number(nd.kappa[0]) << ','
       << format_number(nd.kappa[1]);
    for (int i = 0; i < 4; ++i) os << ',' << format_number(nd.x[i]);
    for (int i = 0; i < 4; ++i) os << ',' << format_number(nd.normal[i]);
    os << '\n';
  }
}

void write_dual_samples_csv(std::ostream& os, const dual::DualSamples& s) {
  os << "theta,phi,eta_theta,eta_phi,r_star,kt1,kt2\n";
  for (std::size_t q = 0; q < s.size(); ++q) {
    os << format_number(s.source_points[q].theta) << ',' << format_number(s.source_points[q].phi)
       << ',' << format_number(s.eta[q].theta) << ',' << format_number(s.eta[q].phi) << ','
       << format_number(s.r_star[q]) << ',' << format_number(s.kappa_dual[q][0]) << ','
       << format_number(s.kappa_dual[q][1]) << '\n';
  }
}

Mesh stereographic_mesh(const GraphSurface& surface, int l_max) {
  const spectral::QuadratureGrid grid(std::max(l_max, 4));
  const auto coeffs = surface.radial.resized(grid.l_max());
  const Eigen::VectorXd r = grid.synthesize(coeffs);
  const std::vector<spectral::SphericalPoint> caps{{0.0, 0.0}, {spectral::kPi, 0.0}};
  const Eigen::VectorXd r_caps = spectral::evaluate(coeffs, caps);
  Eigen::VectorXd all(r.size() + 2);
  all << r, r_caps;
  geometry::check_hemisphere(all, "stereographic_mesh");

  Mesh mesh;
  for (int q = 0; q < grid.size(); ++q) {
    const auto pt = grid.point(q);
    mesh.vertices.push_back(geometry::stereographic_radius(r[q]) *
                            spectral::direction_jet(pt.theta, pt.phi).w);
  }
  const int north = grid.size(), south = grid.size() + 1;
  for (int k = 0; k < 2; ++k)
    mesh.vertices.push_back(geometry::stereographic_radius(r_caps[k]) *
                            spectral::direction_jet(caps[k].theta, caps[k].phi).w);

  // (theta, phi) is positively oriented for the outward normal
  const int nt = grid.n_theta(), np = grid.n_phi();
  for (int j = 0; j < np; ++j) {
    const int jn = (j + 1) % np;
    mesh.faces.push_back({north, grid.node(0, j), grid.node(0, jn)});
    for (int i = 0; i + 1 < nt; ++i) {
      const int a = grid.node(i, j), b = grid.node(i, jn);
      const int c = grid.node(i + 1, jn), d = grid.node(i + 1, j);
      mesh.faces.push_back({a, d, c});
      mesh.faces.push_back({a, c, b});
    }
    mesh.faces.push_back({south, grid.node(nt - 1, jn), grid.node(nt - 1, j)});
  }
  return mesh;
}

void write_obj(std::ostream& os, const Mesh& mesh) {
  os << "# stereographic image, " << mesh.vertices.size() << " vertices, " << mesh.faces.size()
     << " faces\n";
  for (const auto& v : mesh.vertices)
    os << "v " << format_number(v[0]) << ' ' << format_number(v[1]) << ' ' << format_number(v[2])
       << '\n';
  for (const auto& f : mesh.faces)
    os << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
  if (!out) throw ConfigError("write failed: " + path);
}

}  // namespace minkowski::io
