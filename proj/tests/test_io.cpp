#include "doctest.h"

#include "minkowski/errors.hpp"
#include "minkowski/io.hpp"

#include <cmath>
#include <map>
#include <sstream>

using namespace minkowski;
using namespace minkowski::io;
using spectral::kPi;

namespace {

GraphSurface bumpy() {
  auto s = GraphSurface::sphere(kPi / 4, 8);
  s.radial(2, 0) += 0.05;
  s.radial(4, -3) -= 1.0 / 3.0;  // not exactly representable in decimal
  s.radial(4, -3) *= 0.01;
  return s;
}

int count_lines(const std::string& s) {
  return static_cast<int>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_CASE("number formatting") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(2.0) == "2");
  CHECK(std::stod(format_number(-1e-300)) == -1e-300);
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(std::stod(format_number(kPi / 7)) == kPi / 7);
}

TEST_CASE("surface JSON round trip is exact") {
  const auto s = bumpy();
  const std::string text = surface_to_json(s);
  const auto back = surface_from_json(text);
  CHECK(back.n == 2);
  CHECK(back.radial.l_max == 8);
  CHECK(back.radial.values == s.radial.values);
  CHECK(back.pole == s.pole);
  CHECK(back.gauge_tau0 == s.gauge_tau0);
  CHECK(surface_to_json(back) == text);
}

TEST_CASE("surface JSON: sparse input and errors") {
  const auto s = surface_from_json(R"({"L_max": 4, "radial": [{"l": 0, "m": 0, "value": 2.5}]})");
  CHECK(s.radial.l_max == 4);
  CHECK(s.radial(0, 0) == 2.5);
  CHECK(s.radial.values.tail(24).cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.pole == Eigen::Vector4d::UnitW());

  CHECK_THROWS_AS(surface_from_json("{\"L_max\": 4,\n \"radial\": [}"), ConfigError);
  try {
    surface_from_json("{\"L_max\": 4,\n \"radial\": [}");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_WITH_AS(surface_from_json(R"({"L_max": 4, "radial": [], "colour": 1})"),
                       doctest::Contains("unknown key 'colour'"), ConfigError);
  CHECK_THROWS_AS(surface_from_json(R"({"L_max": 2, "radial": [{"l": 3, "m": 0, "value": 1}]})"),
                  ConfigError);
  CHECK_THROWS_AS(surface_from_json(R"({"L_max": 4, "radial": [{"l": 1, "m": 2, "value": 1}]})"),
                  ConfigError);
  CHECK_THROWS_AS(surface_from_json(R"({"L_max": 4, "radial": [{"l": 1, "m": 0}]})"), ConfigError);
  CHECK_THROWS_AS(surface_from_json(R"({"L_max": 4, "radial": [], "pole": [0, 0, 0, 2]})"),
                  ConfigError);
  CHECK_THROWS_AS(surface_from_json(R"({"L_max": 4, "radial": [], "n": 3})"), ConfigError);
}

TEST_CASE("config parsing") {
  const auto cfg = config_from_json(R"({
    "F": "gauss_power", "L_max": 12,
    "f": {"a_poly": [0.6931471805599453], "b": [{"l": 2, "m": 0, "value": 0.1}]},
    "c": 1.0, "tol": 1e-9, "max_newton": 12
  })");
  CHECK(cfg.F == "gauss_power");
  CHECK(cfg.l_max == 12);
  CHECK(cfg.f.b(2, 0) == 0.1);
  CHECK(cfg.f.a_poly.size() == 1);
  CHECK(cfg.c.value() == 1.0);
  CHECK(cfg.options.tol == 1e-9);
  CHECK(cfg.options.max_newton == 12);
  CHECK(cfg.options.kappa_ceil == 1e4);
  CHECK(cfg.symmetry().order() == 2);
  CHECK(cfg.data().c == 1.0);

  SUBCASE("default c is below inf f") {
    const auto d = config_from_json(R"({"F": "mean", "f": {"a_poly": [0.0]}})");
    CHECK(d.data().c == doctest::Approx(0.9));
    CHECK(d.l_max == 24);
  }
  SUBCASE("explicit group matrices") {
    const auto d = config_from_json(R"({"F": "mean", "f": {},
      "group": {"name": "pm", "matrices": [[[1,0,0],[0,1,0],[0,0,1]], [[-1,0,0],[0,-1,0],[0,0,-1]]]}})");
    CHECK(d.symmetry().name() == "pm");
    CHECK(d.symmetry().order() == 2);
  }
  SUBCASE("schema errors") {
    CHECK_THROWS_WITH_AS(config_from_json(R"({"F": "mean", "f": {}, "tolerance": 1})"),
                         doctest::Contains("unknown key 'tolerance'"), ConfigError);
    CHECK_THROWS_WITH_AS(config_from_json(R"({"F": "mean", "f": {"a": []}})"),
                         doctest::Contains("config/f"), ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"f": {}})"), ConfigError);
    CHECK_THROWS_WITH_AS(config_from_json(R"({"F": "median", "f": {}})"),
                         doctest::Contains("config/F"), ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"F": "mean", "f": {}, "tol": -1})"), ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"F": "mean", "f": {}, "max_newton": 2.5})"), ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"F": "mean", "f": {}, "group": "octahedral"})"),
                    ConfigError);
    // a rotation by pi about an axis fixes two points
    CHECK_THROWS_WITH_AS(config_from_json(R"({"F": "mean", "f": {},
      "group": {"matrices": [[[1,0,0],[0,1,0],[0,0,1]], [[-1,0,0],[0,-1,0],[0,0,1]]]}})"),
                         doctest::Contains("fixes"), ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"F": "mean", "f": {}, "n": 3})"), ConfigError);
    CHECK_THROWS_WITH_AS(config_from_json("{\"F\": \"mean\",\n\n \"f\": {]}"),
                         doctest::Contains("line 3"), ConfigError);
  }
}

TEST_CASE("reports serialize deterministically") {
  const auto cfg = config_from_json(R"({"F": "gauss_power", "L_max": 8, "f": {"a_poly": [0.6931471805599453]}, "c": 1.0})");
  const auto a = solver::continuation(cfg.function(), cfg.data(), cfg.symmetry(), cfg.l_max, cfg.options);
  const auto b = solver::continuation(cfg.function(), cfg.data(), cfg.symmetry(), cfg.l_max, cfg.options);
  const std::string ja = continuation_report_to_json(a, cfg);
  CHECK(ja == continuation_report_to_json(b, cfg));
  CHECK(ja.find("\"success\": true") != std::string::npos);
  CHECK(ja.find("\"sphere_deviation\"") != std::string::npos);

  const auto d1 = validation::full_report(bumpy(), solver::SymmetryGroup::antipodal());
  const std::string jd = diagnostics_to_json(d1);
  CHECK(jd == diagnostics_to_json(validation::full_report(bumpy(), solver::SymmetryGroup::antipodal())));
  CHECK(jd.find("\"residual_max\": null") != std::string::npos);
  CHECK(jd.find("\"name\": \"symmetry_leakage\"") != std::string::npos);
}

TEST_CASE("CSV writers") {
  const auto s = bumpy();
  const spectral::QuadratureGrid grid(8);
  const auto field = geometry::curvature_field(s, grid);
  std::ostringstream os;
  write_curvature_csv(os, field);
  const std::string text = os.str();
  CHECK(text.rfind("theta,phi,r,kappa1,kappa2,x0,x1,x2,x3,n0,n1,n2,n3\n", 0) == 0);
  CHECK(count_lines(text) == grid.size() + 1);
  std::istringstream in(text);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(std::count(row.begin(), row.end(), ',') == 12);

  std::ostringstream ds;
  write_dual_samples_csv(ds, dual::gauss_map(field, s));
  CHECK(ds.str().rfind("theta,phi,eta_theta,eta_phi,r_star,kt1,kt2\n", 0) == 0);
  CHECK(count_lines(ds.str()) == grid.size() + 1);
}

TEST_CASE("mesh export") {
  const double r = kPi / 3;
  const auto mesh = stereographic_mesh(GraphSurface::sphere(r, 8), 8);
  const spectral::QuadratureGrid grid(8);
  CHECK(mesh.vertices.size() == std::size_t(grid.size() + 2));
  CHECK(mesh.faces.size() == std::size_t(2 * grid.n_phi() * grid.n_theta()));
  for (const auto& v : mesh.vertices) CHECK(std::abs(v.norm() - 2 * std::tan(r / 2)) <= 1e-9);

  // closed and consistently oriented: every directed edge appears once, its reverse once
  std::map<std::pair<int, int>, int> edges;
  double volume = 0.0;
  for (const auto& f : mesh.faces) {
    for (int k = 0; k < 3; ++k) edges[{f[k], f[(k + 1) % 3]}]++;
    volume += mesh.vertices[f[0]].dot(mesh.vertices[f[1]].cross(mesh.vertices[f[2]])) / 6.0;
  }
  bool manifold = true;
  for (const auto& [e, n] : edges)
    if (n != 1 || edges.count({e.second, e.first}) != 1) manifold = false;
  CHECK(manifold);
  const double R = 2 * std::tan(r / 2);
  CHECK(volume > 0.0);  // outward orientation
  CHECK(volume == doctest::Approx(4.0 / 3.0 * kPi * R * R * R).epsilon(0.05));

  std::ostringstream os;
  write_obj(os, mesh);
  CHECK(os.str().find("\nv ") != std::string::npos);
  CHECK(os.str().find("\nf ") != std::string::npos);
}
