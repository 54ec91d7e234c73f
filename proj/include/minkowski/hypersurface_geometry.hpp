#pragma once

// Radial graphs over the equator S^2 of a pole in S^3 c R^4, viewed as
// codimension-2 submanifolds of R^4: embedding, metric, second fundamental
// form, principal curvatures and the outward normal inside T_x S^3.

#include "minkowski/sphere_spectral.hpp"

#include <Eigen/Dense>

#include <array>
#include <span>
#include <vector>

namespace minkowski::geometry {

using spectral::HarmonicCoeffs;
using spectral::QuadratureGrid;
using spectral::SphericalPoint;

// Radius reference for the conformal coordinate: tau(kGaugeRadius) = 0.
constexpr double kGaugeRadius = 0.1;
// Radii closer than this to 0 or pi/2 are outside the working hemisphere.
constexpr double kHemisphereMargin = 1e-8;

double default_gauge_tau0();

// Orthonormal basis of the equatorial R^3 orthogonal to a pole. Depends only
// on the line through the pole, so a pole and its antipode share axes.
struct Frame {
  Eigen::Vector4d pole;
  std::array<Eigen::Vector4d, 3> axes;

  Eigen::Vector4d lift(const Eigen::Vector3d& equatorial) const;
  Eigen::Vector3d project(const Eigen::Vector4d& ambient) const;
};
Frame equatorial_frame(const Eigen::Vector4d& pole);

struct GraphSurface {
  int n = 2;
  Eigen::Vector4d pole = Eigen::Vector4d::UnitW();
  HarmonicCoeffs radial;  // geodesic distance from the pole
  double gauge_tau0 = default_gauge_tau0();

  static GraphSurface sphere(double radius, int l_max,
                             const Eigen::Vector4d& pole = Eigen::Vector4d::UnitW());
  Frame frame() const { return equatorial_frame(pole); }
};

struct NodeGeometry {
  double r = 0.0;
  Eigen::Vector4d x, x_t, x_p;
  Eigen::Vector4d normal;  // outward, tangent to S^3
  Eigen::Matrix2d g, h;
  Eigen::Matrix2d shape;  // h^i_j = g^{ik} h_kj
  Eigen::Vector2d kappa;  // ascending
  Eigen::Matrix2d principal;  // g-orthonormal eigenvectors as columns
};

struct CurvatureField {
  std::vector<SphericalPoint> points;
  std::vector<NodeGeometry> nodes;

  double kappa_min() const;
  double kappa_max() const;
  bool strictly_convex() const { return kappa_min() > 0.0; }
};

// Generalized symmetric 2x2 eigenproblem h v = kappa g v, closed form.
void principal_curvatures(const Eigen::Matrix2d& g, const Eigen::Matrix2d& h,
                          Eigen::Vector2d& kappa, Eigen::Matrix2d& vectors);

// Generalized cross product in R^4: the vector orthogonal to a, b, c.
Eigen::Vector4d cross4(const Eigen::Vector4d& a, const Eigen::Vector4d& b,
                       const Eigen::Vector4d& c);

struct RadialJetAt {
  double r, r_t, r_p, r_tt, r_tp, r_pp;
};
NodeGeometry node_geometry(const Frame& frame, const RadialJetAt& jet, const SphericalPoint& at);

struct Embedding {
  std::vector<Eigen::Vector4d> x, x_t, x_p;
};

// Throw DomainError when the radius leaves (0, pi/2) anywhere on the samples.
void check_hemisphere(const Eigen::VectorXd& radius, const char* where);

Embedding embed(const GraphSurface& surface, const QuadratureGrid& grid);
CurvatureField curvature_field(const GraphSurface& surface, const QuadratureGrid& grid);
CurvatureField curvature_field_at(const GraphSurface& surface,
                                  std::span<const SphericalPoint> points);
CurvatureField curvature_from_jet(const GraphSurface& surface, const spectral::FieldJet& jet,
                                  std::span<const SphericalPoint> points);

// psi(tau) = log rho - log(1 + rho^2/4), rho = exp(tau + tau0).
struct ConformalPsi {
  double psi, dpsi, ddpsi;
};
ConformalPsi conformal_psi(double tau, double tau0);
double conformal_tau(double r, double tau0);

// h_ij from the conformal graph formula in the (tau, xi) chart; used as an
// independent cross-check of the embedding path.
std::vector<Eigen::Matrix2d> conformal_second_fundamental_form(const GraphSurface& surface,
                                                               const QuadratureGrid& grid);

// Image of the surface under stereographic projection from the antipode of
// the pole, with its Euclidean fundamental forms computed from the projected
// embedding itself.
struct StereographicSamples {
  std::vector<Eigen::Vector3d> points;
  std::vector<Eigen::Vector3d> normals;
  std::vector<Eigen::Matrix2d> g, h, shape;
  Eigen::VectorXd rho;
};
double stereographic_radius(double r);
StereographicSamples stereographic_project(const GraphSurface& surface,
                                           const QuadratureGrid& grid);

// Max node error of e^psi h^j_i = hat h^j_i + psi_alpha nu^alpha delta^j_i
// with psi = -log(1 + rho^2/4).
double conformal_relation_residual(const CurvatureField& field,
                                   const StereographicSamples& projected);

}  // namespace minkowski::geometry
