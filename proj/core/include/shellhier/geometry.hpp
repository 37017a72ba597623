#pragma once

#include <array>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "shellhier/grid.hpp"
#include "shellhier/jet.hpp"
#include "shellhier/types.hpp"

namespace shellhier {

struct PlateParams {};

/// Cylinder section in arc-length coordinates: u = radius * angle, v = axial.
struct CylinderParams {
  double radius = 1.0;
  double arc = std::numbers::pi / 2;
  double length = 1.0;
};

enum class CapChart {
  Square,  ///< equal-angle (cube-sphere) chart; corners sit on the polar angle
  Polar,   ///< (polar angle, azimuth) over [inner_angle, polar_angle] x [0, 2 pi]
};

struct SphericalCapParams {
  double radius = 1.0;
  double polar_angle = std::numbers::pi / 3;
  CapChart chart = CapChart::Square;
  double inner_angle = 1e-3;  // polar chart only; must be > 0
};

/// Graph z = (a u^2 + 2 b u v + c v^2) / 2.
struct GraphParams {
  double a = 0.0, b = 0.0, c = 0.0;
};

/// Torus section: u = longitude, v = angle around the tube.
struct RevolutionParams {
  double major_radius = 2.0;
  double minor_radius = 1.0;
};

using FamilyParams = std::variant<PlateParams, CylinderParams, SphericalCapParams, GraphParams, RevolutionParams>;

enum class DerivativeMode { Analytic, FiniteDifference };

struct SurfaceDescriptor {
  FamilyParams family = PlateParams{};
  std::optional<Domain> domain;  ///< plate, graph, revolution; derived for the others
  int n1 = 16, n2 = 16;
  DerivativeMode derivative_mode = DerivativeMode::Analytic;
  int fd_order = 4;
  int quad_order = 4;
  int orientation = 1;  ///< +1: n = a1 x a2 / |a1 x a2| ; -1 flips the normal
};

std::string family_name(const FamilyParams& family);

/// Gauss frame and fundamental forms at a point. Shape operator sign follows
/// eta . Pi tau = eta . d_tau n, so d_i n = Pi a_i.
struct FundamentalForms {
  Vec3 a1 = Vec3::Zero(), a2 = Vec3::Zero(), n = Vec3::Zero();
  std::array<Vec3, 2> dn{};
  Mat2 g = Mat2::Identity();
  Mat2 second = Mat2::Zero();  ///< covariant: second(i,j) = a_i . d_j n
  Mat2 shape = Mat2::Zero();   ///< mixed: Pi a_j = sum_i shape(i,j) a_i
  Mat2 ortho = Mat2::Identity();  ///< columns are chart coefficients of an orthonormal tangent frame
  double kappa1 = 0.0, kappa2 = 0.0;  ///< principal curvatures, kappa1 <= kappa2
  double area_element = 1.0;

  Vec3 a(int i) const { return i == 0 ? a1 : a2; }
  /// Orthonormal-frame components of a covariant 2-tensor.
  Mat2 to_orthonormal(const Mat2& covariant) const { return ortho.transpose() * covariant * ortho; }
};

FundamentalForms forms_from_jet(const VecJet& r, int orientation);

struct QuadPoint {
  double u = 0.0, v = 0.0;
  double weight = 0.0;  ///< parameter-space weight, metric factor excluded
  VecJet chart;
  FundamentalForms forms;
};

class SurfacePatch {
 public:
  /// Throws BadDescriptor for invalid parameters and DegenerateChart when the
  /// chart fails to be an immersion at some node.
  static SurfacePatch build(const SurfaceDescriptor& descriptor);

  const SurfaceDescriptor& descriptor() const { return data_->descriptor; }
  const Grid& grid() const { return data_->grid; }
  const DiffOps& ops() const { return data_->ops; }
  const std::vector<QuadPoint>& quadrature() const { return data_->quad; }

  bool is_plate() const { return std::holds_alternative<PlateParams>(data_->descriptor.family); }
  int orientation() const { return data_->descriptor.orientation; }

  const VecJet& node_chart(int node) const { return data_->node_jets[node]; }
  const FundamentalForms& node_forms(int node) const { return data_->node_forms[node]; }
  NodalVec node_positions() const;

  /// Chart jet at an arbitrary parameter point (exact in analytic mode,
  /// interpolated from nodal differences otherwise).
  VecJet chart(double u, double v) const;
  std::array<Jet, 3> chart_components(double u, double v) const { return unpack(chart(u, v)); }

  double area() const { return data_->area; }
  double max_abs_curvature() const { return data_->max_abs_kappa; }
  /// Integral of |Pi|^2 (Frobenius, orthonormal frame) over the surface.
  double total_squared_curvature() const { return data_->total_sq_curv; }

 private:
  struct Data {
    SurfaceDescriptor descriptor;
    Grid grid;
    DiffOps ops;
    std::vector<VecJet> node_jets;
    std::vector<FundamentalForms> node_forms;
    std::vector<QuadPoint> quad;
    double area = 0.0;
    double max_abs_kappa = 0.0;
    double total_sq_curv = 0.0;
  };
  std::shared_ptr<const Data> data_;
};

/// Exact chart of the family, evaluated on jets of (u, v).
std::array<Jet, 3> chart_point(const FamilyParams& family, const Jet& u, const Jet& v);
/// Parameter domain implied by the descriptor (explicit or derived).
Domain resolve_domain(const SurfaceDescriptor& descriptor);

FundamentalForms frames(const SurfacePatch& surface, double u, double v);

/// Tensor Gauss-Legendre quadrature of f * sqrt(det g); `values` holds f at the
/// quadrature points of the patch, in order.
double surface_integral(const SurfacePatch& surface, std::span<const double> values);

template <class F>
double integrate(const SurfacePatch& surface, F&& integrand) {
  CompensatedSum sum;
  for (const auto& q : surface.quadrature()) sum.add(q.weight * q.forms.area_element * integrand(q));
  return sum.value();
}

struct EllipticityReport {
  bool is_elliptic = false;
  double constant = 0.0;  ///< C with |tau|^2 / C <= Pi tau . tau <= C |tau|^2 (when elliptic)
  double min_kappa = 0.0, max_kappa = 0.0;
  int sign = 0;  ///< +1 positive definite, -1 negative definite, 0 otherwise
};

EllipticityReport ellipticity_check(const SurfacePatch& surface, double threshold = 1e-8);

/// Volume factor of the tubular coordinates, det(Id + t Pi) = (1 + t k1)(1 + t k2).
double tubular_volume_factor(const FundamentalForms& forms, double t);

/// Throws TubularViolation unless h * max|kappa| < 1 and the volume factor stays
/// positive for |t| <= h/2 on every node and quadrature point.
void check_tubular(const SurfacePatch& surface, double h);

}  // namespace shellhier
