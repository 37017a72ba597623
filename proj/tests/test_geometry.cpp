#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "shellhier/errors.hpp"
#include "support.hpp"

namespace shellhier {
namespace {

using namespace testing;
constexpr double kPi = std::numbers::pi;

TEST(Geometry, PlateIsFlat) {
  const SurfacePatch s = plate(64);
  for (int k = 0; k < s.grid().size(); ++k) {
    const auto& f = s.node_forms(k);
    EXPECT_LT((f.g - Mat2::Identity()).norm(), 1e-14);
    EXPECT_LT(f.shape.norm(), 1e-14);
    EXPECT_LT((f.n - Vec3(0, 0, 1)).norm(), 1e-14);
  }
  EXPECT_NEAR(s.area(), 1.0, 1e-14);
  EXPECT_TRUE(s.is_plate());
}

TEST(Geometry, CapHasUnitCurvatures) {
  for (CapChart chart : {CapChart::Square, CapChart::Polar}) {
    const SurfacePatch s = cap(16, chart);
    for (int k = 0; k < s.grid().size(); ++k) {
      EXPECT_NEAR(s.node_forms(k).kappa1, 1.0, 1e-10);
      EXPECT_NEAR(s.node_forms(k).kappa2, 1.0, 1e-10);
    }
  }
}

TEST(Geometry, SphereShapeOperatorIsIdentityInOrthonormalFrame) {
  const SurfacePatch s = cap(12);
  for (double u : {-0.5, 0.0, 0.3}) {
    for (double v : {-0.2, 0.4}) {
      const FundamentalForms f = frames(s, u, v);
      EXPECT_LT((f.to_orthonormal(f.second) - Mat2::Identity()).norm(), 1e-12);
    }
  }
}

TEST(Geometry, ShapeOperatorMatchesNormalDerivatives) {
  const SurfacePatch s = cap(12);
  const double u = 0.2, v = -0.3, e = 1e-6;
  const FundamentalForms f = frames(s, u, v);
  const Vec3 dn_u = (frames(s, u + e, v).n - frames(s, u - e, v).n) / (2 * e);
  const Vec3 pi_a1 = f.shape(0, 0) * f.a1 + f.shape(1, 0) * f.a2;
  EXPECT_LT((dn_u - pi_a1).norm(), 1e-8);
}

TEST(Geometry, CylinderCurvatures) {
  const SurfacePatch s = cylinder(2.0);
  for (int k = 0; k < s.grid().size(); ++k) {
    EXPECT_NEAR(s.node_forms(k).kappa1, 0.0, 1e-12);
    EXPECT_NEAR(s.node_forms(k).kappa2, 0.5, 1e-12);
  }
}

TEST(Geometry, ParabolicGraphCurvature) {
  SurfaceDescriptor d;
  d.family = GraphParams{1.0, 0.0, 0.0};
  d.orientation = -1;
  const SurfacePatch s = SurfacePatch::build(d);
  const FundamentalForms f = frames(s, 0.0, 0.0);
  EXPECT_NEAR(f.kappa1, 0.0, 1e-14);
  EXPECT_NEAR(f.kappa2, 1.0, 1e-14);
}

TEST(Geometry, GaussFrameIsOrthogonal) {
  for (const SurfacePatch& s : {cap(16), cylinder(1.5), cap(16, CapChart::Polar)}) {
    for (int k = 0; k < s.grid().size(); ++k) {
      const auto& f = s.node_forms(k);
      EXPECT_LT(std::abs(f.n.dot(f.a1)), 1e-12);
      EXPECT_LT(std::abs(f.n.dot(f.a2)), 1e-12);
      EXPECT_NEAR(f.n.norm(), 1.0, 1e-14);
      EXPECT_GT(f.g.determinant(), 0.0);
    }
  }
}

TEST(Geometry, CapArea) {
  const double theta = kPi / 3;
  const SurfacePatch s = cap(16, CapChart::Polar, theta);
  // The polar chart omits a tiny disc of angular radius inner_angle around the pole.
  const double inner = std::get<SphericalCapParams>(s.descriptor().family).inner_angle;
  EXPECT_NEAR(s.area(), 2 * kPi * (std::cos(inner) - std::cos(theta)), 1e-8);
}

TEST(Geometry, SurfaceIntegral) {
  const SurfacePatch s = plate(16);
  std::vector<double> ones(s.quadrature().size(), 1.0), zeros(s.quadrature().size(), 0.0);
  EXPECT_NEAR(surface_integral(s, ones), 1.0, 1e-14);
  EXPECT_EQ(surface_integral(s, zeros), 0.0);
  EXPECT_NEAR(integrate(s, [](const QuadPoint& q) { return q.u * q.v; }), 0.25, 1e-14);
}

TEST(Geometry, Ellipticity) {
  const EllipticityReport c = ellipticity_check(cap(12));
  EXPECT_TRUE(c.is_elliptic);
  EXPECT_NEAR(c.constant, 1.0, 1e-10);
  EXPECT_FALSE(ellipticity_check(plate(12)).is_elliptic);
  EXPECT_FALSE(ellipticity_check(cylinder(2.0, 12)).is_elliptic);
}

TEST(Geometry, FiniteDifferenceFormsConverge) {
  // Observed order of the curvature error against the closed form, on the
  // central half of the chart (the corners of the equal-angle chart are still
  // pre-asymptotic at these resolutions).
  auto error = [](int n) {
    SurfaceDescriptor d;
    d.family = SphericalCapParams{};
    d.n1 = d.n2 = n;
    d.derivative_mode = DerivativeMode::FiniteDifference;
    d.fd_order = 4;
    const SurfacePatch s = SurfacePatch::build(d);
    double e = 0.0;
    for (int i = n / 4; i <= 3 * n / 4; ++i)
      for (int j = n / 4; j <= 3 * n / 4; ++j) {
        const auto& f = s.node_forms(s.grid().index(i, j));
        e = std::max({e, std::abs(f.kappa1 - 1.0), std::abs(f.kappa2 - 1.0)});
      }
    return e;
  };
  const double e1 = error(33), e2 = error(65);
  const double order = std::log2(e1 / e2);
  EXPECT_GT(order, 3.7);
}

TEST(Geometry, TubularFactor) {
  const SurfacePatch s = cap(12);
  const FundamentalForms f = s.node_forms(0);
  EXPECT_NEAR(tubular_volume_factor(f, 0.1), 1.1 * 1.1, 1e-14);
  EXPECT_NO_THROW(check_tubular(s, 0.5));
  EXPECT_THROW(check_tubular(s, 2.5), Error);
}

TEST(Geometry, RejectsBadDescriptors) {
  SurfaceDescriptor d;
  d.n1 = 4;
  EXPECT_THROW(SurfacePatch::build(d), Error);
  d = {};
  d.fd_order = 3;
  EXPECT_THROW(SurfacePatch::build(d), Error);
  d = {};
  d.family = SphericalCapParams{1.0, 1.7};
  EXPECT_THROW(SurfacePatch::build(d), Error);
  d = {};
  d.family = RevolutionParams{1.0, 2.0};
  EXPECT_THROW(SurfacePatch::build(d), Error);
}

TEST(Geometry, OutOfDomain) {
  const SurfacePatch s = plate(8);
  try {
    frames(s, 1.5, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfDomain);
  }
}

TEST(Geometry, Determinism) {
  const SurfacePatch a = cap(16), b = cap(16);
  EXPECT_EQ(a.area(), b.area());
  EXPECT_EQ(a.total_squared_curvature(), b.total_squared_curvature());
}

}  // namespace
}  // namespace shellhier
