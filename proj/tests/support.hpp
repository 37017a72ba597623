#pragma once

#include <string>

#include "shellhier/experiments.hpp"
#include "shellhier/functionals.hpp"
#include "shellhier/kinematics.hpp"

namespace shellhier::testing {

inline SurfacePatch plate(int n = 16) {
  SurfaceDescriptor d;
  d.n1 = d.n2 = n;
  return SurfacePatch::build(d);
}

inline SurfacePatch cap(int n = 16, CapChart chart = CapChart::Square, double polar_angle = 1.0471975511965976) {
  SurfaceDescriptor d;
  SphericalCapParams p;
  p.chart = chart;
  p.polar_angle = polar_angle;
  d.family = p;
  d.n1 = d.n2 = n;
  return SurfacePatch::build(d);
}

inline SurfacePatch cylinder(double radius, int n = 16) {
  SurfaceDescriptor d;
  CylinderParams p;
  p.radius = radius;
  d.family = p;
  d.n1 = d.n2 = n;
  return SurfacePatch::build(d);
}

inline VectorField field(const SurfacePatch& s, const std::string& x, const std::string& y, const std::string& z) {
  return VectorField::analytic(s, {Expression::parse(x), Expression::parse(y), Expression::parse(z)});
}

/// Plate rolled isometrically onto a cylinder of radius R.
inline VectorField rolled_plate(const SurfacePatch& s, double R) {
  const std::string r = std::to_string(R);
  return field(s, r + "*sin(u/" + r + ")", "v", r + "*(1-cos(u/" + r + "))");
}

inline double max_abs(const TensorNodes& t) {
  double m = 0.0;
  for (const auto& x : t) m = std::max(m, x.cwiseAbs().maxCoeff());
  return m;
}

}  // namespace shellhier::testing
