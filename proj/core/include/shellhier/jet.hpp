#pragma once

#include <array>
#include <cmath>

#include "shellhier/types.hpp"

namespace shellhier {

/// Second-order jet of a scalar function of the chart coordinates (u, v):
/// value, gradient and Hessian, propagated exactly through arithmetic.
struct Jet {
  double val = 0.0;
  double du = 0.0, dv = 0.0;
  double duu = 0.0, duv = 0.0, dvv = 0.0;

  Jet() = default;
  Jet(double c) : val(c) {}  // NOLINT(google-explicit-constructor)
  Jet(double v, double gu, double gv, double huu, double huv, double hvv)
      : val(v), du(gu), dv(gv), duu(huu), duv(huv), dvv(hvv) {}

  static Jet var_u(double u) { return {u, 1.0, 0.0, 0.0, 0.0, 0.0}; }
  static Jet var_v(double v) { return {v, 0.0, 1.0, 0.0, 0.0, 0.0}; }

  Jet& operator+=(const Jet& o) { return *this = *this + o; }
  Jet& operator-=(const Jet& o) { return *this = *this - o; }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }

  friend Jet operator+(const Jet& a, const Jet& b) {
    return {a.val + b.val, a.du + b.du, a.dv + b.dv, a.duu + b.duu, a.duv + b.duv, a.dvv + b.dvv};
  }
  friend Jet operator-(const Jet& a, const Jet& b) {
    return {a.val - b.val, a.du - b.du, a.dv - b.dv, a.duu - b.duu, a.duv - b.duv, a.dvv - b.dvv};
  }
  friend Jet operator-(const Jet& a) { return {-a.val, -a.du, -a.dv, -a.duu, -a.duv, -a.dvv}; }
  friend Jet operator*(const Jet& a, const Jet& b) {
    return {a.val * b.val,
            a.du * b.val + a.val * b.du,
            a.dv * b.val + a.val * b.dv,
            a.duu * b.val + 2.0 * a.du * b.du + a.val * b.duu,
            a.duv * b.val + a.du * b.dv + a.dv * b.du + a.val * b.duv,
            a.dvv * b.val + 2.0 * a.dv * b.dv + a.val * b.dvv};
  }
  friend Jet operator/(const Jet& a, const Jet& b);
};

/// Applies a scalar function given its value and first two derivatives at a.val.
inline Jet chain(const Jet& a, double f, double df, double d2f) {
  return {f,
          df * a.du,
          df * a.dv,
          d2f * a.du * a.du + df * a.duu,
          d2f * a.du * a.dv + df * a.duv,
          d2f * a.dv * a.dv + df * a.dvv};
}

inline Jet reciprocal(const Jet& a) {
  const double r = 1.0 / a.val;
  return chain(a, r, -r * r, 2.0 * r * r * r);
}

inline Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

inline Jet sin(const Jet& a) { return chain(a, std::sin(a.val), std::cos(a.val), -std::sin(a.val)); }
inline Jet cos(const Jet& a) { return chain(a, std::cos(a.val), -std::sin(a.val), -std::cos(a.val)); }
inline Jet tan(const Jet& a) {
  const double t = std::tan(a.val);
  const double s2 = 1.0 + t * t;
  return chain(a, t, s2, 2.0 * t * s2);
}
inline Jet exp(const Jet& a) {
  const double e = std::exp(a.val);
  return chain(a, e, e, e);
}
inline Jet log(const Jet& a) { return chain(a, std::log(a.val), 1.0 / a.val, -1.0 / (a.val * a.val)); }
inline Jet sqrt(const Jet& a) {
  const double s = std::sqrt(a.val);
  return chain(a, s, 0.5 / s, -0.25 / (s * a.val));
}
inline Jet sinh(const Jet& a) { return chain(a, std::sinh(a.val), std::cosh(a.val), std::sinh(a.val)); }
inline Jet cosh(const Jet& a) { return chain(a, std::cosh(a.val), std::sinh(a.val), std::cosh(a.val)); }
inline Jet atan(const Jet& a) {
  const double d = 1.0 / (1.0 + a.val * a.val);
  return chain(a, std::atan(a.val), d, -2.0 * a.val * d * d);
}

/// a^p for a constant exponent; integer exponents are safe at a = 0.
inline Jet pow(const Jet& a, double p) {
  if (p == 0.0) return Jet(1.0);
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  const double f = std::pow(a.val, p);
  const double df = p * std::pow(a.val, p - 1.0);
  const double d2f = p * (p - 1.0) * std::pow(a.val, p - 2.0);
  return chain(a, f, df, d2f);
}

inline Jet pow(const Jet& a, const Jet& b) {
  if (b.du == 0.0 && b.dv == 0.0 && b.duu == 0.0 && b.duv == 0.0 && b.dvv == 0.0) return pow(a, b.val);
  return exp(b * log(a));
}

/// Second-order jet of a vector-valued function of (u, v).
struct VecJet {
  Vec3 val = Vec3::Zero();
  Vec3 du = Vec3::Zero(), dv = Vec3::Zero();
  Vec3 duu = Vec3::Zero(), duv = Vec3::Zero(), dvv = Vec3::Zero();

  Vec3 d(int i) const { return i == 0 ? du : dv; }
  Vec3 dd(int i, int j) const {
    if (i != j) return duv;
    return i == 0 ? duu : dvv;
  }

  friend VecJet operator+(const VecJet& a, const VecJet& b) {
    return {a.val + b.val, a.du + b.du, a.dv + b.dv, a.duu + b.duu, a.duv + b.duv, a.dvv + b.dvv};
  }
  friend VecJet operator-(const VecJet& a, const VecJet& b) {
    return {a.val - b.val, a.du - b.du, a.dv - b.dv, a.duu - b.duu, a.duv - b.duv, a.dvv - b.dvv};
  }
  friend VecJet operator*(double s, const VecJet& a) {
    return {s * a.val, s * a.du, s * a.dv, s * a.duu, s * a.duv, s * a.dvv};
  }
};

inline VecJet pack(const std::array<Jet, 3>& c) {
  VecJet out;
  for (int k = 0; k < 3; ++k) {
    out.val[k] = c[k].val;
    out.du[k] = c[k].du;
    out.dv[k] = c[k].dv;
    out.duu[k] = c[k].duu;
    out.duv[k] = c[k].duv;
    out.dvv[k] = c[k].dvv;
  }
  return out;
}

inline std::array<Jet, 3> unpack(const VecJet& j) {
  std::array<Jet, 3> out;
  for (int k = 0; k < 3; ++k) out[k] = Jet(j.val[k], j.du[k], j.dv[k], j.duu[k], j.duv[k], j.dvv[k]);
  return out;
}

/// Value and gradient of a vector function of (u, v).
struct VecJet1 {
  Vec3 val = Vec3::Zero();
  Vec3 du = Vec3::Zero(), dv = Vec3::Zero();

  VecJet1() = default;
  VecJet1(const Vec3& v, const Vec3& gu, const Vec3& gv) : val(v), du(gu), dv(gv) {}
  explicit VecJet1(const VecJet& j) : val(j.val), du(j.du), dv(j.dv) {}

  Vec3 d(int i) const { return i == 0 ? du : dv; }
};

}  // namespace shellhier
