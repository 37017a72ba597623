#include "shellhier/material.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "shellhier/errors.hpp"

namespace shellhier {

void Material::validate() const {
  if (!(mu > 0.0)) throw Error(ErrorCode::BadConfig, "material: mu must be positive");
  if (!(2.0 * mu + lambda > 0.0)) throw Error(ErrorCode::BadConfig, "material: 2 mu + lambda must be positive");
}

double energy_density(const Material& m, const Mat3& F) {
  const Mat3 E = F.transpose() * F - Mat3::Identity();
  const double tr = E.trace();
  return 0.25 * m.mu * E.squaredNorm() + 0.125 * m.lambda * tr * tr;
}

double q3(const Material& m, const Mat3& F) {
  const double tr = F.trace();
  return 2.0 * m.mu * sym(F).squaredNorm() + m.lambda * tr * tr;
}

namespace {

// Symmetric bilinear form of Q3.
double b3(const Material& m, const Mat3& A, const Mat3& B) {
  return 2.0 * m.mu * sym(A).cwiseProduct(sym(B)).sum() + m.lambda * A.trace() * B.trace();
}

Mat3 normal_basis(int k) {
  Mat3 E = Mat3::Zero();
  if (k == 2) {
    E(2, 2) = 1.0;
  } else {
    E(k, 2) = E(2, k) = 1.0;
  }
  return E;
}

}  // namespace

Mat3 q2_relaxation(const Material& m, const Mat2& F_tan) {
  Mat3 F0 = Mat3::Zero();
  F0.topLeftCorner<2, 2>() = F_tan;
  // Minimize Q3(F0 + sum s_k E_k): normal equations K s = -r.
  Mat3 K;
  Vec3 r;
  for (int a = 0; a < 3; ++a) {
    r(a) = b3(m, normal_basis(a), F0);
    for (int b = 0; b < 3; ++b) K(a, b) = b3(m, normal_basis(a), normal_basis(b));
  }
  const Vec3 s = K.ldlt().solve(-r);
  Mat3 F = F0;
  for (int a = 0; a < 3; ++a) F += s(a) * normal_basis(a);
  return F;
}

double q2(const Material& m, const Mat2& F_tan, Q2Mode mode) {
  if (mode == Q2Mode::Relaxed) return q3(m, q2_relaxation(m, F_tan));
  const double tr = F_tan.trace();
  return 2.0 * m.mu * sym(F_tan).squaredNorm() + (2.0 * m.mu * m.lambda / (2.0 * m.mu + m.lambda)) * tr * tr;
}

double dist_to_so3(const Mat3& F) {
  Eigen::JacobiSVD<Mat3> svd(F, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 D = Mat3::Identity();
  D(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  const Mat3 R = svd.matrixU() * D * svd.matrixV().transpose();
  return (F - R).norm();
}

}  // namespace shellhier
