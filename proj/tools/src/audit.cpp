#include "audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace shellhier::cli {

namespace {

Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::Quaterniond q(normal(rng), normal(rng), normal(rng), normal(rng));
  q.normalize();
  return q.toRotationMatrix();
}

Mat3 random_matrix(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> normal;
  Mat3 A;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) A(i, j) = scale * normal(rng);
  return A;
}

// Central second difference of s -> W(I + s G) at s = 0.
double hessian_fd(const Material& m, const Mat3& G) {
  const double s = 1e-4;
  const Mat3 I = Mat3::Identity();
  auto W = [&](double t) { return energy_density(m, I + t * G); };
  return (W(s) - 2 * W(0) + W(-s)) / (s * s);
}

// Random matrix with Frobenius norm uniform in [0, radius].
Mat3 random_ball(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Mat3 P = random_matrix(rng, 1.0);
  return P * (radius * unit(rng) / P.norm());
}

}  // namespace

MaterialAudit audit_material(const Material& m, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  MaterialAudit a;
  a.samples = samples;
  a.nondegeneracy = std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    const Mat3 R = random_rotation(rng);
    const Mat3 F = Mat3::Identity() + random_ball(rng, 0.5);
    a.frame_indifference = std::max(a.frame_indifference, std::abs(energy_density(m, R * F) - energy_density(m, F)));

    a.rotation_energy = std::max(a.rotation_energy, std::abs(energy_density(m, random_rotation(rng))));

    // F = R (I + P) with |P| <= 1/2, so dist(F, SO(3)) <= 1/2.
    const Mat3 Fn = random_rotation(rng) * (Mat3::Identity() + random_ball(rng, 0.5));
    const double d = dist_to_so3(Fn);
    if (d > 1e-6) a.nondegeneracy = std::min(a.nondegeneracy, energy_density(m, Fn) / (d * d));

    const Mat2 G = random_matrix(rng, 1.0).topLeftCorner<2, 2>();
    const double qa = q2(m, G, Q2Mode::Analytic);
    const double qr = q2(m, G, Q2Mode::Relaxed);
    a.q2_mismatch = std::max(a.q2_mismatch, std::abs(qa - qr) / (1.0 + std::abs(qa)));

    const Mat3 H = random_matrix(rng, 1.0);
    const double exact = q3(m, H);
    a.q3_hessian = std::max(a.q3_hessian, std::abs(hessian_fd(m, H) - exact) / std::max(exact, 1e-300));
  }
  return a;
}

}  // namespace shellhier::cli
