#pragma once

#include "shellhier/types.hpp"

namespace shellhier {

/// Isotropic Saint Venant-Kirchhoff material,
/// W(F) = mu/4 |F^T F - I|^2 + lambda/8 (tr(F^T F - I))^2.
struct Material {
  double mu = 1.0;
  double lambda = 1.0;

  /// Throws BadConfig unless mu > 0 and 2 mu + lambda > 0.
  void validate() const;
};

enum class Q2Mode { Analytic, Relaxed };

double energy_density(const Material& m, const Mat3& F);

/// Q3(F) = D^2 W(I)(F, F) = 2 mu |sym F|^2 + lambda (tr F)^2.
double q3(const Material& m, const Mat3& F);

/// Q2 on a tangential 2x2 block (orthonormal frame components).
double q2(const Material& m, const Mat2& F_tan, Q2Mode mode = Q2Mode::Analytic);

/// The minimizer of Q3 over 3x3 extensions of F_tan: returns the full matrix
/// whose upper-left block is F_tan and whose normal entries are optimal.
Mat3 q2_relaxation(const Material& m, const Mat2& F_tan);

/// Frobenius distance from F to SO(3).
double dist_to_so3(const Mat3& F);

}  // namespace shellhier
