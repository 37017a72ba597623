#pragma once

#include <cstdint>

#include "shellhier/material.hpp"

namespace shellhier::cli {

/// Sampled checks of the stored energy and its quadratic forms.
struct MaterialAudit {
  int samples = 0;
  double frame_indifference = 0.0;  ///< max |W(RF) - W(F)| for |F - Id| <= 1/2
  double rotation_energy = 0.0;     ///< max |W(R)|
  double nondegeneracy = 0.0;       ///< min W(F) / dist^2(F, SO(3)) for dist <= 1/2
  double q2_mismatch = 0.0;         ///< max |q2 analytic - q2 relaxed| / (1 + |q2|)
  double q3_hessian = 0.0;          ///< max relative gap between q3 and the FD Hessian of W at Id (step 1e-4)
};

MaterialAudit audit_material(const Material& material, int samples, std::uint64_t seed);

}  // namespace shellhier::cli
