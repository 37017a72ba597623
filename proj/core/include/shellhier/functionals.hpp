#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "shellhier/field.hpp"
#include "shellhier/geometry.hpp"
#include "shellhier/material.hpp"

namespace shellhier {

/// Deformation of the shell, u(x + t n) = c0(x) + t c1(x) + t^2 c2(x) + t^3 c3(x).
struct ThinShellAnsatz {
  /// Value and chart gradient of a fiber coefficient c_k, k >= 1.
  using Coefficient = std::function<VecJet1(double u, double v)>;

  VectorField mid;                 ///< c0
  std::vector<Coefficient> fiber;  ///< c1, c2, c3 (at most three)
  std::string label;

  /// c0 = r, c1 = n.
  static ThinShellAnsatz identity(const SurfacePatch& surface);
  /// c0 = y, c1 = unit normal of y.
  static ThinShellAnsatz kirchhoff_love(const VectorField& y);

  /// Composition with the affine map x -> R x + b.
  ThinShellAnsatz transformed(const Mat3& R, const Vec3& b) const;
  /// c_k(u, v) for k = 0..3 (zero beyond the stored coefficients).
  VecJet1 coefficient(int k, double u, double v) const;
};

/// Dead load f^h = h^alpha f with an h-independent profile f.
struct ForceSpec {
  VectorField profile;
  double alpha = 0.0;
};

struct ShellQuadrature {
  int thickness_points = 3;
};

struct EnergyRecord {
  double value = 0.0;
  std::optional<double> stretching;
  std::optional<double> bending;
  int surface_points = 0;
  int thickness_points = 0;
  int quad_order = 0;
  int degenerate_gradient_points = 0;  ///< points with det grad u <= 0
};

/// E^h(u) = (1/h) int_{S^h} W(grad u). Throws TubularViolation.
EnergyRecord thin_shell_energy(const SurfacePatch& surface, const Material& material, const ThinShellAnsatz& ansatz,
                               double h, const ShellQuadrature& quad = {});

/// J^h(u) = E^h(u) - (1/h) int_{S^h} f^h . u.
EnergyRecord total_energy(const SurfacePatch& surface, const Material& material, const ThinShellAnsatz& ansatz, double h,
                          const ForceSpec& force, const ShellQuadrature& quad = {});

enum class Normalization { Raw, Scaled };

struct FunctionalOptions {
  double isometry_tolerance = 1e-6;  ///< L2 metric defect per unit area (Kirchhoff)
  double rotation_tolerance = 1e-6;  ///< relative rotation-field residual (V in V1)
  double constraint_tolerance = 1e-6;  ///< relative size of A_m, m <= N, for hierarchies
};

/// I2(y) = c int Q2(Pi(y) - Pi), c = 1 (raw) or 1/24 (scaled). Throws NotAnIsometry.
EnergyRecord kirchhoff_energy(const SurfacePatch& surface, const Material& material, const VectorField& y,
                              Normalization normalization, const FunctionalOptions& options = {});

/// I4(V, B) = 1/2 int Q2(B - (A^2)_tan / 2) + 1/24 int Q2(delta_1 Pi).
EnergyRecord vonkarman_energy(const SurfacePatch& surface, const Material& material, const VectorField& V,
                              const StrainField& B, const FunctionalOptions& options = {});

/// I_lin(V) = 1/24 int Q2(delta_1 Pi).
EnergyRecord linear_bending_energy(const SurfacePatch& surface, const Material& material, const VectorField& V,
                                   const FunctionalOptions& options = {});

struct ConjectureRecord {
  double value = 0.0;
  double stretching = 0.0;
  double bending = 0.0;
  int order = 0;            ///< N with beta in [beta_{N+1}, beta_N)
  bool boundary = false;    ///< beta = beta_{N+1}: stretching term present
  std::vector<double> constraint_norms;  ///< L2 norms of A_1..A_N
};

/// I_beta for a hierarchy. Throws InsufficientOrder if some A_m, m <= N, fails to vanish.
ConjectureRecord conjecture_energy(const SurfacePatch& surface, const Material& material, const DisplacementHierarchy& H,
                                   double beta, const FunctionalOptions& options = {});

/// V^h = h^{1 - beta/2} * (fiber average of u - x), sampled at the nodes.
VectorField averaged_displacement(const SurfacePatch& surface, const ThinShellAnsatz& ansatz, double h, double beta);

}  // namespace shellhier
