#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "shellhier/field.hpp"
#include "shellhier/functionals.hpp"
#include "shellhier/geometry.hpp"
#include "shellhier/kinematics.hpp"
#include "shellhier/material.hpp"

namespace shellhier {

/// beta = alpha for alpha <= 2, 2 alpha - 2 above. Throws NegativeAlpha.
double alpha_to_beta(double alpha);

struct ScalingOrder {
  int order = 1;            ///< N
  double beta_lower = 4.0;  ///< beta_{N+1} = 2 + 2/N
  double beta_upper = 0.0;  ///< beta_N, +inf for N = 1
};

/// Smallest N with beta >= 2 + 2/N. Throws OutOfRegime for beta <= 2.
ScalingOrder order_for_scaling(double beta);

/// Thin-shell ansatz around a mid-surface map c0: fibers follow the unit
/// normal of c0, with t and t^2 corrections that realize the pointwise Q2
/// relaxation of the membrane and bending strains.
ThinShellAnsatz relaxed_ansatz(const SurfacePatch& surface, const Material& material, const VectorField& c0);

enum class Regime { Kirchhoff, VonKarman, Linear, Intermediate };

struct RecoveryInputs {
  Regime regime = Regime::Kirchhoff;
  VectorField y;  ///< Kirchhoff: the isometric deformation
  VectorField V;  ///< displacement in V1 (other regimes)
  VectorField w;  ///< von Karman: in-plane correction (optional)
  double beta = 4.0;
  double tolerance = 1e-6;  ///< isometry / V1 tolerance for the constraint checks
};

/// Throws ConstraintViolated when the inputs miss the regime's constraint.
ThinShellAnsatz build_recovery_sequence(const SurfacePatch& surface, const Material& material,
                                        const RecoveryInputs& inputs, double h);

/// Least-squares w with sym grad w ~ (A^2)_tan / 2, A the rotation field of V.
StrainProjection vonkarman_correction(const SurfacePatch& surface, const VectorField& V);

struct ScalingTarget {
  std::string functional;
  double beta = 2.0;
  double value = 0.0;
};

struct ScalingRow {
  double h = 0.0;
  double energy = 0.0;
  double scaled = 0.0;  ///< E^h / h^beta
  double stretching = 0.0;
  double bending = 0.0;
};

struct LimitComparison {
  std::string functional;
  double beta = 0.0;
  double extrapolated = 0.0;  ///< Richardson on the two finest levels
  double consistency = 0.0;   ///< relative change against the next-coarser pair
  double target = 0.0;
  double relative_error = 0.0;
};

struct ScalingReport {
  std::vector<ScalingRow> rows;
  double beta_hat = 0.0;
  double fit_residual = 0.0;
  bool fit_degenerate = false;
  std::optional<LimitComparison> limit;
};

struct ScalingOptions {
  int threads = 1;  ///< h values evaluated concurrently; results do not depend on it
  ShellQuadrature quad;
};

ScalingReport scaling_study(const SurfacePatch& surface, const Material& material,
                            const std::function<ThinShellAnsatz(double)>& sequence, const std::vector<double>& h_list,
                            const std::optional<ScalingTarget>& target = std::nullopt,
                            const ScalingOptions& options = {});

struct EquipartitionReport {
  double h = 0.0;
  double stretching = 0.0;  ///< int |delta g|^2
  double bending = 0.0;     ///< h^2 int |delta Pi|^2
  double energy = 0.0;      ///< E^h
  double q_stretching = 0.0;  ///< 1/2 int Q2(delta g / 2)
  double q_bending = 0.0;     ///< h^2/24 int Q2(delta Pi)
  double heuristic_error = 0.0;  ///< |E^h - q_stretching - q_bending| / E^h
};

EquipartitionReport equipartition_report(const SurfacePatch& surface, const Material& material,
                                         const ThinShellAnsatz& ansatz, double h, const ShellQuadrature& quad = {});

struct MatchingOptions {
  double tolerance = 1e-12;    ///< max-abs metric defect at the interior nodes
  int max_iterations = 40;
  int max_halvings = 30;
  double v1_tolerance = 1e-2;  ///< relative linear strain of V accepted as "in V1"
};

struct MatchingSolution {
  double eps = 0.0;
  VectorField w;
  VectorField V;  ///< V after projection onto the discrete linear-isometry kernel
  double projection_change = 0.0;  ///< relative size of that projection
  double defect = 0.0;
  int iterations = 0;
  std::vector<double> defect_trace;
  double sup_norm = 0.0;
  double c2_norm = 0.0;  ///< max over nodes of |w|, |grad w|, |Hess w|
};

/// Newton solve for w with r + eps V + eps^2 w an exact discrete isometry of S.
/// Throws NotElliptic, NotAnIsometry, NewtonDiverged.
MatchingSolution matching_solve(const SurfacePatch& surface, const VectorField& V, double eps,
                                const MatchingOptions& options = {});

struct MatchingResult {
  std::vector<MatchingSolution> solutions;
  std::vector<double> sup_ratios;  ///< sup|w_{k+1}| / sup|w_k|
};

MatchingResult matching_study(const SurfacePatch& surface, const VectorField& V, const std::vector<double>& eps_list,
                              const MatchingOptions& options = {});

}  // namespace shellhier
