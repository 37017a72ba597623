#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "shellhier/errors.hpp"
#include "support.hpp"

namespace shellhier {
namespace {

using namespace testing;

const std::vector<double> kSweep{1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128};

TEST(Experiments, AlphaToBeta) {
  EXPECT_EQ(alpha_to_beta(1.0), 1.0);
  EXPECT_EQ(alpha_to_beta(2.0), 2.0);
  EXPECT_EQ(alpha_to_beta(3.0), 4.0);
  EXPECT_EQ(alpha_to_beta(0.0), 0.0);
  double prev = -1.0;
  for (double a = 0.0; a < 5.0; a += 0.01) {
    EXPECT_GE(alpha_to_beta(a), prev);
    prev = alpha_to_beta(a);
  }
  EXPECT_THROW(alpha_to_beta(-0.1), Error);
}

TEST(Experiments, OrderForScaling) {
  const ScalingOrder a = order_for_scaling(4.0);
  EXPECT_EQ(a.order, 1);
  EXPECT_EQ(a.beta_lower, 4.0);
  EXPECT_TRUE(std::isinf(a.beta_upper));
  const ScalingOrder b = order_for_scaling(3.0);
  EXPECT_EQ(b.order, 2);
  EXPECT_EQ(b.beta_lower, 3.0);
  EXPECT_EQ(b.beta_upper, 4.0);
  const ScalingOrder c = order_for_scaling(2.5);
  EXPECT_EQ(c.order, 4);
  EXPECT_EQ(c.beta_upper, 8.0 / 3.0);
  EXPECT_EQ(order_for_scaling(8.0 / 3.0).order, 3);
  EXPECT_EQ(order_for_scaling(100.0).order, 1);
  EXPECT_GT(order_for_scaling(2.0001).order, 1000);
  // Left-continuous steps: just below a threshold moves to the next order.
  EXPECT_EQ(order_for_scaling(std::nextafter(3.0, 0.0)).order, 3);
  EXPECT_THROW(order_for_scaling(2.0), Error);
}

TEST(Experiments, TrivialRecoverySequences) {
  const Material m;
  const SurfacePatch s = plate(10);
  RecoveryInputs k;
  k.y = VectorField::identity(s);
  EXPECT_LE(thin_shell_energy(s, m, build_recovery_sequence(s, m, k, 0.05), 0.05).value, 1e-14);
  RecoveryInputs vk;
  vk.regime = Regime::VonKarman;
  vk.V = VectorField::zero(s);
  vk.w = VectorField::zero(s);
  EXPECT_LE(thin_shell_energy(s, m, build_recovery_sequence(s, m, vk, 0.05), 0.05).value, 1e-14);
  RecoveryInputs bad;
  bad.regime = Regime::Linear;
  bad.beta = 5.0;
  bad.V = field(s, "u*u", "0", "0");
  EXPECT_THROW(build_recovery_sequence(s, m, bad, 0.05), Error);
}

TEST(Experiments, IdentitySequenceIsDegenerate) {
  const Material m;
  const SurfacePatch s = plate(8);
  const ScalingReport r =
      scaling_study(s, m, [&](double) { return ThinShellAnsatz::identity(s); }, kSweep);
  EXPECT_TRUE(r.fit_degenerate);
  EXPECT_TRUE(std::isnan(r.beta_hat));
  for (const auto& row : r.rows) EXPECT_LE(row.energy, 1e-14);
}

TEST(Experiments, ScalingStudyValidatesSweep) {
  const Material m;
  const SurfacePatch s = plate(8);
  auto seq = [&](double) { return ThinShellAnsatz::identity(s); };
  EXPECT_THROW(scaling_study(s, m, seq, {0.1, 0.05, 0.025}), Error);
  EXPECT_THROW(scaling_study(s, m, seq, {0.1, 0.05, 0.05, 0.01}), Error);
}

TEST(Experiments, KirchhoffSequenceScales) {
  const Material m;
  const SurfacePatch s = plate(16);
  RecoveryInputs in;
  in.y = rolled_plate(s, 2.0);
  const double target = kirchhoff_energy(s, m, in.y, Normalization::Scaled).value;
  ScalingOptions o;
  o.threads = 2;
  const ScalingReport r = scaling_study(
      s, m, [&](double h) { return build_recovery_sequence(s, m, in, h); }, kSweep,
      ScalingTarget{"kirchhoff", 2.0, target}, o);
  EXPECT_NEAR(r.beta_hat, 2.0, 0.05);
  ASSERT_TRUE(r.limit.has_value());
  EXPECT_LT(r.limit->relative_error, 0.02);
  for (size_t k = 1; k < r.rows.size(); ++k)
    EXPECT_LE(std::abs(r.rows[k].scaled - target), std::abs(r.rows[k - 1].scaled - target));
}

TEST(Experiments, ThreadCountDoesNotChangeResults) {
  const Material m;
  const SurfacePatch s = plate(12);
  RecoveryInputs in;
  in.y = rolled_plate(s, 1.5);
  auto seq = [&](double h) { return build_recovery_sequence(s, m, in, h); };
  ScalingOptions one, four;
  four.threads = 4;
  const ScalingReport a = scaling_study(s, m, seq, kSweep, std::nullopt, one);
  const ScalingReport b = scaling_study(s, m, seq, kSweep, std::nullopt, four);
  for (size_t k = 0; k < a.rows.size(); ++k) EXPECT_EQ(a.rows[k].energy, b.rows[k].energy);
  EXPECT_EQ(a.beta_hat, b.beta_hat);
}

TEST(Experiments, Equipartition) {
  const Material m;
  const SurfacePatch s = plate(12);
  const EquipartitionReport id = equipartition_report(s, m, ThinShellAnsatz::identity(s), 0.05);
  EXPECT_LE(id.stretching, 1e-28);
  EXPECT_LE(id.bending, 1e-28);
  EXPECT_LE(id.energy, 1e-14);

  RecoveryInputs in;
  in.y = rolled_plate(s, 2.0);
  for (double h : {0.1, 0.05}) {
    const EquipartitionReport e = equipartition_report(s, m, build_recovery_sequence(s, m, in, h), h);
    EXPECT_LE(e.stretching, 1e-12);
    EXPECT_NEAR(e.bending / (h * h), 0.25, 1e-10);
    EXPECT_LT(e.heuristic_error, 1e-3);
  }

  RecoveryInputs vk;
  vk.regime = Regime::VonKarman;
  vk.V = field(s, "0", "0", "0.5*sin(pi*u)*sin(pi*v)");
  std::vector<EquipartitionReport> rows;
  for (double h : {0.04, 0.02}) rows.push_back(equipartition_report(s, m, build_recovery_sequence(s, m, vk, h), h));
  EXPECT_NEAR(std::log2(rows[0].stretching / rows[1].stretching), 4.0, 0.1);
  EXPECT_NEAR(std::log2(rows[0].bending / rows[1].bending), 4.0, 0.1);
}

TEST(Experiments, MatchingTrivialCases) {
  const SurfacePatch s = cap(10);
  const MatchingSolution zero = matching_solve(s, VectorField::zero(s), 0.1);
  EXPECT_LE(zero.defect, 1e-12);
  EXPECT_LE(zero.sup_norm, 1e-12);
  const VectorField V = VectorField::rigid(s, Vec3::Zero(), Vec3(0.2, -0.1, 0.4));
  // The corrected map is an exact discrete isometry at the interior nodes,
  // checked independently through pullback_metric on sampled fields.
  const NodalVec X = s.node_positions();
  const TensorNodes g0 = pullback_metric(s, VectorField::sampled(s, X));
  for (double eps : {0.1, 0.05}) {
    const MatchingSolution m = matching_solve(s, V, eps);
    EXPECT_LE(m.defect, 1e-12);
    const NodalVec U = X + eps * m.V.nodal_values() + (eps * eps) * m.w.nodal_values();
    const TensorNodes g = pullback_metric(s, VectorField::sampled(s, U));
    for (int i = 1; i < s.grid().n1() - 1; ++i)
      for (int j = 1; j < s.grid().n2() - 1; ++j) {
        const int k = s.grid().index(i, j);
        EXPECT_LT((g[k] - g0[k]).cwiseAbs().maxCoeff(), 1e-11);
      }
  }
}

TEST(Experiments, MatchingRejectsNonEllipticSurfaces) {
  const SurfacePatch p = plate(8);
  try {
    matching_solve(p, VectorField::zero(p), 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotElliptic);
  }
  const SurfacePatch c = cap(8);
  try {
    matching_solve(c, field(c, "u*u", "0", "0"), 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotAnIsometry);
  }
}

TEST(Experiments, VonKarmanCorrectionIsConsistent) {
  const SurfacePatch s = plate(12);
  // phi = u^2: (A^2)_tan / 2 = diag(-2u^2, 0) is the symmetric gradient of (-2u^3/3, 0, 0).
  const StrainProjection exact = vonkarman_correction(s, field(s, "0", "0", "u^2"));
  EXPECT_LT(exact.relative_residual, 1e-6);
  // phi = uv has det Hess phi = -1, so the target fails compatibility and cannot be fitted.
  EXPECT_GT(vonkarman_correction(s, field(s, "0", "0", "u*v")).relative_residual, 1e-2);
}

}  // namespace
}  // namespace shellhier
