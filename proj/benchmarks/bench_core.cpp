#include <benchmark/benchmark.h>

#include <random>

#include "shellhier/experiments.hpp"
#include "shellhier/functionals.hpp"
#include "shellhier/kinematics.hpp"
#include "shellhier/material.hpp"

using namespace shellhier;

namespace {

SurfaceDescriptor cap_descriptor(int n) {
  SurfaceDescriptor d;
  d.family = SphericalCapParams{};
  d.n1 = d.n2 = n;
  return d;
}

SurfacePatch plate(int n) {
  SurfaceDescriptor d;
  d.n1 = d.n2 = n;
  return SurfacePatch::build(d);
}

VectorField rolled(const SurfacePatch& s) {
  return VectorField::analytic(
      s, {Expression::parse("2*sin(u/2)"), Expression::parse("v"), Expression::parse("2*(1-cos(u/2))")});
}

}  // namespace

static void BM_EnergyDensity(benchmark::State& state) {
  const Material m;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-0.3, 0.3);
  Mat3 F = Mat3::Identity();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) F(i, j) += d(rng);
  for (auto _ : state) benchmark::DoNotOptimize(energy_density(m, F));
}
BENCHMARK(BM_EnergyDensity);

static void BM_Q2Relaxed(benchmark::State& state) {
  const Material m{1.0, 2.0};
  Mat2 G;
  G << 0.1, 0.02, -0.03, 0.05;
  for (auto _ : state) benchmark::DoNotOptimize(q2(m, G, Q2Mode::Relaxed));
}
BENCHMARK(BM_Q2Relaxed);

static void BM_BuildCap(benchmark::State& state) {
  const SurfaceDescriptor d = cap_descriptor(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(SurfacePatch::build(d).area());
}
BENCHMARK(BM_BuildCap)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_ThinShellEnergy(benchmark::State& state) {
  const Material m;
  const SurfacePatch s = plate(static_cast<int>(state.range(0)));
  RecoveryInputs in;
  in.y = rolled(s);
  const ThinShellAnsatz a = build_recovery_sequence(s, m, in, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(thin_shell_energy(s, m, a, 0.05).value);
}
BENCHMARK(BM_ThinShellEnergy)->Arg(12)->Arg(24)->Unit(benchmark::kMillisecond);

static void BM_InfinitesimalIsometries(benchmark::State& state) {
  const SurfacePatch s = SurfacePatch::build(cap_descriptor(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(solve_infinitesimal_isometries(s, 4).quotients.data());
}
BENCHMARK(BM_InfinitesimalIsometries)->Arg(10)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_MatchingSolve(benchmark::State& state) {
  const SurfacePatch s = SurfacePatch::build(cap_descriptor(static_cast<int>(state.range(0))));
  const VectorField V = solve_infinitesimal_isometries(s, 1).modes.front();
  for (auto _ : state) benchmark::DoNotOptimize(matching_solve(s, V, 0.05).defect);
}
BENCHMARK(BM_MatchingSolve)->Arg(10)->Arg(14)->Unit(benchmark::kMillisecond);

static void BM_StrainProjection(benchmark::State& state) {
  const SurfacePatch s = SurfacePatch::build(cap_descriptor(static_cast<int>(state.range(0))));
  const StrainField B = StrainField::analytic(
      s, {Expression::parse("sin(u)"), Expression::parse("u*v"), Expression::parse("cos(v)")});
  for (auto _ : state) benchmark::DoNotOptimize(finite_strain_project(s, B).residual);
}
BENCHMARK(BM_StrainProjection)->Arg(12)->Arg(24)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
