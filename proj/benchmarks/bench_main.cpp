#include <benchmark/benchmark.h>

#include "halfq/errorket/classicality.hpp"
#include "halfq/harness/verification.hpp"
#include "halfq/hilbert/operators.hpp"
#include "halfq/symba/algebra.hpp"
#include "halfq/symba/parser.hpp"

using namespace halfq;

static void BM_WeylQuantize(benchmark::State& state) {
  const auto a = symba::parse_expression("q1^3*p1^3*q2^2*p2^2 + q1^2*p2^4 + p1^6", {2, 0});
  for (auto _ : state) benchmark::DoNotOptimize(symba::weyl_quantize(a));
}
BENCHMARK(BM_WeylQuantize);

static void BM_HybridSeries(benchmark::State& state) {
  const auto cfg = harness::build_example();
  const auto h = harness::hybrid_hamiltonian(cfg);
  const auto q = symba::Expression::op_q(symba::Sector::Quantum, 1);
  for (auto _ : state) benchmark::DoNotOptimize(symba::heisenberg_series(q, h));
}
BENCHMARK(BM_HybridSeries);

static void BM_JacobiWitness(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(symba::find_jacobi_witness(3));
}
BENCHMARK(BM_JacobiWitness)->Unit(benchmark::kMillisecond);

static void BM_Certify(benchmark::State& state) {
  const auto cfg = harness::build_example();
  for (auto _ : state) benchmark::DoNotOptimize(harness::certify_config(cfg));
}
BENCHMARK(BM_Certify)->Unit(benchmark::kMillisecond);

static void BM_BoundsTable(benchmark::State& state) {
  const auto cfg = harness::build_example();
  for (auto _ : state) benchmark::DoNotOptimize(harness::bounds_table(cfg));
}
BENCHMARK(BM_BoundsTable)->Unit(benchmark::kMillisecond);

static void BM_SpectralDecompose(benchmark::State& state) {
  const hilbert::Grid g(static_cast<int>(state.range(0)), -10, 10);
  const auto p = hilbert::momentum_operator(g, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(hilbert::spectral_decompose(p));
}
BENCHMARK(BM_SpectralDecompose)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

// Builds the 4096-dim oracle: Hamiltonian, blocked eigensolve, consistency check.
static void BM_Oracle(benchmark::State& state) {
  const auto cfg = harness::build_example();
  for (auto _ : state) benchmark::DoNotOptimize(harness::Oracle(cfg));
}
BENCHMARK(BM_Oracle)->Unit(benchmark::kMillisecond)->Iterations(2);
BENCHMARK_MAIN();
