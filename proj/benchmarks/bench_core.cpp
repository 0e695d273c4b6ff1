#include <benchmark/benchmark.h>

#include <cmath>

#include "besovkit/atoms.hpp"
#include "besovkit/besov.hpp"
#include "besovkit/multipliers.hpp"
#include "besovkit/trace.hpp"
#include "besovkit/whitney.hpp"

using namespace besovkit;

namespace {

SampledFunction bump_grid(int level) {
  return SampledFunction::sample(Box{{-1, -1}, {1, 1}}, level, 2, [](Vec2 x) {
    const double r2 = (x.x * x.x + x.y * x.y) / 0.36;
    return r2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r2)) : 0.0;
  });
}

void BM_WhitneyDecompose(benchmark::State& state) {
  const auto dom = LipschitzDomain::l_shape();
  const int J = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(whitney_decompose(dom, J, 8.0).cubes().size());
}
BENCHMARK(BM_WhitneyDecompose)->DenseRange(5, 7)->Unit(benchmark::kMillisecond);

void BM_PartitionWeights(benchmark::State& state) {
  const auto cover = whitney_decompose(LipschitzDomain::unit_square(), 7, 8.0);
  const auto pts = sample_admissible_points(cover, 1024, 7);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(partition_weights(cover, pts[i++ % pts.size()]));
  }
}
BENCHMARK(BM_PartitionWeights);

void BM_ModulusProfile(benchmark::State& state) {
  const auto f = bump_grid(static_cast<int>(state.range(0)));
  const BesovParams prm{0.5, 2.0, 2.0, 2, 8};
  const auto region = Region::whole_space();
  for (auto _ : state) benchmark::DoNotOptimize(modulus_profile(f, prm, region, effective_j_max(f, prm)));
}
BENCHMARK(BM_ModulusProfile)->DenseRange(6, 8)->Unit(benchmark::kMillisecond);

void BM_DecomposeReconstruct(benchmark::State& state) {
  const int level = static_cast<int>(state.range(0));
  const auto f = bump_grid(level);
  const BesovParams prm{0.5, 2.0, 2.0, 1, 8};
  for (auto _ : state) {
    const auto dec = decompose(f, prm, level - 2, AtomKind::k_smooth);
    benchmark::DoNotOptimize(reconstruct(dec, level - 2).values().data());
  }
}
BENCHMARK(BM_DecomposeReconstruct)->DenseRange(6, 7)->Unit(benchmark::kMillisecond);

void BM_SeqNormDomain(benchmark::State& state) {
  const auto dec = decompose(bump_grid(8), BesovParams{0.5, 2.0, 2.0, 1, 8}, 6, AtomKind::k_smooth);
  for (auto _ : state) benchmark::DoNotOptimize(seq_norm_domain(dec.coefficients, 0.5, 0.5, 0.5));
}
BENCHMARK(BM_SeqNormDomain);

void BM_ChiProfile(benchmark::State& state) {
  const auto dom = LipschitzDomain::unit_square();
  for (auto _ : state) {
    benchmark::DoNotOptimize(chi_profile(dom, 2.0, {0.5}, {1.0, INFINITY}, static_cast<int>(state.range(0))).lp);
  }
}
BENCHMARK(BM_ChiProfile)->DenseRange(6, 8)->Unit(benchmark::kMillisecond);

void BM_HsetSum(benchmark::State& state) {
  const auto gauge = HGauge::power(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(hset_condition_sum(gauge, 0.3, 2.0, 2.0, 2, 3, 256).sup);
}
BENCHMARK(BM_HsetSum);

void BM_TraceRoundtrip(benchmark::State& state) {
  const auto dom = LipschitzDomain::unit_square();
  const auto ctx = ExtensionContext::build(dom, 6, 8.0);
  const auto g = random_boundary_decomposition(dom, 2, 11);
  for (auto _ : state) {
    benchmark::DoNotOptimize(roundtrip_report(g, ctx, BesovParams{0.5, 2.0, 2.0, 1, 8}, 6).ratio_ext);
  }
}
BENCHMARK(BM_TraceRoundtrip)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
