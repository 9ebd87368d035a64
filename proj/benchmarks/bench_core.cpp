#include <memory>
#include <vector>

#include <benchmark/benchmark.h>

#include "removal/chain.hpp"
#include "removal/functions.hpp"
#include "removal/independent.hpp"
#include "removal/kneser.hpp"
#include "removal/random.hpp"

namespace {

using namespace removal;

std::vector<double> random_table(std::size_t size, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(size);
  for (double& x : v) x = rng.uniform01();
  return v;
}

ProductSpace k3_space(std::size_t n) {
  return ProductSpace(std::make_shared<const BaseChain>(k3_chain()), n);
}

void BM_ApplyMarkov(benchmark::State& state) {
  const auto sp = k3_space(static_cast<std::size_t>(state.range(0)));
  const auto f = random_table(sp.size(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(apply_markov(sp, f));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(sp.size()));
}
BENCHMARK(BM_ApplyMarkov)->DenseRange(6, 12, 2);

void BM_QuadForm(benchmark::State& state) {
  const auto sp = k3_space(static_cast<std::size_t>(state.range(0)));
  const auto f = random_table(sp.size(), 2);
  const auto g = random_table(sp.size(), 3);
  for (auto _ : state) benchmark::DoNotOptimize(quad_form(sp, f, g));
}
BENCHMARK(BM_QuadForm)->DenseRange(6, 12, 2);

void BM_FourierExpand(benchmark::State& state) {
  const auto sp = k3_space(static_cast<std::size_t>(state.range(0)));
  const PointFunction f(sp, random_table(sp.size(), 4));
  const ChainSpectrum spectrum = eigendecompose(sp.base());
  for (auto _ : state) benchmark::DoNotOptimize(fourier_expand(f, spectrum));
}
BENCHMARK(BM_FourierExpand)->DenseRange(4, 10, 2);

void BM_Influences(benchmark::State& state) {
  const auto sp = k3_space(static_cast<std::size_t>(state.range(0)));
  const PointFunction f(sp, random_table(sp.size(), 5));
  for (auto _ : state) benchmark::DoNotOptimize(influences(f));
}
BENCHMARK(BM_Influences)->DenseRange(4, 10, 2);

// Exact MWIS on the full support graph of K3^n with random weights.
void BM_Mwis(benchmark::State& state) {
  const auto sp = k3_space(static_cast<std::size_t>(state.range(0)));
  std::vector<PointIndex> all(sp.size());
  for (PointIndex x = 0; x < sp.size(); ++x) all[x] = x;
  const SupportGraph graph = build_support_graph(sp, all);
  const auto w = random_table(sp.size(), 6);
  for (auto _ : state) benchmark::DoNotOptimize(max_weight_independent_set(graph, w));
}
BENCHMARK(BM_Mwis)->DenseRange(2, 4, 1);

void BM_MatchingLikeDecompose(benchmark::State& state) {
  const auto sp = k3_space(static_cast<std::size_t>(state.range(0)));
  const PointFunction g(sp, random_table(sp.size(), 7));
  for (auto _ : state) benchmark::DoNotOptimize(matching_like_decompose(g));
}
BENCHMARK(BM_MatchingLikeDecompose)->DenseRange(2, 6, 2);

void BM_EdgeCube(benchmark::State& state) {
  const double p = 0.25;
  const auto sp = disjointness_space(p, static_cast<std::size_t>(state.range(0)));
  const PointFunction g(sp, random_table(sp.size(), 8));
  for (auto _ : state) benchmark::DoNotOptimize(edge_cube(g, p));
}
BENCHMARK(BM_EdgeCube)->DenseRange(8, 14, 2);

void BM_UpLift(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const std::size_t k = n / 4;
  const LayerFunction f = LayerFunction::constant(n, k, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(up_lift(f, 0.25));
}
BENCHMARK(BM_UpLift)->Arg(8)->Arg(12)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
