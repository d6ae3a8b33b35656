// OpenMP kernels against their serial references. Run with
// --benchmark_filter to pick one; OMP_NUM_THREADS sets the thread count.

#include <benchmark/benchmark.h>

#include <random>

#include "fbasin/basin.hpp"
#include "fbasin/polyalg.hpp"

using namespace fbasin;

namespace {

SequenceSpec triangular_sequence() {
  SequenceSpec seq;
  seq.n = 2;
  seq.maps = {{Primitive::triangular({0.5, 0.2}, {{1, MultiIndex{2, 0}, 1.0}})}};
  seq.params = {2, 0.6, 0.15, 0.1};
  seq.validate();
  return seq;
}

PolyJetMap dense_jet(int n, int order) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PolyJetMap f(n, order, true);
  for (int m = 1; m <= order; ++m)
    for (auto& c : f.layer(m).coefficients()) c = {u(rng), u(rng)};
  return f;
}

void grid_parallel(benchmark::State& state) {
  const auto seq = triangular_sequence();
  const int side = static_cast<int>(state.range(0));
  const auto spec = GridSpec::coordinate_plane(2, 2.0, side, side);
  for (auto _ : state) benchmark::DoNotOptimize(grid_classify(seq, spec, kDefaultJMax));
  state.SetItemsProcessed(state.iterations() * side * side);
}

void grid_serial(benchmark::State& state) {
  const auto seq = triangular_sequence();
  const int side = static_cast<int>(state.range(0));
  const auto spec = GridSpec::coordinate_plane(2, 2.0, side, side);
  for (auto _ : state) benchmark::DoNotOptimize(grid_classify_serial(seq, spec, kDefaultJMax));
  state.SetItemsProcessed(state.iterations() * side * side);
}

void sup_norm_parallel(benchmark::State& state) {
  const auto f = dense_jet(3, 6);
  const auto samples = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(polydisc_sup_norm(f, 0.5, {SupNormMode::kSampleLower, samples}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void sup_norm_serial(benchmark::State& state) {
  const auto f = dense_jet(3, 6);
  const auto samples = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(polydisc_sup_norm_serial(f, 0.5, samples));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(grid_parallel)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(grid_serial)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(sup_norm_parallel)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(sup_norm_serial)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
