#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "osmax/correlation.hpp"
#include "osmax/limit_law.hpp"
#include "osmax/order_stats.hpp"
#include "osmax/orthant_measure.hpp"
#include "osmax/pickands.hpp"
#include "osmax/synthesis.hpp"

using namespace osmax;

namespace {

OrthantPointSet random_points(int dim, std::size_t count) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  OrthantPointSet s(dim);
  std::vector<double> p(static_cast<std::size_t>(dim));
  for (std::size_t k = 0; k < count; ++k) {
    for (double& c : p) c = g(rng) - 0.01 * static_cast<double>(k);
    s.add(p);
  }
  return s;
}

void BM_OrthantUnion(benchmark::State& state) {
  const auto pts = random_points(static_cast<int>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(orthant_union_exp_measure(pts));
  state.SetComplexityN(state.range(1));
}
BENCHMARK(BM_OrthantUnion)->ArgsProduct({{1, 2}, {256, 1024, 4096}});
BENCHMARK(BM_OrthantUnion)->ArgsProduct({{3}, {64, 256, 512}});

void BM_CirculantPair(benchmark::State& state) {
  const auto lattice = LatticeSpec::make(0.01, static_cast<std::size_t>(state.range(0)));
  const auto spectrum = circulant_spectrum(CorrelationModel::polya_log_infty(0.5), lattice);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_path_pair(spectrum, ++seed));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 2);
}
BENCHMARK(BM_CirculantPair)->RangeMultiplier(4)->Range(1 << 12, 1 << 18);

void BM_MarkovPair(benchmark::State& state) {
  const auto lattice = LatticeSpec::make(0.01, static_cast<std::size_t>(state.range(0)));
  const StationarySampler sampler(CorrelationModel::exp_alpha(1.0), lattice);
  std::vector<double> a(lattice.n_points), b(lattice.n_points);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    sampler.sample_pair(++seed, a, b);
    benchmark::DoNotOptimize(a.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 2);
}
BENCHMARK(BM_MarkovPair)->RangeMultiplier(4)->Range(1 << 12, 1 << 18);

void BM_OrderStatPath(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const std::size_t len = 1 << 16;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  std::vector<std::vector<double>> paths(static_cast<std::size_t>(n), std::vector<double>(len));
  for (auto& p : paths)
    for (double& v : p) v = g(rng);
  std::vector<std::span<const double>> views(paths.begin(), paths.end());
  for (auto _ : state) benchmark::DoNotOptimize(order_stat_path(views, (n + 1) / 2));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(len));
}
BENCHMARK(BM_OrderStatPath)->Arg(2)->Arg(3)->Arg(5)->Arg(8);

void BM_EtaSimulate(benchmark::State& state) {
  const EtaSimulator sim(static_cast<int>(state.range(0)), 1.0, 4.0, 1.0 / 256.0);
  std::size_t rep = 0;
  for (auto _ : state) benchmark::DoNotOptimize(continuous_measure(sim.simulate(1, rep++)));
}
BENCHMARK(BM_EtaSimulate)->Arg(1)->Arg(2);

void BM_LimitCdf(benchmark::State& state) {
  LimitLawSpec spec;
  spec.theorem = Theorem::T21;
  spec.r_long = 0.5;
  spec.quadrature_order = static_cast<int>(state.range(0));
  double x = -2.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(limit_cdf(spec, x, 0.5));
    x = x > 3.0 ? -2.0 : x + 0.01;
  }
}
BENCHMARK(BM_LimitCdf)->Arg(16)->Arg(64)->Arg(128);

}  // namespace
BENCHMARK_MAIN();
