// Serial reference kernels against their OpenMP variants.
//   ./rsm_bench --benchmark_filter=Smooth

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "rsm/core.hpp"
#include "rsm/estimation.hpp"
#include "rsm/kernels.hpp"
#include "rsm/parallel.hpp"
#include "rsm/reconstruct.hpp"
#include "rsm/synthdata.hpp"

namespace {

std::vector<double> random_field(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<double> v(n);
  for (auto& x : v) x = nd(rng);
  return v;
}

template <bool Parallel>
void BM_Smooth(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  rsm::parallel::set_jobs(Parallel ? omp_get_max_threads() : 1);
  const auto field = random_field(side * side, 1);
  const auto kernel = rsm::synth::smoothing_kernel(2.5, rsm::synth::NoiseScaling::unit_variance);
  std::vector<double> out(field.size());
  for (auto _ : state) {
    if constexpr (Parallel) rsm::kernels::omp::smooth_separable(field, side, side, kernel, out);
    else rsm::kernels::serial::smooth_separable(field, side, side, kernel, out);
    benchmark::DoNotOptimize(out.data());
  }
}

rsm::MapSystem grid_system(std::size_t side) {
  const auto graph = rsm::build_grid_graph(side, side);
  const std::size_t d = side * side;
  rsm::PriorParams prior;
  prior.node_var.assign(d, 1.0);
  prior.edge_var.assign(graph.edge_count(), 0.5);
  auto obs = random_field(d, 2);
  std::vector<double> s2(d, 0.3);
  return rsm::assemble_system(rsm::EffectMap{obs, rsm::MapRole::raw}, s2, prior, 2.0, graph,
                              rsm::PairwiseMode::nonstationary);
}

template <bool Parallel>
void BM_Spmv(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  rsm::parallel::set_jobs(Parallel ? omp_get_max_threads() : 1);
  const auto sys = grid_system(side);
  const auto x = random_field(sys.a.n, 3);
  std::vector<double> y(sys.a.n);
  for (auto _ : state) {
    if constexpr (Parallel) rsm::kernels::omp::spmv(sys.a, x, y);
    else rsm::kernels::serial::spmv(sys.a, x, y);
    benchmark::DoNotOptimize(y.data());
  }
}

template <bool Parallel>
void BM_Gram(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  rsm::parallel::set_jobs(Parallel ? omp_get_max_threads() : 1);
  rsm::Dataset data(2500);
  for (std::size_t i = 0; i < n; ++i) data.add(random_field(2500, 10 + i), static_cast<int>(i % 2));
  const auto rows = data.all_rows();
  std::vector<double> out(n * n);
  for (auto _ : state) {
    if constexpr (Parallel) rsm::kernels::omp::gram(data, rows, out);
    else rsm::kernels::serial::gram(data, rows, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_Solve(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  rsm::parallel::set_jobs(Parallel ? omp_get_max_threads() : 1);
  const auto sys = grid_system(side);
  rsm::SolveOptions opt;
  opt.parallel_spmv = Parallel;
  for (auto _ : state) benchmark::DoNotOptimize(rsm::solve_map(sys, opt).values.data());
}

}  // namespace

BENCHMARK(BM_Smooth<false>)->Arg(100)->Arg(400);
BENCHMARK(BM_Smooth<true>)->Arg(100)->Arg(400);
BENCHMARK(BM_Spmv<false>)->Arg(100)->Arg(400);
BENCHMARK(BM_Spmv<true>)->Arg(100)->Arg(400);
BENCHMARK(BM_Gram<false>)->Arg(160);
BENCHMARK(BM_Gram<true>)->Arg(160);
BENCHMARK(BM_Solve<false>)->Arg(50)->Arg(100);
BENCHMARK(BM_Solve<true>)->Arg(50)->Arg(100);

BENCHMARK_MAIN();
