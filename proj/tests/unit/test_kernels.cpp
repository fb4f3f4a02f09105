#include <doctest.h>

#include <stdexcept>
#include <string>

#include <random>
#include <vector>

#include "rsm/kernels.hpp"
#include "rsm/parallel.hpp"
#include "rsm/reconstruct.hpp"
#include "rsm/synthdata.hpp"

using namespace rsm;

namespace {
std::vector<double> noise(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<double> v(n);
  for (auto& x : v) x = nd(rng);
  return v;
}
}  // namespace

TEST_CASE("reflect index") {
  CHECK(kernels::reflect_index(-1, 5) == 0);
  CHECK(kernels::reflect_index(-2, 5) == 1);
  CHECK(kernels::reflect_index(5, 5) == 4);
  CHECK(kernels::reflect_index(6, 5) == 3);
  CHECK(kernels::reflect_index(2, 5) == 2);
}

TEST_CASE("serial and OpenMP kernels agree bit for bit") {
  for (int jobs : {1, 3, 8}) {
    parallel::set_jobs(jobs);
    const std::size_t w = 37, h = 23;
    const auto field = noise(w * h, 1);
    const auto kernel = synth::smoothing_kernel(2.5, synth::NoiseScaling::unit_sum);
    std::vector<double> a(w * h), b(w * h);
    kernels::serial::smooth_separable(field, w, h, kernel, a);
    kernels::omp::smooth_separable(field, w, h, kernel, b);
    CHECK(a == b);

    const auto graph = build_grid_graph(w, h);
    PriorParams prior;
    prior.node_var.assign(w * h, 2.0);
    prior.edge_var.assign(graph.edge_count(), 0.7);
    std::vector<double> s2(w * h, 0.4);
    const auto sys = assemble_system(EffectMap{field, MapRole::raw}, s2, prior, 1.5, graph,
                                     PairwiseMode::nonstationary);
    std::vector<double> y1(w * h), y2(w * h);
    kernels::serial::spmv(sys.a, field, y1);
    kernels::omp::spmv(sys.a, field, y2);
    CHECK(y1 == y2);

    Dataset data(50);
    for (int i = 0; i < 12; ++i) data.add(noise(50, 10 + i), i % 2);
    const auto rows = data.all_rows();
    std::vector<double> g1(144), g2(144);
    kernels::serial::gram(data, rows, g1);
    kernels::omp::gram(data, rows, g2);
    CHECK(g1 == g2);

    SolveOptions so;
    so.parallel_spmv = true;
    CHECK(solve_map(sys, so).values == solve_map(sys).values);
  }
  parallel::set_jobs(1);
}

TEST_CASE("smoothing a constant field keeps it constant under unit-sum kernels") {
  const std::vector<double> field(30 * 30, 3.0);
  const auto kernel = synth::smoothing_kernel(2.5, synth::NoiseScaling::unit_sum);
  std::vector<double> out(field.size());
  kernels::serial::smooth_separable(field, 30, 30, kernel, out);
  for (double v : out) CHECK(v == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("for_each_index rethrows the lowest failing index") {
  parallel::set_jobs(4);
  try {
    parallel::for_each_index(20, [](std::size_t i) {
      if (i == 7 || i == 13) throw std::runtime_error(std::to_string(i));
    });
    FAIL("expected a throw");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "7");
  }
  parallel::set_jobs(1);
}
