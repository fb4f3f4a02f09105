#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "rsm/error.hpp"
#include "rsm/numerics.hpp"
#include "rsm/parallel.hpp"
#include "rsm/thresholding.hpp"

using namespace rsm;

TEST_CASE("threshold worked examples") {
  std::vector<double> v;
  for (int i = 1; i <= 100; ++i) v.push_back(i);
  CHECK(threshold_from_pooled(v, 1, 0.01).tau == 99.0);
  CHECK(threshold_from_pooled(v, 1, 0.05).tau == 95.0);
  CHECK(threshold_from_pooled(std::vector<double>(50, 3.0), 1, 0.01).tau == 3.0);
  CHECK(threshold_from_pooled(v, 1, 1e-9).tau == 100.0);
  CHECK(threshold_from_pooled(v, 1, 0.999).tau == 1.0);
}

TEST_CASE("threshold input validation") {
  CHECK_THROWS_AS(threshold_from_pooled({}, 1, 0.01), ConfigError);
  CHECK_THROWS_AS(threshold_from_pooled({1.0}, 1, 0.0), ConfigError);
  CHECK_THROWS_AS(threshold_from_pooled({1.0}, 1, 1.0), ConfigError);
  CHECK_THROWS_AS(threshold_from_pooled({1.0, NAN}, 1, 0.1), ConfigError);
  CHECK_THROWS_AS(compute_threshold({}, 0.1), ConfigError);
  const std::vector<EffectMap> uneven{EffectMap{{1.0, 2.0}}, EffectMap{{1.0}}};
  CHECK_THROWS_AS(compute_threshold(uneven, 0.1), DimensionError);
}

TEST_CASE("sorted, brute-force and golden-section thresholds agree") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n_maps = 1 + trial % 4, d = 37 + 13 * trial;
    std::vector<EffectMap> maps(n_maps);
    std::vector<double> pooled;
    for (auto& m : maps) {
      for (std::size_t j = 0; j < d; ++j) {
        // heavy ties on some trials
        const double v = trial % 3 == 0 ? std::round(4.0 * nd(rng)) : nd(rng);
        m.values.push_back(v);
        pooled.push_back(v);
      }
    }
    for (double l : {0.001, 0.01, 0.05, 0.2}) {
      const auto t = compute_threshold(maps, l);
      CHECK(t.tau == oracle::brute_force_threshold(pooled, l));
      CHECK(t.n_control_maps == n_maps);
      const double lo = *std::min_element(pooled.begin(), pooled.end());
      const double hi = *std::max_element(pooled.begin(), pooled.end());
      const double g = golden_section_threshold(pooled, l);
      CHECK(g >= t.tau);
      CHECK(g - t.tau <= 1e-12 * (hi - lo) + 1e-300);
      std::size_t over = 0;
      for (double v : pooled) over += v > t.tau;
      CHECK(static_cast<double>(over) <= l * static_cast<double>(pooled.size()));
    }
  }
}

TEST_CASE("threshold is monotone in the limit") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  std::vector<double> v(500);
  for (auto& x : v) x = nd(rng);
  double prev = threshold_from_pooled(v, 1, 0.001).tau;
  for (double l : {0.002, 0.01, 0.05, 0.1, 0.5}) {
    const double t = threshold_from_pooled(v, 1, l).tau;
    CHECK(t <= prev);
    prev = t;
  }
}

TEST_CASE("binary maps use a strict comparison") {
  const auto q = threshold_map(EffectMap{{1.0, 2.0, 3.0}}, 2.0);
  CHECK(q.detections == std::vector<std::uint8_t>{0, 0, 1});
}

TEST_CASE("cross-validated threshold composes calibration folds") {
  const std::size_t side = 5, d = side * side;
  const auto g = build_grid_graph(side, side);
  std::mt19937_64 rng(14);
  std::normal_distribution<double> nd;
  Dataset data(d);
  for (int i = 0; i < 30; ++i) {
    const int y = i < 18 ? 0 : 1;
    std::vector<double> x(d);
    for (std::size_t j = 0; j < d; ++j) x[j] = nd(rng) + (y && j % 5 < 2 ? 1.2 : 0.0);
    data.add(x, y);
  }
  RsmConfig cfg;
  cfg.n_bs = 6;
  cfg.folds = 2;
  cfg.lambda = 1.5;
  cfg.l_fpr = 0.05;
  cfg.seed = 8;
  const ClassifierSpec spec{ClassifierKind::ewgmm, 1.0};
  const auto rows = data.all_rows();

  // oracle: fold the data, fit on each training part, pool control reconstructions
  const auto split = stratified_folds(data, rows, 2, derive_seed(8, {20}));
  std::vector<double> pooled;
  std::size_t n_maps = 0;
  for (std::size_t f = 0; f < 2; ++f) {
    const auto tr = complement(rows, split[f]);
    const auto fit = fit_rsm(spec, data, tr, g, cfg, derive_seed(8, {21, f}));
    for (auto r : split[f]) {
      if (data.label(r) != 0) continue;
      const auto m = reconstruct(gather_evidence(fit, data.row(r)), fit.prior, 1.5,
                                 PairwiseMode::nonstationary, g);
      pooled.insert(pooled.end(), m.values.begin(), m.values.end());
      ++n_maps;
    }
  }
  const auto t = cv_threshold(spec, data, g, cfg);
  CHECK(t.n_control_maps == 18);
  CHECK(n_maps == 18);
  CHECK(t.tau == oracle::brute_force_threshold(pooled, 0.05));

  parallel::set_jobs(3);
  CHECK(cv_threshold(spec, data, g, cfg).tau == t.tau);
  parallel::set_jobs(1);

  // reusing folds across lambdas gives the same answer as refitting
  const auto folds = calibration_folds(spec, data, rows, g, cfg);
  cfg.lambda = 4.0;
  CHECK(threshold_from_folds(folds, g, cfg).tau == cv_threshold(spec, data, g, cfg).tau);

  cfg.folds = 20;
  CHECK_THROWS_AS(cv_threshold(spec, data, g, cfg), ConfigError);
}
