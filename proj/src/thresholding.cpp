#include "rsm/thresholding.hpp"

#include <algorithm>
#include <cmath>

#include "rsm/error.hpp"
#include "rsm/numerics.hpp"
#include "rsm/parallel.hpp"

namespace rsm {

namespace {

void check_limit(double l_fpr) {
  if (!(l_fpr > 0.0 && l_fpr < 1.0)) throw ConfigError("l_fpr must lie in (0,1)");
}

// number of sorted values strictly greater than t
std::size_t exceedances(std::span<const double> sorted, double t) {
  return static_cast<std::size_t>(sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), t));
}

bool feasible(std::size_t count, std::size_t total, double l_fpr) {
  return static_cast<double>(count) / static_cast<double>(total) <= l_fpr;
}

}  // namespace

Threshold threshold_from_pooled(std::vector<double> pooled, std::size_t n_maps, double l_fpr) {
  check_limit(l_fpr);
  if (pooled.empty() || n_maps == 0) throw ConfigError("threshold needs at least one control map");
  for (double v : pooled)
    if (!std::isfinite(v)) throw ConfigError("non-finite value in control maps");
  std::sort(pooled.begin(), pooled.end());
  const std::size_t m = pooled.size();
  // largest K allowed to exceed
  auto k = static_cast<std::size_t>(std::floor(l_fpr * static_cast<double>(m)));
  k = std::min(k, m - 1);
  while (k + 1 < m && feasible(k + 1, m, l_fpr)) ++k;
  while (k > 0 && !feasible(k, m, l_fpr)) --k;
  return Threshold{pooled[m - k - 1], l_fpr, n_maps};
}

Threshold compute_threshold(std::span<const EffectMap> control_maps, double l_fpr) {
  if (control_maps.empty()) throw ConfigError("threshold needs at least one control map");
  const std::size_t d = control_maps.front().size();
  std::vector<double> pooled;
  pooled.reserve(d * control_maps.size());
  for (const auto& m : control_maps) {
    if (m.size() != d) throw DimensionError("control maps differ in length");
    pooled.insert(pooled.end(), m.values.begin(), m.values.end());
  }
  return threshold_from_pooled(std::move(pooled), control_maps.size(), l_fpr);
}

double golden_section_threshold(std::span<const double> pooled, double l_fpr, double tol) {
  check_limit(l_fpr);
  if (pooled.empty()) throw ConfigError("threshold needs at least one value");
  std::vector<double> sorted(pooled.begin(), pooled.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  const double range = sorted.back() - sorted.front();
  if (range == 0.0) return sorted.back();
  if (tol <= 0.0) tol = 1e-12 * range;

  double lo = sorted.front() - range;  // everything exceeds: infeasible
  double hi = sorted.back();           // nothing exceeds: feasible
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  while (hi - lo > tol) {
    const double t = hi - g * (hi - lo);
    if (feasible(exceedances(sorted, t), m, l_fpr)) hi = t;
    else lo = t;
  }
  return hi;
}

BinaryEffectMap threshold_map(const EffectMap& map, double tau) {
  BinaryEffectMap q;
  q.detections.resize(map.size());
  for (std::size_t j = 0; j < map.size(); ++j) q.detections[j] = map.values[j] > tau;
  return q;
}

std::vector<CalibrationFold> calibration_folds(const ClassifierSpec& spec, const Dataset& data,
                                               std::span<const std::size_t> rows,
                                               const NeighborhoodGraph& graph,
                                               const RsmConfig& config, bool with_prior) {
  config.validate();
  std::size_t n_controls = 0;
  for (auto r : rows) n_controls += data.label(r) == 0;
  if (n_controls < config.folds) throw ConfigError("fewer controls than folds");

  const auto split = stratified_folds(data, rows, config.folds, derive_seed(config.seed, {20}));
  std::vector<CalibrationFold> out(config.folds);
  for (std::size_t f = 0; f < config.folds; ++f) {
    const auto train_rows = complement(rows, split[f]);
    const auto fit = fit_rsm(spec, data, train_rows, graph, config, derive_seed(config.seed, {21, f}),
                             with_prior);
    auto& fold = out[f];
    fold.prior = fit.prior;
    for (auto r : split[f])
      if (data.label(r) == 0) fold.control_rows.push_back(r);
    fold.controls.resize(fold.control_rows.size());
    parallel::for_each_index(fold.control_rows.size(), [&](std::size_t i) {
      fold.controls[i] = gather_evidence(fit, data.row(fold.control_rows[i]));
    });
  }
  return out;
}

Threshold threshold_from_folds(std::span<const CalibrationFold> folds,
                               const NeighborhoodGraph& graph, const RsmConfig& config) {
  std::vector<const SampleEvidence*> evs;
  std::vector<const PriorParams*> priors;
  for (const auto& f : folds) {
    for (const auto& e : f.controls) {
      evs.push_back(&e);
      priors.push_back(&f.prior);
    }
  }
  std::vector<EffectMap> maps(evs.size());
  parallel::for_each_index(evs.size(), [&](std::size_t i) {
    maps[i] = reconstruct(*evs[i], *priors[i], config.lambda, config.pairwise_mode, graph,
                          config.observation);
  });
  return compute_threshold(maps, config.l_fpr);
}

Threshold cv_threshold(const ClassifierSpec& spec, const Dataset& data,
                       std::span<const std::size_t> rows, const NeighborhoodGraph& graph,
                       const RsmConfig& config) {
  const auto folds = calibration_folds(spec, data, rows, graph, config);
  return threshold_from_folds(folds, graph, config);
}

Threshold cv_threshold(const ClassifierSpec& spec, const Dataset& data,
                       const NeighborhoodGraph& graph, const RsmConfig& config) {
  const auto rows = data.all_rows();
  return cv_threshold(spec, data, rows, graph, config);
}

}  // namespace rsm
