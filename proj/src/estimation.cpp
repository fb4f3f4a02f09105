#include "rsm/estimation.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "rsm/error.hpp"
#include "rsm/numerics.hpp"
#include "rsm/parallel.hpp"

namespace rsm {

std::vector<std::size_t> stratified_bootstrap(const Dataset& data,
                                              std::span<const std::size_t> rows,
                                              std::uint64_t seed) {
  data.require_both_classes(rows);
  std::vector<std::size_t> out;
  out.reserve(rows.size());
  for (int cls = 0; cls < 2; ++cls) {
    std::vector<std::size_t> members;
    for (auto r : rows)
      if (data.label(r) == cls) members.push_back(r);
    std::mt19937_64 rng(derive_seed(seed, {static_cast<std::uint64_t>(cls)}));
    std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
    for (std::size_t i = 0; i < members.size(); ++i) out.push_back(members[pick(rng)]);
  }
  return out;
}

std::vector<std::size_t> stratified_bootstrap(const Dataset& data, std::uint64_t seed) {
  auto rows = data.all_rows();
  return stratified_bootstrap(data, rows, seed);
}

NoiseEstimate noise_from_maps(std::span<const double> maps, std::size_t n_bs, std::size_t d) {
  if (maps.size() != n_bs * d) throw DimensionError("replicate map block has wrong size");
  auto m = column_moments(maps, n_bs, d);
  return NoiseEstimate{std::move(m.variance), EffectMap{std::move(m.mean), MapRole::bootstrap_mean}};
}

namespace {

Model train_replicate(const ClassifierSpec& spec, const Dataset& data,
                      std::span<const std::size_t> rows, std::uint64_t seed, std::size_t r) {
  const auto sample = stratified_bootstrap(data, rows, seed);
  try {
    return train(spec, data, sample);
  } catch (const TrainingError& e) {
    throw TrainingError("bootstrap replicate " + std::to_string(r) + ": " + e.what());
  }
}

}  // namespace

BootstrapEnsemble::BootstrapEnsemble(const ClassifierSpec& spec, const Dataset& data,
                                     std::span<const std::size_t> rows, std::size_t n_bs,
                                     std::uint64_t seed) {
  if (n_bs < 1) throw ConfigError("bootstrap count must be positive");
  data.require_both_classes(rows);
  models_.resize(n_bs);
  parallel::for_each_index(n_bs, [&](std::size_t r) {
    models_[r] = train_replicate(spec, data, rows, derive_seed(seed, {r}), r);
  });
}

std::vector<double> BootstrapEnsemble::replicate_maps(std::span<const double> f) const {
  const std::size_t d = f.size();
  std::vector<double> block(models_.size() * d);
  for (std::size_t r = 0; r < models_.size(); ++r) {
    effect_map(models_[r], f, std::span<double>(block).subspan(r * d, d));
  }
  return block;
}

NoiseEstimate BootstrapEnsemble::noise_and_mean(std::span<const double> f) const {
  return noise_from_maps(replicate_maps(f), models_.size(), f.size());
}

void BootstrapEnsemble::mean_map(std::span<const double> f, std::span<double> out) const {
  const std::size_t d = f.size();
  std::vector<double> tmp(d);
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& m : models_) {
    effect_map(m, f, tmp);
    for (std::size_t j = 0; j < d; ++j) out[j] += tmp[j];
  }
  const double inv = 1.0 / static_cast<double>(models_.size());
  for (auto& v : out) v *= inv;
}

NoiseEstimate estimate_noise_and_mean(const ClassifierSpec& spec, const Dataset& data,
                                      std::span<const double> test_sample, std::size_t n_bs,
                                      std::uint64_t seed) {
  if (n_bs < 2) throw ConfigError("N_bs must be at least 2");
  if (test_sample.size() != data.dim()) throw DimensionError("test sample dimension mismatch");
  const auto rows = data.all_rows();
  BootstrapEnsemble ensemble(spec, data, rows, n_bs, seed);
  return ensemble.noise_and_mean(test_sample);
}

std::vector<double> training_mean_maps(const ClassifierSpec& spec, const Dataset& data,
                                       std::span<const std::size_t> rows, std::size_t folds,
                                       std::size_t n_bs, std::uint64_t seed, bool use_cv) {
  const std::size_t d = data.dim();
  const std::size_t n = rows.size();
  std::vector<double> out(n * d);

  if (!use_cv) {
    BootstrapEnsemble ensemble(spec, data, rows, n_bs, derive_seed(seed, {0}));
    parallel::for_each_index(n, [&](std::size_t i) {
      ensemble.mean_map(data.row(rows[i]), std::span<double>(out).subspan(i * d, d));
    });
    return out;
  }

  const auto split = stratified_folds(data, rows, folds, derive_seed(seed, {1}));
  std::vector<std::vector<std::size_t>> train_rows(folds);
  for (std::size_t f = 0; f < folds; ++f) {
    train_rows[f] = complement(rows, split[f]);
    data.require_both_classes(train_rows[f]);
  }
  // Phase 1: every (fold, replicate) model, trained independently.
  std::vector<std::vector<Model>> models(folds, std::vector<Model>(n_bs));
  parallel::for_each_index(folds * n_bs, [&](std::size_t job) {
    const std::size_t f = job / n_bs, r = job % n_bs;
    models[f][r] = train_replicate(spec, data, train_rows[f], derive_seed(seed, {2, f, r}), r);
  });
  // Phase 2: each held-out row averaged over its fold's replicates in order.
  std::vector<std::size_t> slot_of(data.size(), n);
  for (std::size_t i = 0; i < n; ++i) slot_of[rows[i]] = i;
  std::vector<std::pair<std::size_t, std::size_t>> jobs;  // (fold, output slot)
  for (std::size_t f = 0; f < folds; ++f)
    for (auto r : split[f]) jobs.emplace_back(f, slot_of[r]);
  parallel::for_each_index(jobs.size(), [&](std::size_t k) {
    const auto [f, slot] = jobs[k];
    auto dst = std::span<double>(out).subspan(slot * d, d);
    std::vector<double> tmp(d);
    std::fill(dst.begin(), dst.end(), 0.0);
    for (const auto& m : models[f]) {
      effect_map(m, data.row(rows[slot]), tmp);
      for (std::size_t j = 0; j < d; ++j) dst[j] += tmp[j];
    }
    const double inv = 1.0 / static_cast<double>(n_bs);
    for (auto& v : dst) v *= inv;
  });
  return out;
}

double variance_floor(std::span<const double> values) {
  return 1e-12 * std::max(1.0, median_positive(values));
}

PriorParams prior_from_mean_maps(std::span<const double> maps, std::size_t n, std::size_t d,
                                 const NeighborhoodGraph& graph) {
  if (maps.size() != n * d || n == 0) throw DimensionError("mean-map matrix has wrong size");
  if (graph.node_count() != d) throw DimensionError("graph node count differs from map length");
  PriorParams p;
  auto m = column_moments(maps, n, d);
  p.node_var = std::move(m.variance);
  p.mean_of_means = std::move(m.mean);

  const auto edges = graph.edges();
  p.edge_mean.assign(edges.size(), 0.0);
  p.edge_var.assign(edges.size(), 0.0);
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* x = maps.data() + i * d;
    for (std::size_t e = 0; e < edges.size(); ++e) p.edge_mean[e] += x[edges[e].j] - x[edges[e].k];
  }
  for (auto& v : p.edge_mean) v *= inv;
  for (std::size_t i = 0; i < n; ++i) {
    const double* x = maps.data() + i * d;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const double dev = x[edges[e].j] - x[edges[e].k] - p.edge_mean[e];
      p.edge_var[e] += dev * dev;
    }
  }
  for (auto& v : p.edge_var) v *= inv;

  const double node_floor = variance_floor(p.node_var);
  for (auto& v : p.node_var) v = std::max(v, node_floor);
  if (!p.edge_var.empty()) {
    const double edge_floor = variance_floor(p.edge_var);
    for (auto& v : p.edge_var) v = std::max(v, edge_floor);
    p.stationary_var = stationary_variance(p, graph);
  }
  return p;
}

PriorParams estimate_prior_params(const ClassifierSpec& spec, const Dataset& data,
                                  std::span<const std::size_t> rows,
                                  const NeighborhoodGraph& graph, std::size_t folds,
                                  std::size_t n_bs, std::uint64_t seed, bool use_cv) {
  if (use_cv && rows.size() < folds) {
    throw ConfigError("need at least as many samples as folds for cross-validated priors");
  }
  const auto maps = training_mean_maps(spec, data, rows, folds, n_bs, seed, use_cv);
  return prior_from_mean_maps(maps, rows.size(), data.dim(), graph);
}

double stationary_variance(const PriorParams& prior, const NeighborhoodGraph& graph) {
  if (graph.edge_count() == 0) throw ConfigError("stationary variance needs at least one edge");
  if (prior.edge_var.size() != graph.edge_count()) {
    throw DimensionError("edge variances do not match the graph");
  }
  double acc = 0.0;
  for (double v : prior.edge_var) acc += v;
  return acc / static_cast<double>(prior.edge_var.size());
}

}  // namespace rsm
