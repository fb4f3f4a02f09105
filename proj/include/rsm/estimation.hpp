#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rsm/classifiers.hpp"
#include "rsm/core.hpp"

namespace rsm {

/// Per-site observation noise of one test sample's effect map, and the
/// bootstrap mean map (the WBS estimate).
struct NoiseEstimate {
  std::vector<double> sigma2;
  EffectMap mean_map{{}, MapRole::bootstrap_mean};
};

/// Gaussian-MRF prior parameters. Edge arrays follow graph edge order.
struct PriorParams {
  std::vector<double> node_var;       // population variance of each site
  std::vector<double> edge_var;       // population variance of site differences
  std::vector<double> edge_mean;      // mean site difference (kept for audit)
  std::vector<double> mean_of_means;  // across-sample mean of the mean maps
  double stationary_var = 0.0;        // mean of edge_var over edges
};

/// Resample `rows` with replacement, class by class, keeping class counts.
std::vector<std::size_t> stratified_bootstrap(const Dataset& data,
                                              std::span<const std::size_t> rows,
                                              std::uint64_t seed);
std::vector<std::size_t> stratified_bootstrap(const Dataset& data, std::uint64_t seed);

/// Population moments over replicate maps: sigma2_j and mean_j over the
/// n_bs rows of a row-major (n_bs x d) block.
NoiseEstimate noise_from_maps(std::span<const double> maps, std::size_t n_bs, std::size_t d);

/// N_bs classifiers trained on stratified bootstrap replicates of one
/// training set. Replicate r uses seed derive_seed(seed, {r}).
class BootstrapEnsemble {
 public:
  BootstrapEnsemble() = default;
  BootstrapEnsemble(const ClassifierSpec& spec, const Dataset& data,
                    std::span<const std::size_t> rows, std::size_t n_bs, std::uint64_t seed);

  std::size_t size() const noexcept { return models_.size(); }
  const Model& model(std::size_t r) const { return models_[r]; }

  /// Row-major (n_bs x d) block of replicate maps for one sample.
  std::vector<double> replicate_maps(std::span<const double> f) const;
  NoiseEstimate noise_and_mean(std::span<const double> f) const;
  /// Mean over replicates, accumulated in replicate order.
  void mean_map(std::span<const double> f, std::span<double> out) const;

 private:
  std::vector<Model> models_;
};

NoiseEstimate estimate_noise_and_mean(const ClassifierSpec& spec, const Dataset& data,
                                      std::span<const double> test_sample, std::size_t n_bs,
                                      std::uint64_t seed);

/// Bootstrap-average map for every listed training row, row-major
/// (rows.size() x d). With use_cv each row's map comes only from models
/// trained on the other folds; otherwise from replicates of all of `rows`.
std::vector<double> training_mean_maps(const ClassifierSpec& spec, const Dataset& data,
                                       std::span<const std::size_t> rows, std::size_t folds,
                                       std::size_t n_bs, std::uint64_t seed, bool use_cv);

/// Node and edge variances from a matrix of per-sample mean maps, floored.
PriorParams prior_from_mean_maps(std::span<const double> maps, std::size_t n, std::size_t d,
                                 const NeighborhoodGraph& graph);

PriorParams estimate_prior_params(const ClassifierSpec& spec, const Dataset& data,
                                  std::span<const std::size_t> rows,
                                  const NeighborhoodGraph& graph, std::size_t folds,
                                  std::size_t n_bs, std::uint64_t seed, bool use_cv);

/// Mean of edge_var over the graph's edges; throws on an empty edge set.
double stationary_variance(const PriorParams& prior, const NeighborhoodGraph& graph);

/// 1e-12 * max(1, median of the positive entries).
double variance_floor(std::span<const double> values);

}  // namespace rsm
