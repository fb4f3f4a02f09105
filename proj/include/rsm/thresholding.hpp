#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rsm/core.hpp"
#include "rsm/reconstruct.hpp"

namespace rsm {

struct Threshold {
  double tau = 0.0;
  double l_fpr = 0.0;
  std::size_t n_control_maps = 0;
};

/// Smallest t with #{pooled values > t} <= l_fpr * d * N0, found by sorting.
/// The result is always one of the pooled values.
Threshold compute_threshold(std::span<const EffectMap> control_maps, double l_fpr);

/// Same on an already pooled block of n_maps maps (values may be in any order).
Threshold threshold_from_pooled(std::vector<double> pooled, std::size_t n_maps, double l_fpr);

/// Golden-section search on the exceedance step function. Keeps an infeasible
/// lower and a feasible upper bracket and returns the upper end once the
/// bracket is narrower than `tol` (0 picks 1e-12 of the value range).
double golden_section_threshold(std::span<const double> pooled, double l_fpr, double tol = 0.0);

BinaryEffectMap threshold_map(const EffectMap& map, double tau);

/// Prior and held-out control evidence of one calibration fold.
struct CalibrationFold {
  PriorParams prior;
  std::vector<std::size_t> control_rows;
  std::vector<SampleEvidence> controls;
};

/// k-fold loop over `rows`: each fold fits classifier, prior and noise
/// ensemble on its training part and gathers evidence for held-out controls.
/// Split seed derive_seed(config.seed, {20}); fold f fitted with
/// derive_seed(config.seed, {21, f}).
std::vector<CalibrationFold> calibration_folds(const ClassifierSpec& spec, const Dataset& data,
                                               std::span<const std::size_t> rows,
                                               const NeighborhoodGraph& graph,
                                               const RsmConfig& config, bool with_prior = true);

/// Threshold for RSM maps of the given configuration from calibration folds.
Threshold threshold_from_folds(std::span<const CalibrationFold> folds,
                               const NeighborhoodGraph& graph, const RsmConfig& config);

Threshold cv_threshold(const ClassifierSpec& spec, const Dataset& data,
                       std::span<const std::size_t> rows, const NeighborhoodGraph& graph,
                       const RsmConfig& config);
Threshold cv_threshold(const ClassifierSpec& spec, const Dataset& data,
                       const NeighborhoodGraph& graph, const RsmConfig& config);

}  // namespace rsm
