#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rsm/classifiers.hpp"
#include "rsm/core.hpp"

namespace rsm {

/// Per-measurement Gaussian fitted to controls only.
struct NormativeModel {
  std::vector<double> mean;
  std::vector<double> std;  // population std, floored
};

/// Uses the label-0 rows among `rows`; needs at least two of them. Standard
/// deviations are floored at 1e-6 * max(1, median positive std).
NormativeModel fit_normative(const Dataset& data, std::span<const std::size_t> rows);
NormativeModel fit_normative(const Dataset& data);

/// |f_j - mean_j| / std_j. Ordered like one minus the per-site likelihood
/// but comparable across sites.
EffectMap outlier_score_map(const NormativeModel& model, std::span<const double> sample);

/// Bootstrap-averaged map over all of `data`.
EffectMap wbs_map(const ClassifierSpec& spec, const Dataset& data,
                  std::span<const double> test_sample, std::size_t n_bs, std::uint64_t seed);

/// Single model trained on all of `data`.
EffectMap nbs_map(const ClassifierSpec& spec, const Dataset& data,
                  std::span<const double> test_sample);

}  // namespace rsm
