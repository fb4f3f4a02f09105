#pragma once

#include <span>
#include <vector>

#include "rsm/core.hpp"

namespace rsm {

/// 2|q & t| / (|q| + |t|); 1 when both are empty.
double dsc(const BinaryEffectMap& q, const BinaryEffectMap& truth);

/// |q| / d
double fpr(const BinaryEffectMap& q);

/// Per-site detection counts across maps.
std::vector<std::size_t> occurrence_map(std::span<const BinaryEffectMap> maps,
                                        std::size_t dim = 0);

/// Sample Pearson correlation. Needs n >= 3 and nonzero variance in both.
double pearson_corr(std::span<const double> x, std::span<const double> y);

/// Welch two-sample t statistic (case mean minus control mean). Each group
/// needs n >= 2; throws if both sample variances are zero.
double group_t_stat(std::span<const double> cases, std::span<const double> controls);

}  // namespace rsm
