#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace rsm {

/// Standard normal quantile, Phi^{-1}(p) for p in (0,1).
double normal_quantile(double p);

/// Probit of a posterior given as log-odds log(p / (1-p)), with p clamped
/// to [eps, 1-eps]. Works on the smaller tail so large |log_odds| keep
/// full precision; antisymmetric in log_odds.
double probit_from_log_odds(double log_odds, double eps);

/// Population (divide-by-n) mean and variance over rows of a row-major
/// `rows x dim` block, accumulated in row order.
struct Moments {
  std::vector<double> mean;
  std::vector<double> variance;
};
Moments column_moments(std::span<const double> block, std::size_t rows, std::size_t dim);

/// Median of the strictly positive entries, or 0 if none.
double median_positive(std::span<const double> values);

/// splitmix64-based stream derivation: a fixed function of (base, tags...)
/// so every job gets its own reproducible seed regardless of scheduling.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags);

}  // namespace rsm
