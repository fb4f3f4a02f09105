#include "rsm/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/erf.hpp>

#include "rsm/error.hpp"

namespace rsm {

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error("normal_quantile: p must lie in (0,1)");
  if (p < 0.5) return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
  return std::sqrt(2.0) * boost::math::erfc_inv(2.0 * (1.0 - p));
}

double probit_from_log_odds(double log_odds, double eps) {
  // tail = min(p, 1-p) computed directly from the log-odds
  const double tail = 1.0 / (1.0 + std::exp(std::fabs(log_odds)));
  const double t = std::max(tail, eps);
  const double z = std::sqrt(2.0) * boost::math::erfc_inv(2.0 * t);
  return log_odds >= 0.0 ? z : -z;
}

Moments column_moments(std::span<const double> block, std::size_t rows, std::size_t dim) {
  Moments m{std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0)};
  if (rows == 0) return m;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* x = block.data() + r * dim;
    for (std::size_t j = 0; j < dim; ++j) m.mean[j] += x[j];
  }
  const double inv = 1.0 / static_cast<double>(rows);
  for (auto& v : m.mean) v *= inv;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* x = block.data() + r * dim;
    for (std::size_t j = 0; j < dim; ++j) {
      const double dev = x[j] - m.mean[j];
      m.variance[j] += dev * dev;
    }
  }
  for (auto& v : m.variance) v *= inv;
  return m;
}

double median_positive(std::span<const double> values) {
  std::vector<double> pos;
  for (double v : values)
    if (v > 0.0) pos.push_back(v);
  if (pos.empty()) return 0.0;
  const auto mid = pos.size() / 2;
  std::nth_element(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(mid), pos.end());
  double hi = pos[mid];
  if (pos.size() % 2 == 1) return hi;
  double lo = *std::max_element(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = splitmix64(base);
  for (auto t : tags) h = splitmix64(h ^ splitmix64(t + 0x632be59bd9b4e019ULL));
  return h;
}

}  // namespace rsm
