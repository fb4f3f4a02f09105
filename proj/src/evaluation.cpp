#include "rsm/evaluation.hpp"

#include <cmath>

#include "rsm/error.hpp"

namespace rsm {

double dsc(const BinaryEffectMap& q, const BinaryEffectMap& truth) {
  if (q.size() != truth.size()) throw DimensionError("dsc: maps differ in length");
  std::size_t both = 0, nq = 0, nt = 0;
  for (std::size_t j = 0; j < q.size(); ++j) {
    const bool a = q.detections[j] != 0, b = truth.detections[j] != 0;
    nq += a;
    nt += b;
    both += a && b;
  }
  if (nq + nt == 0) return 1.0;
  return 2.0 * static_cast<double>(both) / static_cast<double>(nq + nt);
}

double fpr(const BinaryEffectMap& q) {
  if (q.size() == 0) return 0.0;
  return static_cast<double>(q.count()) / static_cast<double>(q.size());
}

std::vector<std::size_t> occurrence_map(std::span<const BinaryEffectMap> maps, std::size_t dim) {
  if (!maps.empty()) dim = maps.front().size();
  std::vector<std::size_t> counts(dim, 0);
  for (const auto& m : maps) {
    if (m.size() != dim) throw DimensionError("occurrence_map: maps differ in length");
    for (std::size_t j = 0; j < dim; ++j) counts[j] += m.detections[j] != 0;
  }
  return counts;
}

namespace {
double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}
}  // namespace

double pearson_corr(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("pearson_corr: lengths differ");
  if (x.size() < 3) throw ConfigError("pearson_corr: need at least 3 points");
  const double mx = mean_of(x), my = mean_of(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw ConfigError("pearson_corr: zero variance");
  return sxy / std::sqrt(sxx * syy);
}

double group_t_stat(std::span<const double> cases, std::span<const double> controls) {
  if (cases.size() < 2 || controls.size() < 2) {
    throw ConfigError("group_t_stat: each group needs at least 2 values");
  }
  auto var = [](std::span<const double> v, double m) {
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
  };
  const double m1 = mean_of(cases), m0 = mean_of(controls);
  const double se2 = var(cases, m1) / static_cast<double>(cases.size()) +
                     var(controls, m0) / static_cast<double>(controls.size());
  if (se2 == 0.0) throw ConfigError("group_t_stat: zero variance");
  return (m1 - m0) / std::sqrt(se2);
}

}  // namespace rsm
