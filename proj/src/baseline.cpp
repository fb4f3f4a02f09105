#include "rsm/baseline.hpp"

#include <algorithm>
#include <cmath>

#include "rsm/error.hpp"
#include "rsm/estimation.hpp"
#include "rsm/numerics.hpp"

namespace rsm {

NormativeModel fit_normative(const Dataset& data, std::span<const std::size_t> rows) {
  std::vector<std::size_t> controls;
  for (auto r : rows)
    if (data.label(r) == 0) controls.push_back(r);
  if (controls.size() < 2) throw TrainingError("normative model needs at least two controls");

  const std::size_t d = data.dim();
  std::vector<double> block;
  block.reserve(controls.size() * d);
  for (auto r : controls) {
    auto x = data.row(r);
    block.insert(block.end(), x.begin(), x.end());
  }
  auto m = column_moments(block, controls.size(), d);
  NormativeModel model;
  model.mean = std::move(m.mean);
  model.std.resize(d);
  for (std::size_t j = 0; j < d; ++j) model.std[j] = std::sqrt(m.variance[j]);
  const double floor = 1e-6 * std::max(1.0, median_positive(model.std));
  for (auto& s : model.std) s = std::max(s, floor);
  return model;
}

NormativeModel fit_normative(const Dataset& data) {
  const auto rows = data.all_rows();
  return fit_normative(data, rows);
}

EffectMap outlier_score_map(const NormativeModel& model, std::span<const double> sample) {
  if (sample.size() != model.mean.size()) throw DimensionError("sample dimension mismatch");
  EffectMap out{std::vector<double>(sample.size()), MapRole::raw};
  for (std::size_t j = 0; j < sample.size(); ++j) {
    out.values[j] = std::abs(sample[j] - model.mean[j]) / model.std[j];
  }
  return out;
}

EffectMap wbs_map(const ClassifierSpec& spec, const Dataset& data,
                  std::span<const double> test_sample, std::size_t n_bs, std::uint64_t seed) {
  return estimate_noise_and_mean(spec, data, test_sample, n_bs, seed).mean_map;
}

EffectMap nbs_map(const ClassifierSpec& spec, const Dataset& data,
                  std::span<const double> test_sample) {
  if (test_sample.size() != data.dim()) throw DimensionError("test sample dimension mismatch");
  const auto rows = data.all_rows();
  return effect_map(train(spec, data, rows), test_sample);
}

}  // namespace rsm
