#include "rsm/synthdata.hpp"

#include <cmath>
#include <random>
#include <string>

#include "rsm/error.hpp"
#include "rsm/kernels.hpp"
#include "rsm/numerics.hpp"
#include "rsm/parallel.hpp"

namespace rsm::synth {

std::string_view to_string(NoiseScaling s) {
  return s == NoiseScaling::unit_variance ? "unit_variance" : "unit_sum";
}

NoiseScaling noise_scaling_from_string(std::string_view s) {
  if (s == "unit_variance") return NoiseScaling::unit_variance;
  if (s == "unit_sum") return NoiseScaling::unit_sum;
  throw ConfigError("unknown noise_scaling '" + std::string(s) + "'");
}

void SynthConfig::validate() const {
  if (width < kMinSide || height < kMinSide) {
    throw ConfigError("image must be at least " + std::to_string(kMinSide) + "x" +
                      std::to_string(kMinSide) + " for the effect geometry");
  }
  if (!(sigma_n > 0.0) || !(smooth_sigma > 0.0)) {
    throw ConfigError("sigma_n and smooth_sigma must be positive");
  }
  if (!(effect_size >= 0.0)) throw ConfigError("effect_size must be non-negative");
  if (n_controls == 0 || n_cases == 0) throw ConfigError("sample counts must be positive");
  if (n_cases % 2 != 0) throw ConfigError("n_cases must be even to split across effect types");
}

namespace {
void fill_square(BinaryEffectMap& m, std::size_t width, std::size_t row0, std::size_t col0,
                 std::size_t side) {
  for (std::size_t r = row0; r < row0 + side; ++r)
    for (std::size_t c = col0; c < col0 + side; ++c) m.detections[r * width + c] = 1;
}
}  // namespace

EffectMask effect_mask(EffectType type, std::size_t width, std::size_t height) {
  if (width < kMinSide || height < kMinSide) {
    throw ConfigError("image too small for effect geometry");
  }
  EffectMask out{BinaryEffectMap{std::vector<std::uint8_t>(width * height, 0)}, type, width,
                 height};
  fill_square(out.mask, width, (height - kCentralSide) / 2, (width - kCentralSide) / 2,
              kCentralSide);
  const std::size_t near = kCornerInset;
  const std::size_t far_r = height - kCornerInset - kCornerSide;
  const std::size_t far_c = width - kCornerInset - kCornerSide;
  if (type == EffectType::A) {
    fill_square(out.mask, width, near, near, kCornerSide);
    fill_square(out.mask, width, far_r, far_c, kCornerSide);
  } else {
    fill_square(out.mask, width, near, far_c, kCornerSide);
    fill_square(out.mask, width, far_r, near, kCornerSide);
  }
  return out;
}

std::vector<double> smoothing_kernel(double sigma, NoiseScaling scaling) {
  const auto radius = static_cast<long long>(std::ceil(4.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  for (long long t = -radius; t <= radius; ++t) {
    k[static_cast<std::size_t>(t + radius)] = std::exp(-0.5 * (t * t) / (sigma * sigma));
  }
  double norm = 0.0;
  if (scaling == NoiseScaling::unit_sum) {
    for (double v : k) norm += v;
  } else {
    for (double v : k) norm += v * v;
    norm = std::sqrt(norm);
  }
  for (auto& v : k) v /= norm;
  return k;
}

Sample generate_control_image(const SynthConfig& config, std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, config.sigma_n);
  std::vector<double> field(config.dim());
  for (auto& v : field) v = noise(rng);
  const auto kernel = smoothing_kernel(config.smooth_sigma, config.noise_scaling);
  Sample s{std::vector<double>(field.size()), 0};
  kernels::omp::smooth_separable(field, config.width, config.height, kernel, s.measurements);
  return s;
}

Sample generate_case_image(const SynthConfig& config, EffectType type, std::uint64_t seed) {
  Sample s = generate_control_image(config, seed);
  s.label = 1;
  const double shift = config.effect_size * config.sigma_n;
  const auto m = effect_mask(type, config.width, config.height);
  for (std::size_t j = 0; j < s.measurements.size(); ++j) {
    if (m.mask.detections[j]) s.measurements[j] += shift;
  }
  return s;
}

SyntheticData generate_dataset(const SynthConfig& config) {
  config.validate();
  const std::size_t n = config.n_controls + config.n_cases;
  std::vector<Sample> samples(n);
  std::vector<BinaryEffectMap> truth(n);
  const auto mask_a = effect_mask(EffectType::A, config.width, config.height);
  const auto mask_b = effect_mask(EffectType::B, config.width, config.height);
  parallel::for_each_index(n, [&](std::size_t i) {
    const auto seed = derive_seed(config.seed, {i});
    if (i < config.n_controls) {
      samples[i] = generate_control_image(config, seed);
      truth[i].detections.assign(config.dim(), 0);
    } else {
      const bool first_half = (i - config.n_controls) < config.n_cases / 2;
      const auto type = first_half ? EffectType::A : EffectType::B;
      samples[i] = generate_case_image(config, type, seed);
      truth[i] = (first_half ? mask_a : mask_b).mask;
    }
  });
  SyntheticData out{Dataset(config.dim()), std::move(truth)};
  for (const auto& s : samples) out.data.add(s);
  return out;
}

}  // namespace rsm::synth
