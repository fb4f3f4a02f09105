#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "rsm/core.hpp"

namespace rsm::synth {

enum class EffectType { A, B };

/// How the smoothing kernel is normalised.
///  unit_variance: kernel scaled to unit L2 norm, so smoothed noise keeps
///                 per-pixel std sigma_n and effect sizes are in units of
///                 the observed noise.
///  unit_sum:      kernel sums to 1 (a plain blur); per-pixel std drops to
///                 about sigma_n / (2 sqrt(pi) smooth_sigma).
enum class NoiseScaling { unit_variance, unit_sum };

std::string_view to_string(NoiseScaling s);
NoiseScaling noise_scaling_from_string(std::string_view s);

struct SynthConfig {
  std::size_t width = 100;
  std::size_t height = 100;
  double sigma_n = 50.0;
  double smooth_sigma = 2.5;
  double effect_size = 1.4;  // multiple of sigma_n
  std::size_t n_controls = 100;
  std::size_t n_cases = 100;
  std::uint64_t seed = 1;
  NoiseScaling noise_scaling = NoiseScaling::unit_variance;

  void validate() const;
  std::size_t dim() const { return width * height; }
};

struct EffectMask {
  BinaryEffectMap mask;
  EffectType type = EffectType::A;
  std::size_t width = 0;
  std::size_t height = 0;
};

// Geometry: a 20x20 central square shared by both types, plus two 14x14
// squares inset 10 px from the borders: top-left and bottom-right for A,
// top-right and bottom-left for B.
inline constexpr std::size_t kCentralSide = 20;
inline constexpr std::size_t kCornerSide = 14;
inline constexpr std::size_t kCornerInset = 10;
inline constexpr std::size_t kMinSide = 2 * (kCornerInset + kCornerSide);

EffectMask effect_mask(EffectType type, std::size_t width, std::size_t height);

/// Truncated (4 sigma) Gaussian, odd length, normalised per `scaling`.
std::vector<double> smoothing_kernel(double sigma, NoiseScaling scaling);

Sample generate_control_image(const SynthConfig& config, std::uint64_t seed);
Sample generate_case_image(const SynthConfig& config, EffectType type, std::uint64_t seed);

struct SyntheticData {
  Dataset data;
  std::vector<BinaryEffectMap> truth;  // all-zero for controls
};

/// Controls first (label 0), then cases: first half type A, second half B.
/// Sample i uses stream seed derive_seed(config.seed, {i}).
SyntheticData generate_dataset(const SynthConfig& config);

}  // namespace rsm::synth
