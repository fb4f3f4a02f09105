#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "rsm/classifiers.hpp"
#include "rsm/core.hpp"
#include "rsm/estimation.hpp"
#include "rsm/kernels.hpp"

namespace rsm {

enum class PairwiseMode { nonstationary, stationary, none };

std::string_view to_string(PairwiseMode m);
PairwiseMode pairwise_mode_from_string(std::string_view s);

/// Which map plays the role of the observation in the MAP system.
///  single_model:   map of one classifier trained on the full training set
///  bootstrap_mean: the bootstrap mean map
enum class Observation { single_model, bootstrap_mean };

std::string_view to_string(Observation o);
Observation observation_from_string(std::string_view s);

struct RsmConfig {
  double lambda = 1.0;
  double l_fpr = 0.01;
  std::size_t n_bs = 100;
  std::size_t folds = 5;
  PairwiseMode pairwise_mode = PairwiseMode::nonstationary;
  std::uint64_t seed = 0;
  bool use_cv = true;
  Observation observation = Observation::single_model;

  void validate() const;
};

/// Symmetric positive definite system A rho = rhs. Nodes with zero noise
/// variance are pinned: identity row, rhs = observed value, and their
/// coupling moved to the neighbours' right-hand sides.
struct MapSystem {
  CsrMatrix a;
  std::vector<double> rhs;
  std::vector<std::uint8_t> pinned;
};

/// Row j (free):  (1/s_j + 1/v_j + lambda sum_k 1/v_jk) rho_j
///                - lambda sum_k rho_k / v_jk = obs_j / s_j
/// with s = noise variance, v_j = node variance, v_jk = edge variance
/// (the stationary mean in stationary mode; no pairwise block for `none`).
MapSystem assemble_system(const EffectMap& observed, std::span<const double> sigma2,
                          const PriorParams& prior, double lambda,
                          const NeighborhoodGraph& graph, PairwiseMode mode);

struct SolveOptions {
  double rel_tol = 1e-12;     // target on |A x - b| / |b|
  std::size_t max_iter = 0;   // 0: 10 * n
  bool parallel_spmv = false; // OpenMP mat-vec; same iterates either way
  bool direct_fallback = true; // sparse LDLT if CG misses the residual bound
};

struct SolveStats {
  std::size_t iterations = 0;
  double rel_residual = 0.0;
  bool direct = false;
};

/// Jacobi-preconditioned conjugate gradients. Badly conditioned systems
/// (tiny training sets drive variances to their floors) can stall CG; those
/// are refactored with a sparse LDLT. Throws SolverError if the final
/// |A x - b| > 1e-8 |b|.
EffectMap solve_map(const MapSystem& system, const SolveOptions& opt = {},
                    SolveStats* stats = nullptr);

// ---------------------------------------------------------------------------
// Pipeline pieces

/// Everything fitted on one training set that is needed to reconstruct
/// maps of unseen samples.
struct FittedRsm {
  ClassifierSpec spec;
  Model full_model;
  BootstrapEnsemble ensemble;
  PriorParams prior;
};

FittedRsm fit_rsm(const ClassifierSpec& spec, const Dataset& data,
                  std::span<const std::size_t> rows, const NeighborhoodGraph& graph,
                  const RsmConfig& config, std::uint64_t seed, bool with_prior = true);

/// Per-sample inputs to the MAP solve.
struct SampleEvidence {
  EffectMap raw;        // single full-training-set model
  NoiseEstimate noise;  // sigma^2 and bootstrap mean
};

SampleEvidence gather_evidence(const FittedRsm& fit, std::span<const double> f);

EffectMap reconstruct(const SampleEvidence& ev, const PriorParams& prior, double lambda,
                      PairwiseMode mode, const NeighborhoodGraph& graph,
                      Observation observation = Observation::single_model,
                      const SolveOptions& opt = {});

/// Trains the full-data model and bootstrap ensemble on `data`, then solves
/// for `test_sample` with the supplied prior.
EffectMap reconstruct_for_sample(const ClassifierSpec& spec, const Dataset& data,
                                 const PriorParams& prior, const RsmConfig& config,
                                 const NeighborhoodGraph& graph,
                                 std::span<const double> test_sample);

}  // namespace rsm
