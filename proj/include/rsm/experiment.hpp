#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rsm/classifiers.hpp"
#include "rsm/reconstruct.hpp"
#include "rsm/synthdata.hpp"

namespace rsm {

/// Map-producing methods compared by the harness. The three rsm variants
/// differ only in the pairwise term.
enum class Method { nbs, wbs, rsm, rsm_stationary, rsm_unary, outlier };

std::string_view to_string(Method m);
Method method_from_string(std::string_view s);

/// Flat JSON object; every key is optional and unknown keys are rejected.
///
///   width height sigma_n smooth_sigma n_controls n_cases noise_scaling
///   effect_sizes classifiers methods lambdas l_fprs
///   shuffles folds n_bs use_cv observation eta tune_folds marker_noise seed
///
/// eta <= 0 tunes linear classifiers on every outer training set.
struct ExperimentConfig {
  synth::SynthConfig synth;
  std::vector<double> effect_sizes{0.6, 1.0, 1.4, 2.0};
  std::vector<ClassifierKind> classifiers{ClassifierKind::ewgmm, ClassifierKind::svm,
                                          ClassifierKind::logreg_l2, ClassifierKind::logreg_l1};
  std::vector<Method> methods{Method::wbs, Method::rsm, Method::outlier};
  std::vector<double> lambdas{0.5, 1.0, 2.0, 5.0};
  std::vector<double> l_fprs{0.01, 0.001};
  std::size_t shuffles = 10;
  std::size_t folds = 5;
  std::size_t n_bs = 100;
  bool use_cv = true;
  Observation observation = Observation::single_model;
  double eta = 0.0;
  std::size_t tune_folds = 5;
  double marker_noise = 100.0;
  std::uint64_t seed = 1;

  void validate() const;
};

nlohmann::json experiment_config_to_json(const ExperimentConfig& c);
/// Starts from `base` and overrides the keys present in `j`.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j,
                                             const ExperimentConfig& base = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// FNV-1a of the canonical JSON form, as 16 hex digits.
std::string config_hash(const nlohmann::json& canonical);

struct ReportKey {
  double effect_size = 0.0;
  ClassifierKind classifier = ClassifierKind::ewgmm;
  Method method = Method::wbs;
  double lambda = 0.0;
  double l_fpr = 0.0;
};

struct FoldRow {
  ReportKey key;
  std::size_t shuffle = 0;
  std::size_t fold = 0;
  double eta = 0.0;
  double tau = 0.0;
  std::size_t n_cases = 0;
  std::size_t n_controls = 0;
  double dsc_mean = 0.0;  // over the fold's cases
  double fpr_mean = 0.0;  // over the fold's controls
};

struct ShuffleRow {
  ReportKey key;
  std::size_t shuffle = 0;
  double dsc_mean = 0.0;
  double fpr_mean = 0.0;
  double marker_r = 0.0;        // detections vs noiseless marker
  double marker_r_noisy = 0.0;  // detections vs noisy marker
  double count_t = 0.0;         // Welch t of detection counts, cases - controls
};

struct SummaryRow {
  ReportKey key;
  double dsc_mean = 0.0;  // mean over shuffles
  double dsc_sd = 0.0;    // sample sd over shuffles
  double fpr_mean = 0.0;
  double fpr_sd = 0.0;
  double marker_r = 0.0;
  double marker_r_noisy = 0.0;
  double count_t = 0.0;
};

struct ExperimentReport {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<FoldRow> folds;
  std::vector<ShuffleRow> shuffles;
  std::vector<SummaryRow> summary;  // effect, classifier, method, lambda, l_fpr order

  const SummaryRow& find(double effect_size, ClassifierKind c, Method m, double lambda,
                         double l_fpr) const;
};

/// Shuffled k-fold protocol. Per outer fold: classifier, noise ensemble and
/// prior on the training part; thresholds from an inner k-fold over the
/// training part; every held-out sample mapped and thresholded.
ExperimentReport run_experiment(const ExperimentConfig& config);

std::string folds_csv(const ExperimentReport& r);
std::string shuffles_csv(const ExperimentReport& r);
std::string summary_csv(const ExperimentReport& r);

/// folds.csv, shuffles.csv, summary.csv and config.json under `dir`.
void write_report(const ExperimentReport& r, const ExperimentConfig& config,
                  const std::filesystem::path& dir);

}  // namespace rsm
