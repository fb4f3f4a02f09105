#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "rsm/core.hpp"

namespace rsm {

enum class ClassifierKind { ewgmm, svm, logreg_l2, logreg_l1 };

std::string_view to_string(ClassifierKind k);
ClassifierKind classifier_kind_from_string(std::string_view s);
inline bool is_linear(ClassifierKind k) { return k != ClassifierKind::ewgmm; }

/// Classifier choice plus its regularisation strength (ignored by ew-GMM).
struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::ewgmm;
  double eta = 1.0;
};

/// Posterior clamp applied before the probit transform.
inline constexpr double kPosteriorClamp = 1e-6;

/// Element-wise two-Gaussian model: one class-conditional Gaussian per class
/// and measurement, combined with class priors through Bayes' rule.
struct EwGmmModel {
  std::vector<double> mu0, sigma0, mu1, sigma1;
  double prior0 = 0.5;
  double prior1 = 0.5;

  std::size_t dim() const { return mu0.size(); }
  /// log p(y=1|f_j) - log p(y=0|f_j)
  double log_odds(std::size_t j, double f) const;
  double posterior(std::size_t j, double f) const;
};

/// Linear decision function w.f + b. Labels are mapped {0,1} -> {-1,+1}
/// internally by the trainers.
struct LinearModel {
  std::vector<double> w;
  double b = 0.0;
  ClassifierKind kind = ClassifierKind::svm;
  double eta = 0.0;

  std::size_t dim() const { return w.size(); }
  double decision(std::span<const double> f) const;
};

using Model = std::variant<EwGmmModel, LinearModel>;

// ---------------------------------------------------------------------------
// Training. `rows` selects (possibly repeated) dataset rows; the overloads
// without rows train on the whole dataset.

EwGmmModel train_ewgmm(const Dataset& data, std::span<const std::size_t> rows);
EwGmmModel train_ewgmm(const Dataset& data);

struct SvmOptions {
  double rel_gap = 1e-6;
  std::size_t max_iter = 100000;
};
/// Soft-margin linear SVM, min 1/2|w|^2 + eta * sum(hinge), unpenalised
/// intercept. Solved in the dual with SMO; stops on relative duality gap.
LinearModel train_linear_svm(const Dataset& data, std::span<const std::size_t> rows, double eta,
                             const SvmOptions& opt = {});
LinearModel train_linear_svm(const Dataset& data, double eta, const SvmOptions& opt = {});
/// Primal SVM objective at (w, b) on the given rows.
double svm_objective(const Dataset& data, std::span<const std::size_t> rows,
                     std::span<const double> w, double b, double eta);

enum class Penalty { L1, L2 };
struct LogregOptions {
  double rel_tol = 1e-6;
  std::size_t max_iter = 100000;
};
/// Penalised logistic regression: min sum log-loss + eta * R(w) with
/// R = 1/2 |w|_2^2 (L2) or |w|_1 (L1); the intercept is unpenalised.
LinearModel train_logreg(const Dataset& data, std::span<const std::size_t> rows, double eta,
                         Penalty penalty, const LogregOptions& opt = {});
LinearModel train_logreg(const Dataset& data, double eta, Penalty penalty,
                         const LogregOptions& opt = {});
double logreg_objective(const Dataset& data, std::span<const std::size_t> rows,
                        std::span<const double> w, double b, double eta, Penalty penalty);

Model train(const ClassifierSpec& spec, const Dataset& data, std::span<const std::size_t> rows);

// ---------------------------------------------------------------------------
// Effect maps

/// rho_j = Phi^{-1}(clamp(p(y=1|f_j)))
void ewgmm_effect_map(const EwGmmModel& model, std::span<const double> f, std::span<double> out);
EffectMap ewgmm_effect_map(const EwGmmModel& model, std::span<const double> f);

/// rho_j = w_j f_j (intercept excluded)
void linear_effect_map(const LinearModel& model, std::span<const double> f, std::span<double> out);
EffectMap linear_effect_map(const LinearModel& model, std::span<const double> f);

void effect_map(const Model& model, std::span<const double> f, std::span<double> out);
EffectMap effect_map(const Model& model, std::span<const double> f);
std::size_t model_dim(const Model& model);

int predict(const Model& model, std::span<const double> f);

// ---------------------------------------------------------------------------
// Regularisation tuning

/// 9 log-spaced values from 1e-3 to 1e3.
std::vector<double> default_eta_grid();

/// Grid value with best mean held-out accuracy over stratified folds of
/// `rows`; ties go to the smallest eta.
double tune_regularization(const Dataset& data, std::span<const std::size_t> rows,
                           ClassifierKind kind, std::size_t folds, std::uint64_t seed,
                           std::span<const double> grid);
double tune_regularization(const Dataset& data, ClassifierKind kind, std::size_t folds = 5,
                           std::uint64_t seed = 0);

// ---------------------------------------------------------------------------
// Resampling utilities shared by tuning and estimation

/// Stratified k-fold split of `rows`: each class is permuted with `seed`
/// and dealt round-robin across folds. Folds are returned sorted.
std::vector<std::vector<std::size_t>> stratified_folds(const Dataset& data,
                                                       std::span<const std::size_t> rows,
                                                       std::size_t k, std::uint64_t seed);
/// rows minus the members of `fold` (both sorted)
std::vector<std::size_t> complement(std::span<const std::size_t> rows,
                                    std::span<const std::size_t> fold);

}  // namespace rsm
