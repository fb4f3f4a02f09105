#include "rsm/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "rsm/error.hpp"
#include "rsm/numerics.hpp"

namespace rsm {

std::string_view to_string(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::ewgmm: return "ewgmm";
    case ClassifierKind::svm: return "svm";
    case ClassifierKind::logreg_l2: return "logreg_l2";
    case ClassifierKind::logreg_l1: return "logreg_l1";
  }
  return "unknown";
}

ClassifierKind classifier_kind_from_string(std::string_view s) {
  if (s == "ewgmm") return ClassifierKind::ewgmm;
  if (s == "svm") return ClassifierKind::svm;
  if (s == "logreg_l2") return ClassifierKind::logreg_l2;
  if (s == "logreg_l1") return ClassifierKind::logreg_l1;
  throw ConfigError("unknown classifier '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// ew-GMM

double EwGmmModel::log_odds(std::size_t j, double f) const {
  const double z1 = (f - mu1[j]) / sigma1[j];
  const double z0 = (f - mu0[j]) / sigma0[j];
  return std::log(prior1 / prior0) + std::log(sigma0[j] / sigma1[j]) - 0.5 * z1 * z1 +
         0.5 * z0 * z0;
}

double EwGmmModel::posterior(std::size_t j, double f) const {
  return 1.0 / (1.0 + std::exp(-log_odds(j, f)));
}

EwGmmModel train_ewgmm(const Dataset& data, std::span<const std::size_t> rows) {
  data.require_both_classes(rows);
  const std::size_t d = data.dim();
  EwGmmModel m;
  m.mu0.assign(d, 0.0);
  m.mu1.assign(d, 0.0);
  m.sigma0.assign(d, 0.0);
  m.sigma1.assign(d, 0.0);
  std::size_t n0 = 0, n1 = 0;
  for (auto r : rows) {
    auto& mu = data.label(r) ? m.mu1 : m.mu0;
    ++(data.label(r) ? n1 : n0);
    auto x = data.row(r);
    for (std::size_t j = 0; j < d; ++j) mu[j] += x[j];
  }
  for (std::size_t j = 0; j < d; ++j) {
    m.mu0[j] /= static_cast<double>(n0);
    m.mu1[j] /= static_cast<double>(n1);
  }
  double grand_sum = 0.0;
  for (auto r : rows) {
    const bool case_row = data.label(r) != 0;
    const auto& mu = case_row ? m.mu1 : m.mu0;
    auto& var = case_row ? m.sigma1 : m.sigma0;
    auto x = data.row(r);
    for (std::size_t j = 0; j < d; ++j) {
      const double dev = x[j] - mu[j];
      var[j] += dev * dev;
      grand_sum += x[j];
    }
  }
  // Floor: 1e-6 of the pooled std over all training values.
  const double total = static_cast<double>(rows.size() * d);
  const double grand_mean = grand_sum / total;
  double grand_var = 0.0;
  for (auto r : rows)
    for (double v : data.row(r)) grand_var += (v - grand_mean) * (v - grand_mean);
  grand_var /= total;
  const double floor = grand_var > 0.0 ? 1e-6 * std::sqrt(grand_var) : 1e-6;
  for (std::size_t j = 0; j < d; ++j) {
    m.sigma0[j] = std::max(std::sqrt(m.sigma0[j] / static_cast<double>(n0)), floor);
    m.sigma1[j] = std::max(std::sqrt(m.sigma1[j] / static_cast<double>(n1)), floor);
  }
  m.prior1 = static_cast<double>(n1) / static_cast<double>(rows.size());
  m.prior0 = static_cast<double>(n0) / static_cast<double>(rows.size());
  return m;
}

EwGmmModel train_ewgmm(const Dataset& data) {
  auto rows = data.all_rows();
  return train_ewgmm(data, rows);
}

void ewgmm_effect_map(const EwGmmModel& model, std::span<const double> f, std::span<double> out) {
  if (f.size() != model.dim() || out.size() != model.dim()) {
    throw DimensionError("ew-GMM effect map: sample has " + std::to_string(f.size()) +
                         " measurements, model has " + std::to_string(model.dim()));
  }
  const double prior_term = std::log(model.prior1 / model.prior0);
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double z1 = (f[j] - model.mu1[j]) / model.sigma1[j];
    const double z0 = (f[j] - model.mu0[j]) / model.sigma0[j];
    const double lo =
        prior_term + std::log(model.sigma0[j] / model.sigma1[j]) - 0.5 * z1 * z1 + 0.5 * z0 * z0;
    out[j] = probit_from_log_odds(lo, kPosteriorClamp);
  }
}

EffectMap ewgmm_effect_map(const EwGmmModel& model, std::span<const double> f) {
  EffectMap m{std::vector<double>(model.dim()), MapRole::raw};
  ewgmm_effect_map(model, f, m.values);
  return m;
}

// ---------------------------------------------------------------------------
// Linear models

double LinearModel::decision(std::span<const double> f) const {
  if (f.size() != w.size()) throw DimensionError("linear model: dimension mismatch");
  double acc = b;
  for (std::size_t j = 0; j < f.size(); ++j) acc += w[j] * f[j];
  return acc;
}

void linear_effect_map(const LinearModel& model, std::span<const double> f,
                       std::span<double> out) {
  if (f.size() != model.dim() || out.size() != model.dim()) {
    throw DimensionError("linear effect map: sample has " + std::to_string(f.size()) +
                         " measurements, model has " + std::to_string(model.dim()));
  }
  for (std::size_t j = 0; j < f.size(); ++j) out[j] = model.w[j] * f[j];
}

EffectMap linear_effect_map(const LinearModel& model, std::span<const double> f) {
  EffectMap m{std::vector<double>(model.dim()), MapRole::raw};
  linear_effect_map(model, f, m.values);
  return m;
}

LinearModel train_linear_svm(const Dataset& data, double eta, const SvmOptions& opt) {
  auto rows = data.all_rows();
  return train_linear_svm(data, rows, eta, opt);
}

LinearModel train_logreg(const Dataset& data, double eta, Penalty penalty,
                         const LogregOptions& opt) {
  auto rows = data.all_rows();
  return train_logreg(data, rows, eta, penalty, opt);
}

Model train(const ClassifierSpec& spec, const Dataset& data, std::span<const std::size_t> rows) {
  switch (spec.kind) {
    case ClassifierKind::ewgmm: return train_ewgmm(data, rows);
    case ClassifierKind::svm: return train_linear_svm(data, rows, spec.eta);
    case ClassifierKind::logreg_l2: return train_logreg(data, rows, spec.eta, Penalty::L2);
    case ClassifierKind::logreg_l1: return train_logreg(data, rows, spec.eta, Penalty::L1);
  }
  throw ConfigError("unknown classifier kind");
}

void effect_map(const Model& model, std::span<const double> f, std::span<double> out) {
  if (const auto* g = std::get_if<EwGmmModel>(&model)) {
    ewgmm_effect_map(*g, f, out);
  } else {
    linear_effect_map(std::get<LinearModel>(model), f, out);
  }
}

EffectMap effect_map(const Model& model, std::span<const double> f) {
  EffectMap m{std::vector<double>(model_dim(model)), MapRole::raw};
  effect_map(model, f, m.values);
  return m;
}

std::size_t model_dim(const Model& model) {
  return std::visit([](const auto& m) { return m.dim(); }, model);
}

int predict(const Model& model, std::span<const double> f) {
  if (const auto* g = std::get_if<EwGmmModel>(&model)) {
    // naive-Bayes combination of the per-measurement likelihoods
    if (f.size() != g->dim()) throw DimensionError("ew-GMM predict: dimension mismatch");
    const double prior_term = std::log(g->prior1 / g->prior0);
    double acc = prior_term;
    for (std::size_t j = 0; j < f.size(); ++j) acc += g->log_odds(j, f[j]) - prior_term;
    return acc > 0.0 ? 1 : 0;
  }
  return std::get<LinearModel>(model).decision(f) > 0.0 ? 1 : 0;
}

// ---------------------------------------------------------------------------
// Resampling and tuning

std::vector<std::vector<std::size_t>> stratified_folds(const Dataset& data,
                                                       std::span<const std::size_t> rows,
                                                       std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("need at least 2 folds");
  if (rows.size() < k) {
    throw ConfigError("cannot split " + std::to_string(rows.size()) + " samples into " +
                      std::to_string(k) + " folds");
  }
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t offset = 0;
  for (int cls = 0; cls < 2; ++cls) {
    std::vector<std::size_t> members;
    for (auto r : rows)
      if (data.label(r) == cls) members.push_back(r);
    std::mt19937_64 rng(derive_seed(seed, {static_cast<std::uint64_t>(cls)}));
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t i = 0; i < members.size(); ++i) folds[(offset + i) % k].push_back(members[i]);
    offset += members.size();
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

std::vector<std::size_t> complement(std::span<const std::size_t> rows,
                                    std::span<const std::size_t> fold) {
  std::vector<std::size_t> a(rows.begin(), rows.end());
  std::sort(a.begin(), a.end());
  std::vector<std::size_t> out;
  std::set_difference(a.begin(), a.end(), fold.begin(), fold.end(), std::back_inserter(out));
  return out;
}

std::vector<double> default_eta_grid() {
  std::vector<double> g;
  for (int i = 0; i < 9; ++i) g.push_back(std::pow(10.0, -3.0 + 0.75 * i));
  return g;
}

double tune_regularization(const Dataset& data, std::span<const std::size_t> rows,
                           ClassifierKind kind, std::size_t folds, std::uint64_t seed,
                           std::span<const double> grid) {
  if (grid.empty()) throw ConfigError("empty regularisation grid");
  if (kind == ClassifierKind::ewgmm) return grid.front();
  data.require_both_classes(rows);
  std::vector<double> ascending(grid.begin(), grid.end());
  std::sort(ascending.begin(), ascending.end());
  const auto split = stratified_folds(data, rows, folds, seed);
  double best_acc = -1.0;
  double best_eta = grid.front();
  bool any = false;
  for (double eta : ascending) {
    double acc_sum = 0.0;
    bool failed = false;
    for (const auto& held : split) {
      const auto train_rows = complement(rows, held);
      try {
        const auto model = train({kind, eta}, data, train_rows);
        std::size_t correct = 0;
        for (auto r : held) correct += predict(model, data.row(r)) == data.label(r);
        acc_sum += static_cast<double>(correct) / static_cast<double>(held.size());
      } catch (const TrainingError&) {
        // a grid point the solver cannot fit is not a candidate
        failed = true;
        break;
      }
    }
    if (failed) continue;
    const double acc = acc_sum / static_cast<double>(split.size());
    if (!any || acc > best_acc) {
      best_acc = acc;
      best_eta = eta;
      any = true;
    }
  }
  if (!any) throw TrainingError("no regularisation value could be fitted");
  return best_eta;
}

double tune_regularization(const Dataset& data, ClassifierKind kind, std::size_t folds,
                           std::uint64_t seed) {
  auto rows = data.all_rows();
  const auto grid = default_eta_grid();
  return tune_regularization(data, rows, kind, folds, seed, grid);
}

}  // namespace rsm
