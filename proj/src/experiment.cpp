#include "rsm/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>

#include "rsm/baseline.hpp"
#include "rsm/error.hpp"
#include "rsm/evaluation.hpp"
#include "rsm/io.hpp"
#include "rsm/numerics.hpp"
#include "rsm/parallel.hpp"
#include "rsm/thresholding.hpp"

namespace rsm {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::nbs: return "nbs";
    case Method::wbs: return "wbs";
    case Method::rsm: return "rsm";
    case Method::rsm_stationary: return "rsm_stationary";
    case Method::rsm_unary: return "rsm_unary";
    case Method::outlier: return "outlier";
  }
  return "unknown";
}

Method method_from_string(std::string_view s) {
  for (auto m : {Method::nbs, Method::wbs, Method::rsm, Method::rsm_stationary, Method::rsm_unary,
                 Method::outlier}) {
    if (s == to_string(m)) return m;
  }
  throw ConfigError("unknown method '" + std::string(s) + "'");
}

void ExperimentConfig::validate() const {
  synth.validate();
  if (effect_sizes.empty() || classifiers.empty() || methods.empty() || lambdas.empty() ||
      l_fprs.empty()) {
    throw ConfigError("experiment lists must be non-empty");
  }
  for (double e : effect_sizes)
    if (!(e >= 0.0)) throw ConfigError("effect sizes must be non-negative");
  for (double l : lambdas)
    if (!(l >= 0.0)) throw ConfigError("lambdas must be non-negative");
  for (double l : l_fprs)
    if (!(l > 0.0 && l < 1.0)) throw ConfigError("l_fpr values must lie in (0,1)");
  if (shuffles < 1) throw ConfigError("shuffles must be at least 1");
  if (folds < 2 || tune_folds < 2) throw ConfigError("fold counts must be at least 2");
  if (n_bs < 2) throw ConfigError("n_bs must be at least 2");
  if (!(marker_noise >= 0.0)) throw ConfigError("marker_noise must be non-negative");
}

nlohmann::json experiment_config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["width"] = c.synth.width;
  j["height"] = c.synth.height;
  j["sigma_n"] = c.synth.sigma_n;
  j["smooth_sigma"] = c.synth.smooth_sigma;
  j["n_controls"] = c.synth.n_controls;
  j["n_cases"] = c.synth.n_cases;
  j["noise_scaling"] = std::string(synth::to_string(c.synth.noise_scaling));
  j["effect_sizes"] = c.effect_sizes;
  auto& cls = j["classifiers"] = nlohmann::json::array();
  for (auto k : c.classifiers) cls.push_back(std::string(to_string(k)));
  auto& ms = j["methods"] = nlohmann::json::array();
  for (auto m : c.methods) ms.push_back(std::string(to_string(m)));
  j["lambdas"] = c.lambdas;
  j["l_fprs"] = c.l_fprs;
  j["shuffles"] = c.shuffles;
  j["folds"] = c.folds;
  j["n_bs"] = c.n_bs;
  j["use_cv"] = c.use_cv;
  j["observation"] = std::string(to_string(c.observation));
  j["eta"] = c.eta;
  j["tune_folds"] = c.tune_folds;
  j["marker_noise"] = c.marker_noise;
  j["seed"] = c.seed;
  return j;
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j,
                                             const ExperimentConfig& base) {
  if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
  ExperimentConfig c = base;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "width") c.synth.width = v.get<std::size_t>();
      else if (key == "height") c.synth.height = v.get<std::size_t>();
      else if (key == "sigma_n") c.synth.sigma_n = v.get<double>();
      else if (key == "smooth_sigma") c.synth.smooth_sigma = v.get<double>();
      else if (key == "n_controls") c.synth.n_controls = v.get<std::size_t>();
      else if (key == "n_cases") c.synth.n_cases = v.get<std::size_t>();
      else if (key == "noise_scaling")
        c.synth.noise_scaling = synth::noise_scaling_from_string(v.get<std::string>());
      else if (key == "effect_sizes") c.effect_sizes = v.get<std::vector<double>>();
      else if (key == "classifiers") {
        c.classifiers.clear();
        for (const auto& s : v) c.classifiers.push_back(classifier_kind_from_string(s.get<std::string>()));
      } else if (key == "methods") {
        c.methods.clear();
        for (const auto& s : v) c.methods.push_back(method_from_string(s.get<std::string>()));
      } else if (key == "lambdas") c.lambdas = v.get<std::vector<double>>();
      else if (key == "l_fprs") c.l_fprs = v.get<std::vector<double>>();
      else if (key == "shuffles") c.shuffles = v.get<std::size_t>();
      else if (key == "folds") c.folds = v.get<std::size_t>();
      else if (key == "n_bs") c.n_bs = v.get<std::size_t>();
      else if (key == "use_cv") c.use_cv = v.get<bool>();
      else if (key == "observation") c.observation = observation_from_string(v.get<std::string>());
      else if (key == "eta") c.eta = v.get<double>();
      else if (key == "tune_folds") c.tune_folds = v.get<std::size_t>();
      else if (key == "marker_noise") c.marker_noise = v.get<double>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "config_hash") continue;  // written alongside report configs
      else throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_file(path), nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return experiment_config_from_json(j);
}

std::string config_hash(const nlohmann::json& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

const SummaryRow& ExperimentReport::find(double effect_size, ClassifierKind c, Method m,
                                         double lambda, double l_fpr) const {
  for (const auto& row : summary) {
    const auto& k = row.key;
    if (k.effect_size == effect_size && k.classifier == c && k.method == m && k.lambda == lambda &&
        k.l_fpr == l_fpr) {
      return row;
    }
  }
  throw ConfigError("no report row for the requested key");
}

namespace {

bool uses_classifier(Method m) { return m != Method::outlier; }
bool uses_prior(Method m) {
  return m == Method::rsm || m == Method::rsm_stationary || m == Method::rsm_unary;
}
bool depends_on_lambda(Method m) { return m == Method::rsm || m == Method::rsm_stationary; }

PairwiseMode mode_of(Method m) {
  if (m == Method::rsm_stationary) return PairwiseMode::stationary;
  if (m == Method::rsm_unary) return PairwiseMode::none;
  return PairwiseMode::nonstationary;
}

struct SampleResult {
  double dsc = kNaN;
  double fpr = kNaN;
  double count = 0.0;
};

double mean_or_nan(const std::vector<double>& v) {
  if (v.empty()) return kNaN;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sd_or_zero(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_or_nan(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

template <class F>
double or_nan(F&& f) {
  try {
    return f();
  } catch (const Error&) {
    return kNaN;
  }
}

/// One (effect, classifier, shuffle) pass: fills per-sample results for all
/// (method, lambda, l_fpr) combinations, indexed [(m * nl + li) * nf + fi][row].
class ShuffleRunner {
 public:
  ShuffleRunner(const ExperimentConfig& cfg, const synth::SyntheticData& sd,
                const NeighborhoodGraph& graph, ClassifierKind kind, std::size_t shuffle)
      : cfg_(cfg), data_(sd.data), truth_(sd.truth), graph_(graph), kind_(kind), shuffle_(shuffle) {
    results_.assign(cfg.methods.size() * cfg.lambdas.size() * cfg.l_fprs.size(),
                    std::vector<SampleResult>(data_.size()));
  }

  std::vector<std::vector<SampleResult>>& results() { return results_; }
  std::vector<FoldRow>& fold_rows() { return fold_rows_; }

  void run(double effect_size) {
    effect_size_ = effect_size;
    const auto all = data_.all_rows();
    const auto split =
        stratified_folds(data_, all, cfg_.folds, derive_seed(cfg_.seed, {101, shuffle_}));
    for (std::size_t f = 0; f < cfg_.folds; ++f) {
      try {
        run_fold(f, complement(all, split[f]), split[f]);
      } catch (const std::exception& e) {
        throw Error("shuffle " + std::to_string(shuffle_) + " fold " + std::to_string(f) + ": " +
                    e.what());
      }
    }
  }

 private:
  std::size_t slot(std::size_t m, std::size_t li, std::size_t fi) const {
    return (m * cfg_.lambdas.size() + li) * cfg_.l_fprs.size() + fi;
  }

  EffectMap map_of(Method m, double lambda, const SampleEvidence& ev,
                   const PriorParams& prior) const {
    switch (m) {
      case Method::nbs: return ev.raw;
      case Method::wbs: return ev.noise.mean_map;
      default:
        return reconstruct(ev, prior, m == Method::rsm_unary ? 0.0 : lambda, mode_of(m), graph_,
                           cfg_.observation);
    }
  }

  void run_fold(std::size_t f, const std::vector<std::size_t>& train_rows,
                const std::vector<std::size_t>& test_rows) {
    const bool need_classifier =
        std::any_of(cfg_.methods.begin(), cfg_.methods.end(), uses_classifier);
    const bool need_prior = std::any_of(cfg_.methods.begin(), cfg_.methods.end(), uses_prior);

    ClassifierSpec spec{kind_, cfg_.eta > 0.0 ? cfg_.eta : 1.0};
    if (is_linear(kind_) && cfg_.eta <= 0.0 && need_classifier) {
      const auto grid = default_eta_grid();
      spec.eta = tune_regularization(data_, train_rows, kind_, cfg_.tune_folds,
                                     derive_seed(cfg_.seed, {104, shuffle_, f}), grid);
    }
    RsmConfig rc;
    rc.n_bs = cfg_.n_bs;
    rc.folds = cfg_.folds;
    rc.use_cv = cfg_.use_cv;
    rc.observation = cfg_.observation;
    rc.seed = derive_seed(cfg_.seed, {103, shuffle_, f});

    FittedRsm outer;
    std::vector<SampleEvidence> test_ev;
    std::vector<CalibrationFold> calib;
    if (need_classifier) {
      outer = fit_rsm(spec, data_, train_rows, graph_, rc, derive_seed(cfg_.seed, {102, shuffle_, f}),
                      need_prior);
      test_ev.resize(test_rows.size());
      parallel::for_each_index(test_rows.size(), [&](std::size_t i) {
        test_ev[i] = gather_evidence(outer, data_.row(test_rows[i]));
      });
      calib = calibration_folds(spec, data_, train_rows, graph_, rc, need_prior);
    }

    for (std::size_t mi = 0; mi < cfg_.methods.size(); ++mi) {
      const Method m = cfg_.methods[mi];
      for (std::size_t li = 0; li < cfg_.lambdas.size(); ++li) {
        const double lambda = cfg_.lambdas[li];
        if (li > 0 && !depends_on_lambda(m)) {
          copy_lambda(mi, li, f, test_rows);
          continue;
        }
        std::vector<EffectMap> controls, tests;
        if (m == Method::outlier) {
          outlier_maps(train_rows, test_rows, rc.seed, controls, tests);
        } else {
          std::vector<std::pair<const SampleEvidence*, const PriorParams*>> jobs;
          for (const auto& cf : calib)
            for (const auto& ev : cf.controls) jobs.emplace_back(&ev, &cf.prior);
          controls.resize(jobs.size());
          parallel::for_each_index(jobs.size(), [&](std::size_t i) {
            controls[i] = map_of(m, lambda, *jobs[i].first, *jobs[i].second);
          });
          tests.resize(test_rows.size());
          parallel::for_each_index(test_rows.size(), [&](std::size_t i) {
            tests[i] = map_of(m, lambda, test_ev[i], outer.prior);
          });
        }
        std::vector<double> pooled;
        for (const auto& c : controls) pooled.insert(pooled.end(), c.values.begin(), c.values.end());
        std::sort(pooled.begin(), pooled.end());
        for (std::size_t fi = 0; fi < cfg_.l_fprs.size(); ++fi) {
          const auto th = threshold_from_pooled(pooled, controls.size(), cfg_.l_fprs[fi]);
          score(slot(mi, li, fi), ReportKey{effect_size_, kind_, m, lambda, cfg_.l_fprs[fi]}, f,
                spec.eta, th.tau, test_rows, tests);
        }
      }
    }
  }

  void outlier_maps(const std::vector<std::size_t>& train_rows,
                    const std::vector<std::size_t>& test_rows, std::uint64_t calib_seed,
                    std::vector<EffectMap>& controls, std::vector<EffectMap>& tests) const {
    // same inner split as the calibration folds
    const auto split = stratified_folds(data_, train_rows, cfg_.folds, derive_seed(calib_seed, {20}));
    for (const auto& fold : split) {
      const auto inner = complement(train_rows, fold);
      const auto model = fit_normative(data_, inner);
      for (auto r : fold)
        if (data_.label(r) == 0) controls.push_back(outlier_score_map(model, data_.row(r)));
    }
    const auto model = fit_normative(data_, train_rows);
    for (auto r : test_rows) tests.push_back(outlier_score_map(model, data_.row(r)));
  }

  void score(std::size_t slot, const ReportKey& key, std::size_t f, double eta, double tau,
             const std::vector<std::size_t>& test_rows, const std::vector<EffectMap>& tests) {
    FoldRow row{key, shuffle_, f, eta, tau};
    std::vector<double> d_case, f_ctrl;
    for (std::size_t i = 0; i < test_rows.size(); ++i) {
      const auto r = test_rows[i];
      const auto q = threshold_map(tests[i], tau);
      auto& res = results_[slot][r];
      res.count = static_cast<double>(q.count());
      if (data_.label(r) == 1) {
        res.dsc = dsc(q, truth_[r]);
        d_case.push_back(res.dsc);
      } else {
        res.fpr = fpr(q);
        f_ctrl.push_back(res.fpr);
      }
    }
    row.n_cases = d_case.size();
    row.n_controls = f_ctrl.size();
    row.dsc_mean = mean_or_nan(d_case);
    row.fpr_mean = mean_or_nan(f_ctrl);
    fold_rows_.push_back(row);
  }

  void copy_lambda(std::size_t mi, std::size_t li, std::size_t f,
                   const std::vector<std::size_t>& test_rows) {
    for (std::size_t fi = 0; fi < cfg_.l_fprs.size(); ++fi) {
      auto& dst = results_[slot(mi, li, fi)];
      const auto& src = results_[slot(mi, 0, fi)];
      for (auto r : test_rows) dst[r] = src[r];
      // the fold row for lambda index 0 was the most recent one with this l_fpr
      FoldRow row;
      for (auto it = fold_rows_.rbegin(); it != fold_rows_.rend(); ++it) {
        if (it->fold == f && it->key.method == cfg_.methods[mi] &&
            it->key.lambda == cfg_.lambdas[0] && it->key.l_fpr == cfg_.l_fprs[fi]) {
          row = *it;
          break;
        }
      }
      row.key.lambda = cfg_.lambdas[li];
      fold_rows_.push_back(row);
    }
  }

  const ExperimentConfig& cfg_;
  const Dataset& data_;
  const std::vector<BinaryEffectMap>& truth_;
  const NeighborhoodGraph& graph_;
  ClassifierKind kind_;
  std::size_t shuffle_;
  double effect_size_ = 0.0;
  std::vector<std::vector<SampleResult>> results_;
  std::vector<FoldRow> fold_rows_;
};

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport report;
  report.config_hash = config_hash(experiment_config_to_json(cfg));
  report.seed = cfg.seed;
  const auto graph = build_grid_graph(cfg.synth.width, cfg.synth.height);
  const std::size_t nm = cfg.methods.size(), nl = cfg.lambdas.size(), nf = cfg.l_fprs.size();

  for (double effect : cfg.effect_sizes) {
    auto sc = cfg.synth;
    sc.effect_size = effect;
    sc.seed = derive_seed(cfg.seed, {100});
    const auto sd = synth::generate_dataset(sc);
    const std::size_t n = sd.data.size();

    std::vector<double> marker(n), marker_noisy(n);
    for (std::size_t i = 0; i < n; ++i) {
      marker[i] = static_cast<double>(sd.truth[i].count());
      std::mt19937_64 rng(derive_seed(cfg.seed, {105, i}));
      std::normal_distribution<double> noise(0.0, 1.0);
      marker_noisy[i] = marker[i] + cfg.marker_noise * noise(rng);
    }

    for (auto kind : cfg.classifiers) {
      // per slot: one ShuffleRow per shuffle
      std::vector<std::vector<ShuffleRow>> per_slot(nm * nl * nf);
      for (std::size_t s = 0; s < cfg.shuffles; ++s) {
        ShuffleRunner runner(cfg, sd, graph, kind, s);
        try {
          runner.run(effect);
        } catch (const std::exception& e) {
          throw Error("effect " + io::format_double(effect) + " classifier " +
                      std::string(to_string(kind)) + ", " + e.what());
        }
        auto& fr = runner.fold_rows();
        report.folds.insert(report.folds.end(), fr.begin(), fr.end());

        for (std::size_t mi = 0; mi < nm; ++mi)
          for (std::size_t li = 0; li < nl; ++li)
            for (std::size_t fi = 0; fi < nf; ++fi) {
              const std::size_t slot = (mi * nl + li) * nf + fi;
              const auto& res = runner.results()[slot];
              ShuffleRow row;
              row.key = {effect, kind, cfg.methods[mi], cfg.lambdas[li], cfg.l_fprs[fi]};
              row.shuffle = s;
              std::vector<double> d_case, f_ctrl, counts, c_case, c_ctrl;
              for (std::size_t i = 0; i < n; ++i) {
                counts.push_back(res[i].count);
                if (sd.data.label(i) == 1) {
                  d_case.push_back(res[i].dsc);
                  c_case.push_back(res[i].count);
                } else {
                  f_ctrl.push_back(res[i].fpr);
                  c_ctrl.push_back(res[i].count);
                }
              }
              row.dsc_mean = mean_or_nan(d_case);
              row.fpr_mean = mean_or_nan(f_ctrl);
              row.marker_r = or_nan([&] { return pearson_corr(counts, marker); });
              row.marker_r_noisy = or_nan([&] { return pearson_corr(counts, marker_noisy); });
              row.count_t = or_nan([&] { return group_t_stat(c_case, c_ctrl); });
              per_slot[slot].push_back(row);
              report.shuffles.push_back(row);
            }
      }
      for (const auto& rows : per_slot) {
        SummaryRow sr;
        sr.key = rows.front().key;
        std::vector<double> d, fp, r0, r1, t;
        for (const auto& r : rows) {
          d.push_back(r.dsc_mean);
          fp.push_back(r.fpr_mean);
          r0.push_back(r.marker_r);
          r1.push_back(r.marker_r_noisy);
          t.push_back(r.count_t);
        }
        sr.dsc_mean = mean_or_nan(d);
        sr.dsc_sd = sd_or_zero(d);
        sr.fpr_mean = mean_or_nan(fp);
        sr.fpr_sd = sd_or_zero(fp);
        sr.marker_r = mean_or_nan(r0);
        sr.marker_r_noisy = mean_or_nan(r1);
        sr.count_t = mean_or_nan(t);
        report.summary.push_back(sr);
      }
    }
  }
  return report;
}

namespace {

std::string key_fields(const ReportKey& k) {
  using io::format_double;
  return format_double(k.effect_size) + "," + std::string(to_string(k.classifier)) + "," +
         std::string(to_string(k.method)) + "," + format_double(k.lambda) + "," +
         format_double(k.l_fpr);
}

std::string stamp(const ExperimentReport& r) {
  return io::provenance_comment(r.config_hash, r.seed) + "\n";
}

constexpr const char* kKeyHeader = "effect_size,classifier,method,lambda,l_fpr";

}  // namespace

std::string folds_csv(const ExperimentReport& r) {
  using io::format_double;
  std::ostringstream os;
  os << stamp(r) << kKeyHeader
     << ",shuffle,fold,eta,tau,n_cases,n_controls,dsc_mean,fpr_mean\n";
  for (const auto& x : r.folds) {
    os << key_fields(x.key) << ',' << x.shuffle << ',' << x.fold << ',' << format_double(x.eta)
       << ',' << format_double(x.tau) << ',' << x.n_cases << ',' << x.n_controls << ','
       << format_double(x.dsc_mean) << ',' << format_double(x.fpr_mean) << '\n';
  }
  return os.str();
}

std::string shuffles_csv(const ExperimentReport& r) {
  using io::format_double;
  std::ostringstream os;
  os << stamp(r) << kKeyHeader << ",shuffle,dsc_mean,fpr_mean,marker_r,marker_r_noisy,count_t\n";
  for (const auto& x : r.shuffles) {
    os << key_fields(x.key) << ',' << x.shuffle << ',' << format_double(x.dsc_mean) << ','
       << format_double(x.fpr_mean) << ',' << format_double(x.marker_r) << ','
       << format_double(x.marker_r_noisy) << ',' << format_double(x.count_t) << '\n';
  }
  return os.str();
}

std::string summary_csv(const ExperimentReport& r) {
  using io::format_double;
  std::ostringstream os;
  os << stamp(r) << kKeyHeader
     << ",dsc_mean,dsc_sd,fpr_mean,fpr_sd,marker_r,marker_r_noisy,count_t\n";
  for (const auto& x : r.summary) {
    os << key_fields(x.key) << ',' << format_double(x.dsc_mean) << ',' << format_double(x.dsc_sd)
       << ',' << format_double(x.fpr_mean) << ',' << format_double(x.fpr_sd) << ','
       << format_double(x.marker_r) << ',' << format_double(x.marker_r_noisy) << ','
       << format_double(x.count_t) << '\n';
  }
  return os.str();
}

void write_report(const ExperimentReport& r, const ExperimentConfig& config,
                  const std::filesystem::path& dir) {
  io::write_file_atomic(dir / "folds.csv", folds_csv(r));
  io::write_file_atomic(dir / "shuffles.csv", shuffles_csv(r));
  io::write_file_atomic(dir / "summary.csv", summary_csv(r));
  auto j = experiment_config_to_json(config);
  j["config_hash"] = r.config_hash;
  io::write_file_atomic(dir / "config.json", j.dump(2) + "\n");
}

}  // namespace rsm
