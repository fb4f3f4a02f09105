#include "rsm/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rsm/classifiers.hpp"
#include "rsm/error.hpp"
#include "rsm/evaluation.hpp"
#include "rsm/experiment.hpp"
#include "rsm/io.hpp"
#include "rsm/model_io.hpp"
#include "rsm/numerics.hpp"
#include "rsm/parallel.hpp"
#include "rsm/reconstruct.hpp"
#include "rsm/synthdata.hpp"
#include "rsm/thresholding.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace rsm {

namespace {

constexpr const char* kOutEnv = "RSM_OUT_DIR";

struct UsageError : Error {
  using Error::Error;
};

fs::path resolve_out(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kOutEnv); env && *env) return env;
  throw UsageError(std::string("no output directory: pass --out or set ") + kOutEnv);
}

json stamp_json(const json& options, std::uint64_t seed) {
  return json{{"config_hash", config_hash(options)}, {"seed", seed}};
}

std::string stamp_line(const json& options, std::uint64_t seed) {
  return io::provenance_comment(config_hash(options), seed);
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string config, out;
  std::optional<double> effect_size;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> width, height, n_controls, n_cases;
};

void run_synth(const SynthArgs& a) {
  auto cfg = a.config.empty() ? ExperimentConfig{} : load_experiment_config(a.config);
  if (a.effect_size) cfg.effect_sizes = {*a.effect_size};
  if (a.seed) cfg.seed = *a.seed;
  if (a.width) cfg.synth.width = *a.width;
  if (a.height) cfg.synth.height = *a.height;
  if (a.n_controls) cfg.synth.n_controls = *a.n_controls;
  if (a.n_cases) cfg.synth.n_cases = *a.n_cases;
  cfg.validate();
  const auto out = resolve_out(a.out);

  auto sc = cfg.synth;
  sc.effect_size = cfg.effect_sizes.front();
  sc.seed = derive_seed(cfg.seed, {100});
  const auto sd = synth::generate_dataset(sc);
  const auto cj = experiment_config_to_json(cfg);
  const auto stamp = stamp_line(cj, cfg.seed);

  Dataset truth(sd.data.dim());
  std::vector<double> row(sd.data.dim());
  for (std::size_t i = 0; i < sd.data.size(); ++i) {
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = sd.truth[i].detections[j];
    truth.add(row, sd.data.label(i));
  }
  io::save_dataset_csv(sd.data, out / "dataset.csv", stamp);
  io::save_dataset_csv(truth, out / "truth.csv", stamp);
  io::save_graph_edgelist(build_grid_graph(sc.width, sc.height), out / "graph.txt", stamp);
  auto j = cj;
  j["config_hash"] = config_hash(cj);
  io::write_file_atomic(out / "config.json", j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string dataset, graph, classifier = "ewgmm", out;
  double eta = 0.0;
  std::size_t n_bs = 100, folds = 5;
  bool no_cv = false;
  std::uint64_t seed = 0;
  bool threshold = false;
  double lambda = 1.0, l_fpr = 0.01;
  std::string mode = "nonstationary", observation = "single_model";
};

RsmConfig rsm_config(std::size_t n_bs, std::size_t folds, bool use_cv, std::uint64_t seed,
                     double lambda, double l_fpr, const std::string& mode,
                     const std::string& observation) {
  RsmConfig rc;
  rc.n_bs = n_bs;
  rc.folds = folds;
  rc.use_cv = use_cv;
  rc.seed = seed;
  rc.lambda = lambda;
  rc.l_fpr = l_fpr;
  rc.pairwise_mode = pairwise_mode_from_string(mode);
  rc.observation = observation_from_string(observation);
  rc.validate();
  return rc;
}

void run_train(const TrainArgs& a) {
  const auto kind = classifier_kind_from_string(a.classifier);
  const auto rc = rsm_config(a.n_bs, a.folds, !a.no_cv, a.seed, a.lambda, a.l_fpr, a.mode,
                             a.observation);
  const auto out = resolve_out(a.out);
  const auto data = io::load_dataset_csv(a.dataset);
  const auto graph = io::load_graph_edgelist(a.graph);
  if (graph.node_count() != data.dim()) throw DimensionError("graph does not match dataset");

  const auto rows = data.all_rows();
  ClassifierSpec spec{kind, a.eta > 0.0 ? a.eta : 1.0};
  if (is_linear(kind) && a.eta <= 0.0) {
    const auto grid = default_eta_grid();
    spec.eta = tune_regularization(data, rows, kind, a.folds, derive_seed(a.seed, {104}), grid);
  }
  const json options{{"dataset", a.dataset}, {"graph", a.graph},   {"classifier", a.classifier},
                     {"eta", spec.eta},      {"n_bs", a.n_bs},     {"folds", a.folds},
                     {"use_cv", !a.no_cv},   {"threshold", a.threshold}, {"lambda", a.lambda},
                     {"l_fpr", a.l_fpr},     {"mode", a.mode},     {"observation", a.observation}};
  const auto meta = stamp_json(options, a.seed);

  const auto fit = fit_rsm(spec, data, rows, graph, rc, a.seed);
  io::save_model(fit.full_model, out / "model.json", meta);
  io::save_prior(fit.prior, out / "prior.json", meta);
  if (a.threshold) {
    const auto th = cv_threshold(spec, data, rows, graph, rc);
    json j{{"tau", th.tau}, {"l_fpr", th.l_fpr}, {"n_control_maps", th.n_control_maps},
           {"lambda", a.lambda}, {"mode", a.mode}, {"metadata", meta}};
    io::write_file_atomic(out / "threshold.json", j.dump(2) + "\n");
  }
}

// ---------------------------------------------------------------------------

struct ReconstructArgs {
  std::string dataset, graph, model, prior, test, out, threshold;
  std::optional<double> tau;
  std::size_t n_bs = 100;
  std::uint64_t seed = 0;
  double lambda = 1.0;
  std::string mode = "nonstationary", observation = "single_model";
};

double read_tau(const std::string& path) {
  try {
    return json::parse(io::read_file(path)).at("tau").get<double>();
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void run_reconstruct(const ReconstructArgs& a) {
  const auto rc = rsm_config(a.n_bs, 5, true, a.seed, a.lambda, 0.01, a.mode, a.observation);
  const auto out = resolve_out(a.out);
  const auto data = io::load_dataset_csv(a.dataset);
  const auto graph = io::load_graph_edgelist(a.graph);
  const auto model = io::load_model(a.model);
  const auto prior = io::load_prior(a.prior);
  const auto test = io::load_dataset_csv(a.test);
  if (graph.node_count() != data.dim() || test.dim() != data.dim() ||
      model_dim(model) != data.dim() || prior.node_var.size() != data.dim()) {
    throw DimensionError("dataset, test set, graph, model and prior disagree on dimension");
  }
  std::optional<double> tau = a.tau;
  if (!a.threshold.empty()) tau = read_tau(a.threshold);

  ClassifierSpec spec;
  if (const auto* lm = std::get_if<LinearModel>(&model)) spec = {lm->kind, lm->eta};
  const json options{{"dataset", a.dataset}, {"model", a.model}, {"prior", a.prior},
                     {"test", a.test},       {"n_bs", a.n_bs},   {"lambda", a.lambda},
                     {"mode", a.mode},       {"observation", a.observation},
                     {"tau", tau ? json(*tau) : json(nullptr)}};
  const auto stamp = stamp_line(options, a.seed);

  FittedRsm fit;
  fit.spec = spec;
  fit.full_model = model;
  fit.prior = prior;
  const auto rows = data.all_rows();
  fit.ensemble = BootstrapEnsemble(spec, data, rows, rc.n_bs, derive_seed(a.seed, {10}));

  std::vector<EffectMap> maps(test.size());
  parallel::for_each_index(test.size(), [&](std::size_t i) {
    maps[i] = reconstruct(gather_evidence(fit, test.row(i)), prior, rc.lambda, rc.pairwise_mode,
                          graph, rc.observation);
  });
  for (std::size_t i = 0; i < maps.size(); ++i) {
    io::save_map_csv(maps[i], out / ("map_" + std::to_string(i) + ".csv"), stamp);
    if (tau) {
      io::save_binary_map_csv(threshold_map(maps[i], *tau),
                              out / ("binary_" + std::to_string(i) + ".csv"), stamp);
    }
  }
}

// ---------------------------------------------------------------------------

struct ThresholdArgs {
  std::vector<std::string> maps;
  double l_fpr = 0.01;
  bool golden = false;
  std::string out;
};

void run_threshold(const ThresholdArgs& a) {
  const auto out = resolve_out(a.out);
  std::vector<EffectMap> maps;
  for (const auto& p : a.maps) maps.push_back(io::load_map_csv(p, MapRole::reconstructed));
  const auto th = compute_threshold(maps, a.l_fpr);
  json j{{"tau", th.tau}, {"l_fpr", th.l_fpr}, {"n_control_maps", th.n_control_maps},
         {"method", a.golden ? "golden_section" : "sorted"}};
  if (a.golden) {
    std::vector<double> pooled;
    for (const auto& m : maps) pooled.insert(pooled.end(), m.values.begin(), m.values.end());
    j["tau"] = golden_section_threshold(pooled, a.l_fpr);
  }
  const json options{{"maps", a.maps}, {"l_fpr", a.l_fpr}, {"golden", a.golden}};
  j["metadata"] = stamp_json(options, 0);
  io::write_file_atomic(out / "threshold.json", j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------

struct EvaluateArgs {
  std::string config, out;
  std::vector<std::string> methods, classifiers;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> shuffles, n_bs;
};

void run_evaluate(const EvaluateArgs& a) {
  auto cfg = load_experiment_config(a.config);
  if (!a.methods.empty()) {
    cfg.methods.clear();
    for (const auto& m : a.methods) cfg.methods.push_back(method_from_string(m));
  }
  if (!a.classifiers.empty()) {
    cfg.classifiers.clear();
    for (const auto& c : a.classifiers) cfg.classifiers.push_back(classifier_kind_from_string(c));
  }
  if (a.seed) cfg.seed = *a.seed;
  if (a.shuffles) cfg.shuffles = *a.shuffles;
  if (a.n_bs) cfg.n_bs = *a.n_bs;
  cfg.validate();
  const auto out = resolve_out(a.out);
  const auto report = run_experiment(cfg);
  write_report(report, cfg, out);
}

// ---------------------------------------------------------------------------

struct OccurrenceArgs {
  std::vector<std::string> maps;
  std::string out;
};

void run_occurrence(const OccurrenceArgs& a) {
  const auto out = resolve_out(a.out);
  std::vector<BinaryEffectMap> maps;
  for (const auto& p : a.maps) maps.push_back(io::load_binary_map_csv(p));
  const auto counts = occurrence_map(maps);
  std::string text = stamp_line(json{{"maps", a.maps}}, 0) + "\n";
  for (auto c : counts) text += std::to_string(c) + "\n";
  io::write_file_atomic(out / "occurrence.csv", text);
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Reconstruction of subject-specific effect maps"};
  app.fallthrough();
  app.require_subcommand(1);
  int jobs = 1;
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth-gen", "generate the synthetic benchmark dataset");
  synth->add_option("--config", sa.config, "experiment config (JSON)")->check(CLI::ExistingFile);
  synth->add_option("--out", sa.out, "output directory");
  synth->add_option("--effect-size", sa.effect_size, "effect size in units of sigma_n");
  synth->add_option("--seed", sa.seed, "master seed");
  synth->add_option("--width", sa.width);
  synth->add_option("--height", sa.height);
  synth->add_option("--n-controls", sa.n_controls);
  synth->add_option("--n-cases", sa.n_cases);

  TrainArgs ta;
  auto* train_cmd = app.add_subcommand("train", "fit classifier, noise ensemble and prior");
  train_cmd->add_option("--dataset", ta.dataset)->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--graph", ta.graph)->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--classifier", ta.classifier)
      ->check(CLI::IsMember({"ewgmm", "svm", "logreg_l2", "logreg_l1"}));
  train_cmd->add_option("--eta", ta.eta, "regularisation; <= 0 tunes it");
  train_cmd->add_option("--n-bs", ta.n_bs)->check(CLI::Range(2, 1000000));
  train_cmd->add_option("--folds", ta.folds)->check(CLI::Range(2, 1000));
  train_cmd->add_flag("--no-cv", ta.no_cv, "estimate the prior without cross-validation");
  train_cmd->add_option("--seed", ta.seed);
  train_cmd->add_flag("--threshold", ta.threshold, "also compute the threshold");
  train_cmd->add_option("--lambda", ta.lambda)->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--l-fpr", ta.l_fpr)->check(CLI::Range(0.0, 1.0));
  train_cmd->add_option("--mode", ta.mode)
      ->check(CLI::IsMember({"nonstationary", "stationary", "none"}));
  train_cmd->add_option("--observation", ta.observation)
      ->check(CLI::IsMember({"single_model", "bootstrap_mean"}));
  train_cmd->add_option("--out", ta.out, "output directory");

  ReconstructArgs ra;
  auto* rec = app.add_subcommand("reconstruct", "reconstruct maps for test samples");
  rec->add_option("--dataset", ra.dataset, "training dataset")->required()->check(CLI::ExistingFile);
  rec->add_option("--graph", ra.graph)->required()->check(CLI::ExistingFile);
  rec->add_option("--model", ra.model)->required()->check(CLI::ExistingFile);
  rec->add_option("--prior", ra.prior)->required()->check(CLI::ExistingFile);
  rec->add_option("--test", ra.test, "samples to map")->required()->check(CLI::ExistingFile);
  rec->add_option("--n-bs", ra.n_bs)->check(CLI::Range(2, 1000000));
  rec->add_option("--seed", ra.seed, "seed used for training");
  rec->add_option("--lambda", ra.lambda)->check(CLI::NonNegativeNumber);
  rec->add_option("--mode", ra.mode)->check(CLI::IsMember({"nonstationary", "stationary", "none"}));
  rec->add_option("--observation", ra.observation)
      ->check(CLI::IsMember({"single_model", "bootstrap_mean"}));
  auto* tau_opt = rec->add_option("--tau", ra.tau, "threshold for binary maps");
  rec->add_option("--threshold", ra.threshold, "threshold JSON from train")
      ->check(CLI::ExistingFile)
      ->excludes(tau_opt);
  rec->add_option("--out", ra.out, "output directory");

  ThresholdArgs tha;
  auto* thr = app.add_subcommand("threshold", "threshold from control maps");
  thr->add_option("--maps", tha.maps, "control map CSVs")->required()->check(CLI::ExistingFile);
  thr->add_option("--l-fpr", tha.l_fpr)->check(CLI::Range(0.0, 1.0));
  thr->add_flag("--golden", tha.golden, "use golden-section search");
  thr->add_option("--out", tha.out, "output directory");

  EvaluateArgs ea;
  auto* eval = app.add_subcommand("evaluate", "run the shuffled cross-validation experiment");
  eval->add_option("--config", ea.config)->required()->check(CLI::ExistingFile);
  eval->add_option("--method", ea.methods)
      ->check(CLI::IsMember({"nbs", "wbs", "rsm", "rsm_stationary", "rsm_unary", "outlier"}));
  eval->add_option("--classifier", ea.classifiers)
      ->check(CLI::IsMember({"ewgmm", "svm", "logreg_l2", "logreg_l1"}));
  eval->add_option("--seed", ea.seed);
  eval->add_option("--shuffles", ea.shuffles);
  eval->add_option("--n-bs", ea.n_bs);
  eval->add_option("--out", ea.out, "output directory");

  OccurrenceArgs oa;
  auto* occ = app.add_subcommand("occurrence", "per-site detection counts");
  occ->add_option("--maps", oa.maps, "binary map CSVs")->required()->check(CLI::ExistingFile);
  occ->add_option("--out", oa.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    parallel::set_jobs(jobs);
    if (*synth) run_synth(sa);
    else if (*train_cmd) run_train(ta);
    else if (*rec) run_reconstruct(ra);
    else if (*thr) run_threshold(tha);
    else if (*eval) run_evaluate(ea);
    else if (*occ) run_occurrence(oa);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace rsm
