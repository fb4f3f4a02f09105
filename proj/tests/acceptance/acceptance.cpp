// Acceptance run: one PASS/FAIL line per criterion, RECORD lines for
// quantities that are reported but not asserted. Exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "dense_oracle.hpp"
#include "oracles.hpp"
#include "rsm/baseline.hpp"
#include "rsm/experiment.hpp"
#include "rsm/parallel.hpp"
#include "rsm/reconstruct.hpp"
#include "rsm/synthdata.hpp"
#include "rsm/thresholding.hpp"

using namespace rsm;

namespace {

int failures = 0;

void report(int id, const char* title, bool ok, const std::string& detail) {
  std::printf("[%s] %2d %s: %s\n", ok ? "PASS" : "FAIL", id, title, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

void record(const std::string& what) {
  std::printf("[RECORD] %s\n", what.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt2(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

EffectMap as_map(std::vector<double> v) { return EffectMap{std::move(v), MapRole::raw}; }

struct Instance {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<double> obs, s2;
  PriorParams prior;
};

Instance random_instance(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> pos(0.05, 5.0);
  std::normal_distribution<double> nd;
  std::uniform_int_distribution<std::size_t> extra(0, 2 * n);
  Instance in;
  in.edges = oracle::random_connected_edges(n, extra(rng), rng);
  for (std::size_t j = 0; j < n; ++j) {
    in.obs.push_back(2.0 * nd(rng));
    in.s2.push_back(pos(rng));
    in.prior.node_var.push_back(pos(rng));
  }
  for (std::size_t e = 0; e < in.edges.size(); ++e) in.prior.edge_var.push_back(pos(rng));
  return in;
}

double rel_error(const std::vector<double>& x, const std::vector<double>& ref) {
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    num += (x[j] - ref[j]) * (x[j] - ref[j]);
    den += ref[j] * ref[j];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

void solver_equivalence() {
  std::mt19937_64 rng(1001);
  std::uniform_int_distribution<std::size_t> size(5, 100);
  const double lambdas[] = {0.0, 0.5, 2.0};
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const auto in = random_instance(rng, size(rng));
    const double lambda = lambdas[i % 3];
    const NeighborhoodGraph g(in.obs.size(), in.edges);
    const auto x = solve_map(assemble_system(as_map(in.obs), in.s2, in.prior, lambda, g,
                                             PairwiseMode::nonstationary)).values;
    const auto ref = oracle::dense_map_solution(in.obs, in.s2, in.prior.node_var, in.edges,
                                                in.prior.edge_var, lambda);
    worst = std::max(worst, rel_error(x, ref));
  }
  report(1, "solver matches dense solve", worst <= 1e-8,
         fmt("200 instances, worst relative error %.3g (limit 1e-8)", worst));
}

void limit_checks() {
  std::mt19937_64 rng(1002);
  bool exact = true;
  double worst_unary = 0.0;
  bool monotone = true;
  for (int i = 0; i < 50; ++i) {
    auto in = random_instance(rng, 5 + static_cast<std::size_t>(i) * 2);
    const NeighborhoodGraph g(in.obs.size(), in.edges);
    const std::vector<double> zero(in.obs.size(), 0.0);
    const auto pinned = solve_map(assemble_system(as_map(in.obs), zero, in.prior, 2.0, g,
                                                  PairwiseMode::nonstationary)).values;
    exact = exact && pinned == in.obs;

    const auto unary = solve_map(assemble_system(as_map(in.obs), in.s2, in.prior, 0.0, g,
                                                 PairwiseMode::nonstationary)).values;
    for (std::size_t j = 0; j < in.obs.size(); ++j) {
      const double expect = in.obs[j] / (1.0 + in.s2[j] / in.prior.node_var[j]);
      worst_unary = std::max(worst_unary, std::abs(unary[j] - expect) / std::max(1.0, std::abs(expect)));
    }

    // uniform unary weights, random edge variances
    const std::vector<double> s2(in.obs.size(), 1.0);
    in.prior.node_var.assign(in.obs.size(), 2.0);
    double prev = INFINITY;
    for (double lambda : {0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0, 100.0}) {
      const auto x = solve_map(assemble_system(as_map(in.obs), s2, in.prior, lambda, g,
                                               PairwiseMode::nonstationary)).values;
      double mean = 0.0;
      for (double v : x) mean += v;
      mean /= static_cast<double>(x.size());
      double var = 0.0;
      for (double v : x) var += (v - mean) * (v - mean);
      var /= static_cast<double>(x.size());
      if (var > prev * (1.0 + 1e-12)) monotone = false;
      prev = var;
    }
  }
  report(2, "limit behaviour", exact && worst_unary <= 1e-10 && monotone,
         std::string("zero noise exact: ") + (exact ? "yes" : "no") +
             fmt(", unary-only worst error %.3g (limit 1e-10)", worst_unary) +
             ", variance nonincreasing in lambda: " + (monotone ? "yes" : "no"));
}

void threshold_checks() {
  std::mt19937_64 rng(1003);
  std::normal_distribution<double> nd;
  std::uniform_int_distribution<std::size_t> len(20, 3000);
  const double limits[] = {0.001, 0.005, 0.01, 0.05, 0.1};
  int sort_ok = 0, golden_ok = 0;
  for (int i = 0; i < 100; ++i) {
    std::vector<double> v(len(rng));
    for (auto& x : v) x = i % 4 == 0 ? std::round(3.0 * nd(rng)) : nd(rng);
    const double l = limits[i % 5];
    const double tau = threshold_from_pooled(v, 1, l).tau;
    if (tau == oracle::brute_force_threshold(v, l)) ++sort_ok;
    const double g = golden_section_threshold(v, l);
    double next = INFINITY;
    for (double x : v)
      if (x > tau) next = std::min(next, x);
    if (g >= tau && (g < next || g == tau)) ++golden_ok;
  }
  report(3, "threshold minimal and feasible", sort_ok == 100 && golden_ok == 100,
         std::to_string(sort_ok) + "/100 equal to brute force, " + std::to_string(golden_ok) +
             "/100 golden-section within one gap");
}

void unary_differs() {
  synth::SynthConfig sc;
  sc.width = sc.height = 50;
  sc.n_controls = sc.n_cases = 40;
  sc.effect_size = 1.4;
  sc.seed = 1004;
  const auto sd = synth::generate_dataset(sc);
  const auto g = build_grid_graph(50, 50);
  RsmConfig cfg;
  cfg.n_bs = 20;
  cfg.lambda = 0.0;
  cfg.pairwise_mode = PairwiseMode::none;
  const ClassifierSpec spec{ClassifierKind::ewgmm, 1.0};
  std::vector<std::size_t> train_rows, test_rows;
  for (std::size_t i = 0; i < sd.data.size(); ++i) (i % 8 == 0 ? test_rows : train_rows).push_back(i);
  const auto fit = fit_rsm(spec, sd.data, train_rows, g, cfg, 1004);
  std::size_t differ = 0, total = 0;
  for (auto r : test_rows) {
    const auto ev = gather_evidence(fit, sd.data.row(r));
    const auto x = reconstruct(ev, fit.prior, 0.0, PairwiseMode::none, g);
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (!std::isfinite(fit.prior.node_var[j])) continue;
      ++total;
      const double w = ev.noise.mean_map[j];
      differ += std::abs(x[j] - w) > 1e-12 * std::max(1.0, std::abs(w));
    }
  }
  const double frac = static_cast<double>(differ) / static_cast<double>(total);
  report(8, "unary-only output differs from WBS", frac >= 0.99,
         fmt("%.4f of sites differ (limit 0.99)", frac));
}

ExperimentConfig scaled(std::vector<double> effects, std::vector<ClassifierKind> classifiers,
                        std::vector<double> lambdas, std::size_t shuffles) {
  ExperimentConfig c;
  c.synth.width = c.synth.height = 50;
  c.effect_sizes = std::move(effects);
  c.classifiers = std::move(classifiers);
  c.methods = {Method::nbs, Method::wbs, Method::rsm, Method::rsm_stationary, Method::rsm_unary,
               Method::outlier};
  c.lambdas = std::move(lambdas);
  c.l_fprs = {0.01, 0.001};
  c.shuffles = shuffles;
  c.folds = 5;
  c.n_bs = 20;
  c.seed = 2024;
  return c;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
  parallel::set_jobs(1);
  solver_equivalence();
  limit_checks();
  threshold_checks();

  const auto cfg = scaled({1.0, 1.4, 2.0}, {ClassifierKind::ewgmm}, {1.0, 2.5, 5.0}, 2);
  auto t0 = std::chrono::steady_clock::now();
  const auto rep = run_experiment(cfg);
  record(fmt("scaled experiment took %.0f s", seconds_since(t0)));
  const auto E = ClassifierKind::ewgmm;
  auto row = [&](double effect, Method m, double lambda, double l) -> const SummaryRow& {
    return rep.find(effect, E, m, lambda, l);
  };

  {  // 4
    bool ok = true;
    double worst = 0.0;
    for (double e : cfg.effect_sizes)
      for (auto m : cfg.methods)
        for (double lambda : cfg.lambdas) {
          const double f = row(e, m, lambda, 0.01).fpr_mean;
          worst = std::max(worst, f);
          ok = ok && f <= 0.015;
        }
    report(4, "FPR control at l_fpr 0.01", ok, fmt("worst mean control FPR %.4f (limit 0.015)", worst));
    for (double e : cfg.effect_sizes)
      for (auto m : {Method::wbs, Method::rsm, Method::outlier})
        record("FPR at l_fpr 0.001, effect " + fmt("%.1f", e) + " " + std::string(to_string(m)) +
               fmt(" (lambda 1): %.5f", row(e, m, 1.0, 0.001).fpr_mean));
  }

  {  // 5
    bool ok = true;
    std::string detail;
    for (double e : {1.4, 2.0})
      for (double lambda : {1.0, 2.5}) {
        const double r = row(e, Method::rsm, lambda, 0.01).dsc_mean;
        const double w = row(e, Method::wbs, lambda, 0.01).dsc_mean;
        ok = ok && r - w >= 0.02;
        detail += fmt("e%.1f", e) + fmt2("/l%.1f rsm %.3f", lambda, r) + fmt(" wbs %.3f; ", w);
      }
    report(5, "RSM beats WBS by at least 0.02 DSC", ok, detail);
  }

  {  // 6
    bool ok = true;
    std::string bad;
    for (auto m : cfg.methods)
      for (double lambda : cfg.lambdas) {
        const double a = row(1.0, m, lambda, 0.01).dsc_mean;
        const double b = row(1.4, m, lambda, 0.01).dsc_mean;
        const double c = row(2.0, m, lambda, 0.01).dsc_mean;
        if (!(c > b && b > a)) {
          ok = false;
          bad += std::string(to_string(m)) + fmt("/l%.1f ", lambda) + fmt2("%.3f %.3f ", a, b) + fmt("%.3f; ", c);
        }
      }
    report(6, "DSC increases with effect size", ok, ok ? "every method and lambda" : bad);
  }

  {  // 7
    const auto& o = row(2.0, Method::outlier, 1.0, 0.01);
    double rsm_min = INFINITY;
    for (double lambda : cfg.lambdas) rsm_min = std::min(rsm_min, row(2.0, Method::rsm, lambda, 0.01).dsc_mean);
    const bool ok = o.dsc_mean >= 0.25 && o.dsc_mean <= 0.60 && o.dsc_mean < rsm_min && o.fpr_mean <= 0.015;
    report(7, "outlier detection is weaker", ok,
           fmt2("outlier DSC %.3f FPR %.4f", o.dsc_mean, o.fpr_mean) + fmt(", lowest RSM DSC %.3f", rsm_min));
  }

  unary_differs();

  {  // 9
    const double ns = row(2.0, Method::rsm, 5.0, 0.01).dsc_mean;
    const double st = row(2.0, Method::rsm_stationary, 5.0, 0.01).dsc_mean;
    report(9, "nonstationary at least as good as stationary", ns >= st,
           fmt2("lambda 5: nonstationary %.3f, stationary %.3f", ns, st));
  }

  {  // 10
    t0 = std::chrono::steady_clock::now();
    parallel::set_jobs(4);
    const auto again = run_experiment(cfg);
    parallel::set_jobs(1);
    const bool ok = folds_csv(again) == folds_csv(rep) && shuffles_csv(again) == shuffles_csv(rep) &&
                    summary_csv(again) == summary_csv(rep);
    report(10, "byte-identical rerun", ok, fmt("jobs 1 vs jobs 4, rerun took %.0f s", seconds_since(t0)));
  }

  {  // auxiliary marker
    bool ok = true;
    std::string detail;
    for (double lambda : cfg.lambdas) {
      const auto& r = row(2.0, Method::rsm, lambda, 0.01);
      ok = ok && r.marker_r > 0.0;
      detail += fmt2("l%.1f r %.3f", lambda, r.marker_r) + fmt(" noisy %.3f; ", r.marker_r_noisy);
    }
    record(std::string("marker correlation positive: ") + (ok ? "yes" : "no") + " " + detail);
    if (!ok) {
      std::printf("[FAIL] marker correlation with the noiseless marker is not positive\n");
      ++failures;
    }
  }

  {  // logistic regression with an L1 penalty, recorded only
    t0 = std::chrono::steady_clock::now();
    const auto l1 = run_experiment(scaled({2.0}, {ClassifierKind::logreg_l1}, {1.0, 2.5}, 1));
    for (double lambda : {1.0, 2.5}) {
      const double r = l1.find(2.0, ClassifierKind::logreg_l1, Method::rsm, lambda, 0.01).dsc_mean;
      const double w = l1.find(2.0, ClassifierKind::logreg_l1, Method::wbs, lambda, 0.01).dsc_mean;
      record("LR-L1 effect 2.0" + fmt(" lambda %.1f:", lambda) + fmt2(" rsm %.3f wbs %.3f", r, w) +
             fmt(" (difference %+.3f)", r - w));
    }
    record(fmt("LR-L1 run took %.0f s", seconds_since(t0)));
  }

  std::printf("%s: %d failing criteria\n", failures ? "FAILED" : "PASSED", failures);
  return failures ? 1 : 0;
}
