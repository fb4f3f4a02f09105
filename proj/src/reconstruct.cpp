#include "rsm/reconstruct.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

#include <Eigen/SparseCholesky>

#include "rsm/error.hpp"
#include "rsm/io.hpp"
#include "rsm/numerics.hpp"

namespace rsm {

std::string_view to_string(PairwiseMode m) {
  switch (m) {
    case PairwiseMode::nonstationary: return "nonstationary";
    case PairwiseMode::stationary: return "stationary";
    case PairwiseMode::none: return "none";
  }
  return "unknown";
}

PairwiseMode pairwise_mode_from_string(std::string_view s) {
  if (s == "nonstationary") return PairwiseMode::nonstationary;
  if (s == "stationary") return PairwiseMode::stationary;
  if (s == "none") return PairwiseMode::none;
  throw ConfigError("unknown pairwise mode '" + std::string(s) + "'");
}

std::string_view to_string(Observation o) {
  return o == Observation::single_model ? "single_model" : "bootstrap_mean";
}

Observation observation_from_string(std::string_view s) {
  if (s == "single_model") return Observation::single_model;
  if (s == "bootstrap_mean") return Observation::bootstrap_mean;
  throw ConfigError("unknown observation '" + std::string(s) + "'");
}

void RsmConfig::validate() const {
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be non-negative");
  if (!(l_fpr > 0.0 && l_fpr < 1.0)) throw ConfigError("l_fpr must lie in (0,1)");
  if (n_bs < 2) throw ConfigError("n_bs must be at least 2");
  if (folds < 2) throw ConfigError("folds must be at least 2");
}

MapSystem assemble_system(const EffectMap& observed, std::span<const double> sigma2,
                          const PriorParams& prior, double lambda,
                          const NeighborhoodGraph& graph, PairwiseMode mode) {
  const std::size_t d = observed.size();
  if (sigma2.size() != d || prior.node_var.size() != d || graph.node_count() != d) {
    throw DimensionError("assemble_system: inconsistent dimensions");
  }
  if (mode == PairwiseMode::nonstationary && prior.edge_var.size() != graph.edge_count()) {
    throw DimensionError("assemble_system: edge variances do not match the graph");
  }
  const bool pairwise = mode != PairwiseMode::none && lambda > 0.0 && graph.edge_count() > 0;
  if (pairwise && mode == PairwiseMode::stationary && !(prior.stationary_var > 0.0)) {
    throw ConfigError("stationary variance is not set");
  }

  double max_s2 = 0.0;
  for (double s : sigma2) {
    if (!(s >= 0.0)) throw ConfigError("noise variance must be non-negative");
    max_s2 = std::max(max_s2, s);
  }
  const double s2_floor = 1e-12 * max_s2;

  MapSystem sys;
  sys.a.n = d;
  sys.a.row_ptr.assign(1, 0);
  sys.rhs.assign(d, 0.0);
  sys.pinned.assign(d, 0);
  for (std::size_t j = 0; j < d; ++j) sys.pinned[j] = sigma2[j] == 0.0;

  auto edge_weight = [&](std::uint32_t e) {
    const double v = mode == PairwiseMode::stationary ? prior.stationary_var : prior.edge_var[e];
    assert(v > 0.0);
    return lambda / v;
  };

  std::vector<std::pair<std::uint32_t, double>> row;
  for (std::size_t j = 0; j < d; ++j) {
    if (sys.pinned[j]) {
      sys.a.col.push_back(static_cast<std::uint32_t>(j));
      sys.a.val.push_back(1.0);
      sys.rhs[j] = observed[j];
      sys.a.row_ptr.push_back(sys.a.col.size());
      continue;
    }
    assert(prior.node_var[j] > 0.0);
    const double s2 = std::max(sigma2[j], s2_floor);
    double diag = 1.0 / s2 + 1.0 / prior.node_var[j];
    double rhs = observed[j] / s2;
    // columns ascending, diagonal in place
    row.clear();
    if (pairwise) {
      for (const auto& [k, e] : graph.neighbors(j)) {
        const double w = edge_weight(e);
        diag += w;
        if (sys.pinned[k]) rhs += w * observed[k];
        else row.emplace_back(k, -w);
      }
    }
    row.emplace_back(static_cast<std::uint32_t>(j), diag);
    std::sort(row.begin(), row.end());
    for (const auto& [c, v] : row) {
      sys.a.col.push_back(c);
      sys.a.val.push_back(v);
    }
    sys.rhs[j] = rhs;
    sys.a.row_ptr.push_back(sys.a.col.size());
  }
  return sys;
}

namespace {
double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double true_residual(const CsrMatrix& a, std::span<const double> rhs, std::span<const double> x,
                     std::vector<double>& scratch) {
  kernels::serial::spmv(a, x, scratch);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.n; ++i) acc += (rhs[i] - scratch[i]) * (rhs[i] - scratch[i]);
  return std::sqrt(acc);
}

bool solve_direct(const MapSystem& system, std::vector<double>& x) {
  const auto n = static_cast<Eigen::Index>(system.a.n);
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(system.a.val.size());
  for (Eigen::Index i = 0; i < n; ++i)
    for (auto p = system.a.row_ptr[i]; p < system.a.row_ptr[i + 1]; ++p)
      t.emplace_back(i, static_cast<Eigen::Index>(system.a.col[p]), system.a.val[p]);
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower> ldlt(m);
  if (ldlt.info() != Eigen::Success) return false;
  const Eigen::Map<const Eigen::VectorXd> b(system.rhs.data(), n);
  Eigen::VectorXd sol = ldlt.solve(b);
  if (ldlt.info() != Eigen::Success) return false;
  // a few rounds of iterative refinement
  for (int round = 0; round < 5; ++round) {
    const Eigen::VectorXd r = b - m.selfadjointView<Eigen::Lower>() * sol;
    if (r.norm() <= 1e-10 * b.norm()) break;
    sol += ldlt.solve(r);
  }
  x.assign(sol.data(), sol.data() + n);
  return true;
}

}  // namespace

EffectMap solve_map(const MapSystem& system, const SolveOptions& opt, SolveStats* stats) {
  const auto& A = system.a;
  const std::size_t n = A.n;
  EffectMap out{std::vector<double>(n, 0.0), MapRole::reconstructed};
  const double bnorm = std::sqrt(dot(system.rhs, system.rhs));
  if (stats) *stats = {};
  if (n == 0 || bnorm == 0.0) return out;

  auto spmv = [&](std::span<const double> x, std::span<double> y) {
    if (opt.parallel_spmv) kernels::omp::spmv(A, x, y);
    else kernels::serial::spmv(A, x, y);
  };

  std::vector<double> inv_diag(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto p = A.row_ptr[i]; p < A.row_ptr[i + 1]; ++p) {
      if (A.col[p] == i) inv_diag[i] = 1.0 / A.val[p];
    }
  }

  auto& x = out.values;
  std::vector<double> r(system.rhs), z(n), p(n), q(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = dot(r, z);
  const std::size_t cap = opt.max_iter ? opt.max_iter : 10 * n;
  const double target = opt.rel_tol * bnorm;
  constexpr double kContract = 1e-8;

  std::size_t it = 0;
  double rnorm = bnorm;
  while (rnorm > target && it < cap) {
    spmv(p, q);
    const double pq = dot(p, q);
    if (!(pq > 0.0)) break;
    const double alpha = rz / pq;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    rnorm = std::sqrt(dot(r, r));
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    ++it;
  }
  double rel = true_residual(A, system.rhs, x, q) / bnorm;
  bool direct = false;
  if (rel > kContract && opt.direct_fallback) {
    std::vector<double> y;
    if (solve_direct(system, y)) {
      const double rel_direct = true_residual(A, system.rhs, y, q) / bnorm;
      if (rel_direct < rel) {
        x = std::move(y);
        rel = rel_direct;
        direct = true;
      }
    }
  }
  if (stats) *stats = {it, rel, direct};
  if (rel > kContract) {
    throw SolverError("MAP solve did not reach the residual bound after " + std::to_string(it) +
                          " iterations (relative residual " + io::format_double(rel) + ")",
                      rel);
  }
  return out;
}

FittedRsm fit_rsm(const ClassifierSpec& spec, const Dataset& data,
                  std::span<const std::size_t> rows, const NeighborhoodGraph& graph,
                  const RsmConfig& config, std::uint64_t seed, bool with_prior) {
  if (graph.node_count() != data.dim()) throw DimensionError("graph does not match dataset");
  FittedRsm fit;
  fit.spec = spec;
  fit.full_model = train(spec, data, rows);
  fit.ensemble = BootstrapEnsemble(spec, data, rows, config.n_bs, derive_seed(seed, {10}));
  if (with_prior)
    fit.prior = estimate_prior_params(spec, data, rows, graph, config.folds, config.n_bs,
                                      derive_seed(seed, {11}), config.use_cv);
  return fit;
}

SampleEvidence gather_evidence(const FittedRsm& fit, std::span<const double> f) {
  SampleEvidence ev;
  ev.raw = effect_map(fit.full_model, f);
  ev.noise = fit.ensemble.noise_and_mean(f);
  return ev;
}

EffectMap reconstruct(const SampleEvidence& ev, const PriorParams& prior, double lambda,
                      PairwiseMode mode, const NeighborhoodGraph& graph, Observation observation,
                      const SolveOptions& opt) {
  const auto& observed = observation == Observation::single_model ? ev.raw : ev.noise.mean_map;
  return solve_map(assemble_system(observed, ev.noise.sigma2, prior, lambda, graph, mode), opt);
}

EffectMap reconstruct_for_sample(const ClassifierSpec& spec, const Dataset& data,
                                 const PriorParams& prior, const RsmConfig& config,
                                 const NeighborhoodGraph& graph,
                                 std::span<const double> test_sample) {
  config.validate();
  if (test_sample.size() != data.dim()) throw DimensionError("test sample dimension mismatch");
  const auto rows = data.all_rows();
  SampleEvidence ev;
  ev.raw = effect_map(train(spec, data, rows), test_sample);
  ev.noise = BootstrapEnsemble(spec, data, rows, config.n_bs, derive_seed(config.seed, {10}))
                 .noise_and_mean(test_sample);
  return reconstruct(ev, prior, config.lambda, config.pairwise_mode, graph, config.observation);
}

}  // namespace rsm
