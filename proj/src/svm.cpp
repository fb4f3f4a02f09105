// Linear soft-margin SVM with unpenalised intercept, trained in the dual
//   max  sum(a) - 1/2 a'Qa   s.t. 0 <= a_i <= eta, sum(y_i a_i) = 0
// by SMO with second-order working-set selection (Fan, Chen & Lin 2005).
// Termination is on the primal/dual gap, with b re-optimised exactly in the
// primal for the final w.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "rsm/classifiers.hpp"
#include "rsm/error.hpp"
#include "rsm/kernels.hpp"

namespace rsm {
namespace {

constexpr double kTau = 1e-12;

// argmin_b sum_i max(0, 1 - y_i (s_i + b)); convex piecewise linear with
// breakpoints at b = y_i - s_i. Returns the midpoint of the optimal interval.
double optimal_intercept(std::span<const double> s, std::span<const double> y) {
  const std::size_t n = s.size();
  std::vector<double> bp(n);
  for (std::size_t i = 0; i < n; ++i) bp[i] = y[i] - s[i];
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return bp[a] < bp[b]; });
  // Left of every breakpoint the slope is -(#positive); each breakpoint adds 1.
  double slope = 0.0;
  for (double v : y) slope -= (v > 0 ? 1.0 : 0.0);
  if (slope >= 0.0) return n ? bp[order.front()] : 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    slope += 1.0;
    if (slope == 0.0) {
      // flat between this breakpoint and the next
      const double lo = bp[order[t]];
      const double hi = t + 1 < n ? bp[order[t + 1]] : lo;
      return 0.5 * (lo + hi);
    }
    if (slope > 0.0) return bp[order[t]];
  }
  return bp[order.back()];
}

double hinge_sum(std::span<const double> s, std::span<const double> y, double b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) acc += std::max(0.0, 1.0 - y[i] * (s[i] + b));
  return acc;
}

}  // namespace

double svm_objective(const Dataset& data, std::span<const std::size_t> rows,
                     std::span<const double> w, double b, double eta) {
  double reg = 0.0;
  for (double v : w) reg += v * v;
  double loss = 0.0;
  for (auto r : rows) {
    const double y = data.label(r) ? 1.0 : -1.0;
    double s = b;
    auto x = data.row(r);
    for (std::size_t j = 0; j < x.size(); ++j) s += w[j] * x[j];
    loss += std::max(0.0, 1.0 - y * s);
  }
  return 0.5 * reg + eta * loss;
}

LinearModel train_linear_svm(const Dataset& data, std::span<const std::size_t> rows, double eta,
                             const SvmOptions& opt) {
  if (!(eta > 0.0)) throw ConfigError("SVM eta must be positive");
  data.require_both_classes(rows);
  const std::size_t n = rows.size();
  const double C = eta;

  std::vector<double> K(n * n);
  kernels::omp::gram(data, rows, K);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = data.label(rows[i]) ? 1.0 : -1.0;

  std::vector<double> alpha(n, 0.0);
  std::vector<double> G(n, -1.0);  // gradient of 1/2 a'Qa - e'a

  auto is_upper = [&](std::size_t t) { return alpha[t] >= C; };
  auto is_lower = [&](std::size_t t) { return alpha[t] <= 0.0; };
  auto in_up = [&](std::size_t t) { return y[t] > 0 ? !is_upper(t) : !is_lower(t); };
  auto in_low = [&](std::size_t t) { return y[t] > 0 ? !is_lower(t) : !is_upper(t); };

  std::vector<double> s(n);
  auto decision_values = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t t = 0; t < n; ++t) acc += alpha[t] * y[t] * K[i * n + t];
      s[i] = acc;
    }
  };
  auto gap_at = [&](double& primal, double& b_out) {
    decision_values();
    double wnorm2 = 0.0, asum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      wnorm2 += alpha[i] * y[i] * s[i];
      asum += alpha[i];
    }
    b_out = optimal_intercept(s, y);
    primal = 0.5 * wnorm2 + C * hinge_sum(s, y, b_out);
    const double dual = asum - 0.5 * wnorm2;
    return primal - dual;
  };

  double eps = 1e-3;
  std::size_t iter = 0;
  double primal = 0.0, b = 0.0, gap = std::numeric_limits<double>::infinity();
  while (true) {
    // working-set selection
    double gmax = -std::numeric_limits<double>::infinity();
    std::size_t i_sel = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (in_up(t) && -y[t] * G[t] >= gmax) {
        gmax = -y[t] * G[t];
        i_sel = t;
      }
    }
    double gmin = std::numeric_limits<double>::infinity();
    std::size_t j_sel = n;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      const double v = -y[t] * G[t];
      gmin = std::min(gmin, v);
      if (i_sel == n) continue;
      const double diff = gmax - v;
      if (diff > 0.0) {
        double quad = K[i_sel * n + i_sel] + K[t * n + t] - 2.0 * K[i_sel * n + t];
        if (quad <= 0.0) quad = kTau;
        const double obj = -(diff * diff) / quad;
        if (obj <= best) {
          best = obj;
          j_sel = t;
        }
      }
    }

    if (i_sel == n || j_sel == n || gmax - gmin < eps) {
      gap = gap_at(primal, b);
      if (gap <= opt.rel_gap * std::max(std::fabs(primal), 1e-300)) break;
      if (eps < 1e-15) break;
      eps *= 0.1;
      continue;
    }
    if (++iter > opt.max_iter) {
      gap = gap_at(primal, b);
      throw TrainingError("SVM did not converge in " + std::to_string(opt.max_iter) +
                          " iterations; duality gap " + std::to_string(gap));
    }

    const std::size_t i = i_sel, j = j_sel;
    const double old_ai = alpha[i], old_aj = alpha[j];
    const double Qij = y[i] * y[j] * K[i * n + j];
    if (y[i] != y[j]) {
      double quad = K[i * n + i] + K[j * n + j] + 2.0 * Qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-G[i] - G[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = diff; }
      } else {
        if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = -diff; }
      }
      if (diff > 0) {
        if (alpha[i] > C) { alpha[i] = C; alpha[j] = C - diff; }
      } else {
        if (alpha[j] > C) { alpha[j] = C; alpha[i] = C + diff; }
      }
    } else {
      double quad = K[i * n + i] + K[j * n + j] - 2.0 * Qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (G[i] - G[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) { alpha[i] = C; alpha[j] = sum - C; }
      } else {
        if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = sum; }
      }
      if (sum > C) {
        if (alpha[j] > C) { alpha[j] = C; alpha[i] = sum - C; }
      } else {
        if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = sum; }
      }
    }
    const double dai = alpha[i] - old_ai, daj = alpha[j] - old_aj;
    for (std::size_t t = 0; t < n; ++t) {
      G[t] += y[t] * (y[i] * K[t * n + i] * dai + y[j] * K[t * n + j] * daj);
    }
  }

  LinearModel model;
  model.kind = ClassifierKind::svm;
  model.eta = eta;
  model.b = b;
  model.w.assign(data.dim(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (alpha[i] == 0.0) continue;
    const double coef = alpha[i] * y[i];
    auto x = data.row(rows[i]);
    for (std::size_t j = 0; j < x.size(); ++j) model.w[j] += coef * x[j];
  }
  return model;
}

}  // namespace rsm
