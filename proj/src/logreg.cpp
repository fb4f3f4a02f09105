// Penalised logistic regression.
//
//   F(w, b) = sum_i log(1 + exp(-y_i (w.x_i + b))) + eta * R(w),  y in {-1,+1}
//
// L2 (R = |w|^2 / 2): truncated Newton-CG on (w, b) with Armijo backtracking,
// stopped when |grad F| <= rel_tol * |grad F(0)|.
// L1 (R = |w|_1): coordinate descent on a local quadratic model followed by a
// line search on F (the newGLMNET scheme of Yuan, Ho & Lin 2012), stopped
// when the minimum-norm subgradient is within rel_tol of its initial value.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "rsm/classifiers.hpp"
#include "rsm/error.hpp"

namespace rsm {
namespace {

double log1pexp(double t) {
  // log(1 + e^t)
  return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// Dense copy of the selected rows: row-major X (n x d) and labels in {-1,+1}.
struct Design {
  std::size_t n = 0, d = 0;
  std::vector<double> x;
  std::vector<double> y;

  Design(const Dataset& data, std::span<const std::size_t> rows) : n(rows.size()), d(data.dim()) {
    x.resize(n * d);
    y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto r = data.row(rows[i]);
      std::copy(r.begin(), r.end(), x.begin() + static_cast<std::ptrdiff_t>(i * d));
      y[i] = data.label(rows[i]) ? 1.0 : -1.0;
    }
  }
  const double* row(std::size_t i) const { return x.data() + i * d; }

  // z = X w + b
  void margins(std::span<const double> w, double b, std::vector<double>& z) const {
    z.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double* xi = row(i);
      double acc = b;
      for (std::size_t j = 0; j < d; ++j) acc += xi[j] * w[j];
      z[i] = acc;
    }
  }
  double loss(std::span<const double> z) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += log1pexp(-y[i] * z[i]);
    return acc;
  }
};

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

LinearModel fit_l2(const Design& X, double eta, const LogregOptions& opt) {
  const std::size_t d = X.d, n = X.n, m = d + 1;  // last coordinate is b
  std::vector<double> theta(m, 0.0), grad(m), z, coef(n), dvec(n);

  auto objective = [&](std::span<const double> th, std::vector<double>& zz) {
    X.margins(th.first(d), th[d], zz);
    double reg = 0.0;
    for (std::size_t j = 0; j < d; ++j) reg += th[j] * th[j];
    return X.loss(zz) + 0.5 * eta * reg;
  };
  auto gradient = [&](std::span<const double> th, const std::vector<double>& zz) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double s = sigmoid(-X.y[i] * zz[i]);
      coef[i] = -X.y[i] * s;
      dvec[i] = s * (1.0 - s);
      const double* xi = X.row(i);
      for (std::size_t j = 0; j < d; ++j) grad[j] += coef[i] * xi[j];
      grad[d] += coef[i];
    }
    for (std::size_t j = 0; j < d; ++j) grad[j] += eta * th[j];
  };
  // Hessian-vector product
  std::vector<double> u(n);
  auto hess_vec = [&](std::span<const double> v, std::span<double> out) {
    for (std::size_t i = 0; i < n; ++i) {
      const double* xi = X.row(i);
      double acc = v[d];
      for (std::size_t j = 0; j < d; ++j) acc += xi[j] * v[j];
      u[i] = dvec[i] * acc;
    }
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double* xi = X.row(i);
      for (std::size_t j = 0; j < d; ++j) out[j] += u[i] * xi[j];
      out[d] += u[i];
    }
    for (std::size_t j = 0; j < d; ++j) out[j] += eta * v[j];
  };

  double f = objective(theta, z);
  gradient(theta, z);
  const double g0 = std::sqrt(dot(grad, grad));
  const double tol = opt.rel_tol * std::max(g0, 1e-300);
  std::vector<double> p(m), r(m), dir(m), hd(m), trial(m), ztrial;

  for (std::size_t iter = 0;; ++iter) {
    const double gnorm = std::sqrt(dot(grad, grad));
    if (gnorm <= tol) break;
    if (iter >= opt.max_iter) {
      throw TrainingError("logistic regression (L2) did not converge; gradient norm " +
                          std::to_string(gnorm));
    }
    // CG on H p = -g, forcing term min(0.5, sqrt|g|/|g0|)
    std::fill(p.begin(), p.end(), 0.0);
    for (std::size_t j = 0; j < m; ++j) r[j] = -grad[j];
    dir = r;
    double rr = dot(r, r);
    const double cg_tol = std::min(0.5, std::sqrt(gnorm / std::max(g0, 1e-300))) * gnorm;
    for (std::size_t k = 0; k < 2 * m && std::sqrt(rr) > cg_tol; ++k) {
      hess_vec(dir, hd);
      const double curv = dot(dir, hd);
      if (curv <= 0.0) break;
      const double a = rr / curv;
      for (std::size_t j = 0; j < m; ++j) {
        p[j] += a * dir[j];
        r[j] -= a * hd[j];
      }
      const double rr_new = dot(r, r);
      const double beta = rr_new / rr;
      rr = rr_new;
      for (std::size_t j = 0; j < m; ++j) dir[j] = r[j] + beta * dir[j];
    }
    double slope = dot(grad, p);
    if (!(slope < 0.0)) {
      for (std::size_t j = 0; j < m; ++j) p[j] = -grad[j];
      slope = -dot(grad, grad);
    }
    double step = 1.0, f_new = f;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t j = 0; j < m; ++j) trial[j] = theta[j] + step * p[j];
      f_new = objective(trial, ztrial);
      if (f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no further decrease representable
    theta.swap(trial);
    z.swap(ztrial);
    f = f_new;
    gradient(theta, z);
  }

  LinearModel model;
  model.kind = ClassifierKind::logreg_l2;
  model.eta = eta;
  model.w.assign(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(d));
  model.b = theta[d];
  return model;
}

// Minimum-norm subgradient violation of the L1 problem (inf-norm).
double l1_violation(std::span<const double> g, double gb, std::span<const double> w, double eta) {
  double v = std::fabs(gb);
  for (std::size_t j = 0; j < w.size(); ++j) {
    double e;
    if (w[j] > 0) e = std::fabs(g[j] + eta);
    else if (w[j] < 0) e = std::fabs(g[j] - eta);
    else e = std::max(0.0, std::fabs(g[j]) - eta);
    v = std::max(v, e);
  }
  return v;
}

LinearModel fit_l1(const Design& X, double eta, const LogregOptions& opt) {
  const std::size_t n = X.n, d = X.d;
  // column-major copy for coordinate access
  std::vector<double> xt(d * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) xt[j * n + i] = X.x[i * d + j];
  auto col = [&](std::size_t j) { return xt.data() + j * n; };

  std::vector<double> w(d, 0.0), g(d), hdiag(d), z(n, 0.0), coef(n), dvec(n);
  double b = 0.0, gb = 0.0, hb = 0.0;
  constexpr double kNu = 1e-12;

  auto l1norm = [](std::span<const double> v) {
    double a = 0.0;
    for (double t : v) a += std::fabs(t);
    return a;
  };
  auto derivatives = [&] {
    gb = 0.0;
    hb = kNu;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = sigmoid(-X.y[i] * z[i]);
      coef[i] = -X.y[i] * s;
      dvec[i] = s * (1.0 - s);
      gb += coef[i];
      hb += dvec[i];
    }
    for (std::size_t j = 0; j < d; ++j) {
      const double* c = col(j);
      double gj = 0.0, hj = kNu;
      for (std::size_t i = 0; i < n; ++i) {
        gj += coef[i] * c[i];
        hj += dvec[i] * c[i] * c[i];
      }
      g[j] = gj;
      hdiag[j] = hj;
    }
  };

  double f = X.loss(z) + eta * l1norm(w);
  derivatives();
  const double v0 = l1_violation(g, gb, w, eta);
  const double tol = opt.rel_tol * std::max({v0, std::fabs(gb), 1e-300});

  std::vector<double> delta(d), r(n), z_trial(n), w_trial(d);
  std::vector<std::size_t> active;
  for (std::size_t iter = 0;; ++iter) {
    const double viol = l1_violation(g, gb, w, eta);
    if (viol <= tol) break;
    if (iter >= opt.max_iter) {
      throw TrainingError("logistic regression (L1) did not converge; subgradient violation " +
                          std::to_string(viol));
    }
    // Coordinates that are zero with |g_j| comfortably below eta stay zero.
    active.clear();
    for (std::size_t j = 0; j < d; ++j)
      if (w[j] != 0.0 || std::fabs(g[j]) > eta - 0.5 * viol) active.push_back(j);

    std::fill(delta.begin(), delta.end(), 0.0);
    std::fill(r.begin(), r.end(), 0.0);  // r = X delta + delta_b
    double delta_b = 0.0;
    for (int pass = 0; pass < 25; ++pass) {
      double change = 0.0;
      {
        // intercept (unpenalised)
        double gq = gb;
        for (std::size_t i = 0; i < n; ++i) gq += dvec[i] * r[i];
        const double step = -gq / hb;
        delta_b += step;
        for (std::size_t i = 0; i < n; ++i) r[i] += step;
        change = std::max(change, hb * step * step);
      }
      for (auto j : active) {
        const double* c = col(j);
        double gq = g[j];
        for (std::size_t i = 0; i < n; ++i) gq += dvec[i] * c[i] * r[i];
        const double a = hdiag[j];
        const double u = w[j] + delta[j];
        const double target = u - gq / a;
        const double thr = eta / a;
        const double zj = target > thr ? target - thr : (target < -thr ? target + thr : 0.0);
        const double step = zj - u;
        if (step == 0.0) continue;
        delta[j] += step;
        for (std::size_t i = 0; i < n; ++i) r[i] += step * c[i];
        change = std::max(change, a * step * step);
      }
      if (change <= 1e-2 * tol * tol) break;
    }

    // Armijo on F along (delta, delta_b)
    double lin = gb * delta_b;
    for (auto j : active) lin += g[j] * delta[j];
    const double l1_old = l1norm(w);
    double step = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t j = 0; j < d; ++j) w_trial[j] = w[j] + step * delta[j];
      for (std::size_t i = 0; i < n; ++i) z_trial[i] = z[i] + step * r[i];
      const double l1_new = l1norm(w_trial);
      const double f_new = X.loss(z_trial) + eta * l1_new;
      const double model_decrease = step * lin + eta * (l1_new - l1_old);
      if (f_new <= f + 0.01 * std::min(model_decrease, 0.0) || f_new < f) {
        f = f_new;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    w.swap(w_trial);
    z.swap(z_trial);
    b += step * delta_b;
    derivatives();
  }

  LinearModel model;
  model.kind = ClassifierKind::logreg_l1;
  model.eta = eta;
  model.w = std::move(w);
  model.b = b;
  return model;
}

}  // namespace

double logreg_objective(const Dataset& data, std::span<const std::size_t> rows,
                        std::span<const double> w, double b, double eta, Penalty penalty) {
  Design X(data, rows);
  std::vector<double> z;
  X.margins(w, b, z);
  double reg = 0.0;
  for (double v : w) reg += penalty == Penalty::L2 ? 0.5 * v * v : std::fabs(v);
  return X.loss(z) + eta * reg;
}

LinearModel train_logreg(const Dataset& data, std::span<const std::size_t> rows, double eta,
                         Penalty penalty, const LogregOptions& opt) {
  if (!(eta >= 0.0)) throw ConfigError("logistic regression eta must be non-negative");
  data.require_both_classes(rows);
  if (eta == 0.0 && data.dim() > rows.size()) {
    throw ConfigError("eta > 0 required when measurements outnumber samples");
  }
  Design X(data, rows);
  return penalty == Penalty::L2 ? fit_l2(X, eta, opt) : fit_l1(X, eta, opt);
}

}  // namespace rsm
