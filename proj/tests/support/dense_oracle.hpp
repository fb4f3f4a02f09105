#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rsm/reconstruct.hpp"

namespace oracle {

/// Direct LU solve of the assembled system, densified.
inline std::vector<double> dense_solve(const rsm::MapSystem& sys) {
  const auto n = static_cast<Eigen::Index>(sys.a.n);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    b(i) = sys.rhs[i];
    for (auto p = sys.a.row_ptr[i]; p < sys.a.row_ptr[i + 1]; ++p) a(i, sys.a.col[p]) = sys.a.val[p];
  }
  Eigen::VectorXd x = a.fullPivLu().solve(b);
  return {x.data(), x.data() + n};
}

/// Builds the dense normal equations straight from the model
/// quantities (no pinning): rows (1/s + 1/v + lam sum 1/e) x_j - lam sum x_k / e = y_j / s.
inline std::vector<double> dense_map_solution(const std::vector<double>& obs,
                                              const std::vector<double>& s2,
                                              const std::vector<double>& node_var,
                                              const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                                              const std::vector<double>& edge_var, double lambda) {
  const auto n = static_cast<Eigen::Index>(obs.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    a(j, j) = 1.0 / s2[j] + 1.0 / node_var[j];
    b(j) = obs[j] / s2[j];
  }
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto j = static_cast<Eigen::Index>(edges[e].first);
    const auto k = static_cast<Eigen::Index>(edges[e].second);
    const double w = lambda / edge_var[e];
    a(j, j) += w;
    a(k, k) += w;
    a(j, k) -= w;
    a(k, j) -= w;
  }
  Eigen::VectorXd x = a.ldlt().solve(b);
  return {x.data(), x.data() + n};
}

}  // namespace oracle
