#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "rsm/numerics.hpp"

using namespace rsm;

TEST_CASE("normal quantile against bisection") {
  for (double p : {1e-9, 1e-6, 0.01, 0.2, 0.5, 0.7, 0.975, 1 - 1e-6}) {
    CHECK(normal_quantile(p) == doctest::Approx(oracle::probit_bisect(p)).epsilon(1e-9));
  }
  CHECK(normal_quantile(1 - 1e-6) == doctest::Approx(4.753424).epsilon(1e-6));
}

TEST_CASE("probit from log odds") {
  CHECK(probit_from_log_odds(0.0, 1e-6) == 0.0);
  for (double lo : {-30.0, -5.0, -0.3, 0.7, 4.0, 13.0}) {
    const double p = 1.0 / (1.0 + std::exp(-lo));
    const double clamped = std::min(std::max(p, 1e-6), 1 - 1e-6);
    CHECK(probit_from_log_odds(lo, 1e-6) == doctest::Approx(oracle::probit_bisect(clamped)).epsilon(1e-8));
    CHECK(probit_from_log_odds(-lo, 1e-6) == -probit_from_log_odds(lo, 1e-6));
  }
  // saturation
  CHECK(probit_from_log_odds(200.0, 1e-6) == doctest::Approx(4.7534243).epsilon(1e-7));
}

TEST_CASE("column moments are population moments") {
  const std::vector<double> block{0, 1, 2, 5};  // 2 rows x 2 cols
  const auto m = column_moments(block, 2, 2);
  CHECK(m.mean[0] == 1.0);
  CHECK(m.variance[0] == 1.0);
  CHECK(m.mean[1] == 3.0);
  CHECK(m.variance[1] == 4.0);
}

TEST_CASE("median of positive entries") {
  CHECK(median_positive(std::vector<double>{0, -1, 3, 1, 2}) == 2.0);
  CHECK(median_positive(std::vector<double>{0, 0}) == 0.0);
  CHECK(median_positive(std::vector<double>{4, 2}) == 3.0);
}

TEST_CASE("derived seeds") {
  CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  CHECK(derive_seed(1, {2}) != derive_seed(2, {2}));
}
