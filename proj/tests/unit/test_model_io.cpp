#include <doctest.h>

#include <filesystem>

#include "rsm/error.hpp"
#include "rsm/io.hpp"
#include "rsm/model_io.hpp"

using namespace rsm;
namespace fs = std::filesystem;

namespace {
fs::path tmp(const char* name) {
  auto dir = fs::temp_directory_path() / "rsm_test_model_io";
  fs::create_directories(dir);
  return dir / name;
}
}  // namespace

TEST_CASE("linear model round trip") {
  LinearModel m;
  m.w = {0.1, -1.0 / 3.0, 1e-300};
  m.b = 2.5;
  m.kind = ClassifierKind::logreg_l1;
  m.eta = 0.01;
  const auto p = tmp("linear.json");
  io::save_model(m, p, {{"seed", 7}});
  const auto back = std::get<LinearModel>(io::load_model(p));
  CHECK(back.w == m.w);
  CHECK(back.b == m.b);
  CHECK(back.kind == m.kind);
  CHECK(back.eta == m.eta);
}

TEST_CASE("ew-GMM round trip") {
  EwGmmModel m;
  m.mu0 = {0.0, 1.0};
  m.sigma0 = {1.0, 0.7};
  m.mu1 = {2.0, 0.1};
  m.sigma1 = {0.3, 1.1};
  m.prior0 = 0.4;
  m.prior1 = 0.6;
  const auto back = std::get<EwGmmModel>(io::model_from_json(io::model_to_json(m)));
  CHECK(back.mu0 == m.mu0);
  CHECK(back.sigma1 == m.sigma1);
  CHECK(back.prior1 == m.prior1);
}

TEST_CASE("malformed models are rejected") {
  auto j = io::model_to_json(LinearModel{{1.0}, 0.0, ClassifierKind::svm, 1.0});
  j["kind"] = "forest";
  CHECK_THROWS_AS(io::model_from_json(j), ConfigError);
  auto g = io::model_to_json(EwGmmModel{{0.0}, {1.0}, {1.0, 2.0}, {1.0}, 0.5, 0.5});
  CHECK_THROWS_AS(io::model_from_json(g), Error);
}

TEST_CASE("prior round trip and validation") {
  PriorParams p;
  p.node_var = {1.0, 2.0, 3.0};
  p.edge_var = {0.5, 0.25};
  p.edge_mean = {0.0, 0.1};
  p.mean_of_means = {0.2, 0.3, 0.4};
  p.stationary_var = 0.375;
  const auto path = tmp("prior.json");
  io::save_prior(p, path);
  const auto q = io::load_prior(path);
  CHECK(q.node_var == p.node_var);
  CHECK(q.edge_var == p.edge_var);
  CHECK(q.edge_mean == p.edge_mean);
  CHECK(q.mean_of_means == p.mean_of_means);
  CHECK(q.stationary_var == p.stationary_var);

  auto bad = io::prior_to_json(p);
  bad["node_var"][1] = -1.0;
  CHECK_THROWS_AS(io::prior_from_json(bad), Error);
}
