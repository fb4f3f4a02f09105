#include "rsm/model_io.hpp"

#include "rsm/error.hpp"
#include "rsm/io.hpp"

namespace rsm::io {

nlohmann::json model_to_json(const Model& model) {
  nlohmann::json j;
  if (const auto* g = std::get_if<EwGmmModel>(&model)) {
    j["kind"] = "ewgmm";
    j["prior0"] = g->prior0;
    j["prior1"] = g->prior1;
    j["mu0"] = g->mu0;
    j["sigma0"] = g->sigma0;
    j["mu1"] = g->mu1;
    j["sigma1"] = g->sigma1;
  } else {
    const auto& m = std::get<LinearModel>(model);
    j["kind"] = std::string(to_string(m.kind));
    j["eta"] = m.eta;
    j["b"] = m.b;
    j["w"] = m.w;
  }
  return j;
}

Model model_from_json(const nlohmann::json& j) {
  try {
    const auto kind = classifier_kind_from_string(j.at("kind").get<std::string>());
    if (kind == ClassifierKind::ewgmm) {
      EwGmmModel g;
      g.prior0 = j.at("prior0").get<double>();
      g.prior1 = j.at("prior1").get<double>();
      g.mu0 = j.at("mu0").get<std::vector<double>>();
      g.sigma0 = j.at("sigma0").get<std::vector<double>>();
      g.mu1 = j.at("mu1").get<std::vector<double>>();
      g.sigma1 = j.at("sigma1").get<std::vector<double>>();
      const auto d = g.mu0.size();
      if (g.sigma0.size() != d || g.mu1.size() != d || g.sigma1.size() != d) {
        throw DimensionError("ew-GMM parameter arrays differ in length");
      }
      return g;
    }
    LinearModel m;
    m.kind = kind;
    m.eta = j.at("eta").get<double>();
    m.b = j.at("b").get<double>();
    m.w = j.at("w").get<std::vector<double>>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed model JSON: ") + e.what());
  }
}

void save_model(const Model& model, const std::filesystem::path& path,
                const nlohmann::json& metadata) {
  auto j = model_to_json(model);
  if (!metadata.empty()) j["metadata"] = metadata;
  write_file_atomic(path, j.dump(2) + "\n");
}

Model load_model(const std::filesystem::path& path) {
  try {
    return model_from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

nlohmann::json prior_to_json(const PriorParams& prior) {
  nlohmann::json j;
  j["node_var"] = prior.node_var;
  j["edge_var"] = prior.edge_var;
  j["edge_mean"] = prior.edge_mean;
  j["mean_of_means"] = prior.mean_of_means;
  j["stationary_var"] = prior.stationary_var;
  return j;
}

PriorParams prior_from_json(const nlohmann::json& j) {
  try {
    PriorParams p;
    p.node_var = j.at("node_var").get<std::vector<double>>();
    p.edge_var = j.at("edge_var").get<std::vector<double>>();
    p.edge_mean = j.at("edge_mean").get<std::vector<double>>();
    p.mean_of_means = j.at("mean_of_means").get<std::vector<double>>();
    p.stationary_var = j.at("stationary_var").get<double>();
    if (p.edge_mean.size() != p.edge_var.size() || p.mean_of_means.size() != p.node_var.size()) {
      throw DimensionError("prior arrays differ in length");
    }
    for (double v : p.node_var)
      if (!(v > 0.0)) throw ConfigError("node variances must be positive");
    for (double v : p.edge_var)
      if (!(v > 0.0)) throw ConfigError("edge variances must be positive");
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed prior JSON: ") + e.what());
  }
}

void save_prior(const PriorParams& prior, const std::filesystem::path& path,
                const nlohmann::json& metadata) {
  auto j = prior_to_json(prior);
  if (!metadata.empty()) j["metadata"] = metadata;
  write_file_atomic(path, j.dump(2) + "\n");
}

PriorParams load_prior(const std::filesystem::path& path) {
  try {
    return prior_from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace rsm::io
