#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "rsm/classifiers.hpp"
#include "rsm/estimation.hpp"

namespace rsm::io {

// Field names:
//   linear: {"kind": "svm"|"logreg_l2"|"logreg_l1", "eta", "b", "w": [...]}
//   ew-GMM: {"kind": "ewgmm", "prior0", "prior1", "mu0", "sigma0", "mu1", "sigma1"}
nlohmann::json model_to_json(const Model& model);
Model model_from_json(const nlohmann::json& j);

void save_model(const Model& model, const std::filesystem::path& path,
                const nlohmann::json& metadata = nlohmann::json::object());
Model load_model(const std::filesystem::path& path);

// {"node_var", "edge_var", "edge_mean", "mean_of_means", "stationary_var"}
nlohmann::json prior_to_json(const PriorParams& prior);
PriorParams prior_from_json(const nlohmann::json& j);

void save_prior(const PriorParams& prior, const std::filesystem::path& path,
                const nlohmann::json& metadata = nlohmann::json::object());
PriorParams load_prior(const std::filesystem::path& path);

}  // namespace rsm::io
