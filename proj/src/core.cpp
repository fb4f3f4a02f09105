#include "rsm/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "rsm/error.hpp"

namespace rsm {

void Dataset::add(std::span<const double> measurements, int label) {
  if (dim_ == 0 && labels_.empty()) dim_ = measurements.size();
  if (measurements.size() != dim_ || dim_ == 0) {
    throw DimensionError("sample has " + std::to_string(measurements.size()) +
                         " measurements, dataset expects " + std::to_string(dim_));
  }
  if (label != 0 && label != 1) {
    throw ConfigError("label must be 0 or 1, got " + std::to_string(label));
  }
  for (double v : measurements) {
    if (!std::isfinite(v)) throw ConfigError("non-finite measurement");
  }
  values_.insert(values_.end(), measurements.begin(), measurements.end());
  labels_.push_back(static_cast<std::uint8_t>(label));
}

Sample Dataset::sample(std::size_t i) const {
  auto r = row(i);
  return Sample{std::vector<double>(r.begin(), r.end()), label(i)};
}

std::size_t Dataset::count(int label) const {
  return static_cast<std::size_t>(
      std::count(labels_.begin(), labels_.end(), static_cast<std::uint8_t>(label)));
}

std::vector<std::size_t> Dataset::all_rows() const {
  std::vector<std::size_t> rows(size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

void Dataset::require_both_classes(std::span<const std::size_t> rows) const {
  bool has0 = false, has1 = false;
  for (auto r : rows) (labels_[r] ? has1 : has0) = true;
  if (!has0 || !has1) throw TrainingError("training set must contain both classes");
}

NeighborhoodGraph::NeighborhoodGraph(std::size_t node_count,
                                     std::vector<std::pair<std::size_t, std::size_t>> edges)
    : node_count_(node_count) {
  edges_.reserve(edges.size());
  for (auto [a, b] : edges) {
    if (a >= node_count || b >= node_count) {
      throw ConfigError("edge (" + std::to_string(a) + "," + std::to_string(b) +
                        ") out of range for " + std::to_string(node_count) + " nodes");
    }
    if (a == b) throw ConfigError("self-loop at node " + std::to_string(a));
    if (a > b) std::swap(a, b);
    edges_.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)});
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& x, const Edge& y) {
    return x.j != y.j ? x.j < y.j : x.k < y.k;
  });
  if (auto dup = std::adjacent_find(edges_.begin(), edges_.end()); dup != edges_.end()) {
    throw ConfigError("duplicate edge (" + std::to_string(dup->j) + "," +
                      std::to_string(dup->k) + ")");
  }

  std::vector<std::size_t> deg(node_count, 0);
  for (const auto& e : edges_) {
    ++deg[e.j];
    ++deg[e.k];
  }
  offsets_.assign(node_count + 1, 0);
  for (std::size_t j = 0; j < node_count; ++j) offsets_[j + 1] = offsets_[j] + deg[j];
  adjacency_.resize(offsets_.back());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::uint32_t e = 0; e < edges_.size(); ++e) {
    adjacency_[fill[edges_[e].j]++] = {edges_[e].k, e};
    adjacency_[fill[edges_[e].k]++] = {edges_[e].j, e};
  }
}

NeighborhoodGraph build_grid_graph(std::size_t width, std::size_t height) {
  if (width == 0 || height == 0) throw ConfigError("grid dimensions must be positive");
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  edges.reserve(2 * width * height);
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      const std::size_t j = r * width + c;
      if (c + 1 < width) edges.emplace_back(j, j + 1);
      if (r + 1 < height) edges.emplace_back(j, j + width);
    }
  }
  return NeighborhoodGraph(width * height, std::move(edges));
}

std::string_view to_string(MapRole role) {
  switch (role) {
    case MapRole::raw: return "raw";
    case MapRole::bootstrap_mean: return "bootstrap_mean";
    case MapRole::reconstructed: return "reconstructed";
  }
  return "unknown";
}

std::size_t BinaryEffectMap::count() const {
  return static_cast<std::size_t>(std::count(detections.begin(), detections.end(), 1));
}

}  // namespace rsm
