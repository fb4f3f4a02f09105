#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace rsm {

/// One subject: a measurement vector and a binary condition label
/// (1 = condition present).
struct Sample {
  std::vector<double> measurements;
  int label = 0;
};

/// N samples sharing one measurement count d, stored row-major.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::size_t dim) : dim_(dim) {}

  void add(std::span<const double> measurements, int label);
  void add(const Sample& s) { add(s.measurements, s.label); }

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return labels_.empty(); }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * dim_, dim_};
  }
  int label(std::size_t i) const { return labels_[i]; }
  std::span<const std::uint8_t> labels() const noexcept { return labels_; }
  Sample sample(std::size_t i) const;

  std::size_t count(int label) const;
  /// Indices of all rows, in order.
  std::vector<std::size_t> all_rows() const;
  /// Throws TrainingError unless `rows` contains both labels.
  void require_both_classes(std::span<const std::size_t> rows) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> values_;
  std::vector<std::uint8_t> labels_;
};

/// Undirected simple graph over measurement sites. Edges are stored with
/// j < k, sorted lexicographically; edge indices refer to that order.
class NeighborhoodGraph {
 public:
  struct Edge {
    std::uint32_t j;
    std::uint32_t k;
    friend bool operator==(const Edge&, const Edge&) = default;
  };
  struct Neighbor {
    std::uint32_t node;
    std::uint32_t edge;
  };

  NeighborhoodGraph() = default;
  NeighborhoodGraph(std::size_t node_count, std::vector<std::pair<std::size_t, std::size_t>> edges);

  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const Neighbor> neighbors(std::size_t j) const {
    return {adjacency_.data() + offsets_[j], offsets_[j + 1] - offsets_[j]};
  }
  std::size_t degree(std::size_t j) const { return offsets_[j + 1] - offsets_[j]; }

  friend bool operator==(const NeighborhoodGraph& a, const NeighborhoodGraph& b) {
    return a.node_count_ == b.node_count_ && a.edges_ == b.edges_;
  }

 private:
  std::size_t node_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Neighbor> adjacency_;
};

/// 4-neighbourhood grid; node index = row * width + col.
NeighborhoodGraph build_grid_graph(std::size_t width, std::size_t height);

enum class MapRole { raw, bootstrap_mean, reconstructed };

std::string_view to_string(MapRole role);

struct EffectMap {
  std::vector<double> values;
  MapRole role = MapRole::raw;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t j) const { return values[j]; }
};

struct BinaryEffectMap {
  std::vector<std::uint8_t> detections;

  std::size_t size() const noexcept { return detections.size(); }
  std::size_t count() const;
};

}  // namespace rsm
