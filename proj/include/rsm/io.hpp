#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rsm/core.hpp"

namespace rsm::io {

// Text formats. Lines starting with '#' are comments and are skipped by
// every loader; writers use them to stamp provenance (config hash, seed).
//
//   dataset:   header `label,m0,...,m{d-1}`, one sample per row
//   edge list: first line `nodes=<d>`, then `j k` per line
//   maps:      one value per line (reals, or 0/1 flags)
//
// Reals are written in shortest round-trip form, so load(save(x)) == x.

std::string format_double(double v);
double parse_double(std::string_view text, const std::string& source, std::size_t line);

/// Writes to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

std::string dataset_to_csv(const Dataset& data, std::string_view comment = {});
Dataset dataset_from_csv(std::string_view text, const std::string& source = "<dataset>");
Dataset load_dataset_csv(const std::filesystem::path& path);
void save_dataset_csv(const Dataset& data, const std::filesystem::path& path,
                      std::string_view comment = {});

std::string graph_to_edgelist(const NeighborhoodGraph& graph, std::string_view comment = {});
NeighborhoodGraph graph_from_edgelist(std::string_view text, const std::string& source = "<graph>");
NeighborhoodGraph load_graph_edgelist(const std::filesystem::path& path);
void save_graph_edgelist(const NeighborhoodGraph& graph, const std::filesystem::path& path,
                         std::string_view comment = {});

std::string values_to_csv(std::span<const double> values, std::string_view comment = {});
std::vector<double> values_from_csv(std::string_view text, const std::string& source = "<map>");
void save_map_csv(const EffectMap& map, const std::filesystem::path& path,
                  std::string_view comment = {});
EffectMap load_map_csv(const std::filesystem::path& path, MapRole role = MapRole::raw);

void save_binary_map_csv(const BinaryEffectMap& map, const std::filesystem::path& path,
                         std::string_view comment = {});
BinaryEffectMap load_binary_map_csv(const std::filesystem::path& path);

/// Builds a `# key=value ...` stamp line (without trailing newline).
std::string provenance_comment(std::string_view config_hash, unsigned long long seed);

}  // namespace rsm::io
