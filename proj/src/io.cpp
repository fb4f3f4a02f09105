#include "rsm/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "rsm/error.hpp"

namespace rsm::io {
namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

// Iterates non-empty, non-comment lines, reporting 1-based line numbers.
template <typename F>
void for_each_line(std::string_view text, F&& f) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    ++line_no;
    auto line = trim(text.substr(pos, nl - pos));
    if (!line.empty() && line.front() != '#') f(line, line_no);
    pos = nl + 1;
  }
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    auto next = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, next == std::string_view::npos ? next : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    auto b = s.find_first_not_of(" \t", pos);
    if (b == std::string_view::npos) break;
    auto e = s.find_first_of(" \t", b);
    if (e == std::string_view::npos) e = s.size();
    out.push_back(s.substr(b, e - b));
    pos = e;
  }
  return out;
}

std::size_t parse_index(std::string_view text, const std::string& source, std::size_t line) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || p != text.data() + text.size()) {
    throw ParseError(source, line, "expected non-negative integer, got '" + std::string(text) + "'");
  }
  return v;
}

void append_comment(std::string& out, std::string_view comment) {
  if (comment.empty()) return;
  if (comment.front() != '#') out += "# ";
  out += comment;
  out += '\n';
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw Error("failed to format double");
  return std::string(buf, p);
}

double parse_double(std::string_view text, const std::string& source, std::size_t line) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || p != text.data() + text.size() || text.empty()) {
    throw ParseError(source, line, "expected number, got '" + std::string(text) + "'");
  }
  return v;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string dataset_to_csv(const Dataset& data, std::string_view comment) {
  std::string out;
  append_comment(out, comment);
  out += "label";
  for (std::size_t j = 0; j < data.dim(); ++j) out += ",m" + std::to_string(j);
  out += '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    out += std::to_string(data.label(i));
    for (double v : data.row(i)) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

Dataset dataset_from_csv(std::string_view text, const std::string& source) {
  std::size_t dim = 0;
  bool header_seen = false;
  Dataset data;
  std::vector<double> row;
  for_each_line(text, [&](std::string_view line, std::size_t no) {
    auto fields = split(line, ',');
    if (!header_seen) {
      if (fields.empty() || fields[0] != "label" || fields.size() < 2) {
        throw ParseError(source, no, "header must be 'label,m0,...'");
      }
      dim = fields.size() - 1;
      data = Dataset(dim);
      header_seen = true;
      return;
    }
    if (fields.size() != dim + 1) {
      throw ParseError(source, no, "expected " + std::to_string(dim + 1) + " fields, got " +
                                       std::to_string(fields.size()));
    }
    const auto label = parse_index(fields[0], source, no);
    if (label > 1) throw ParseError(source, no, "label must be 0 or 1");
    row.resize(dim);
    for (std::size_t j = 0; j < dim; ++j) row[j] = parse_double(fields[j + 1], source, no);
    data.add(row, static_cast<int>(label));
  });
  if (!header_seen) throw ParseError(source, 1, "missing header");
  return data;
}

Dataset load_dataset_csv(const std::filesystem::path& path) {
  return dataset_from_csv(read_file(path), path.string());
}

void save_dataset_csv(const Dataset& data, const std::filesystem::path& path,
                      std::string_view comment) {
  write_file_atomic(path, dataset_to_csv(data, comment));
}

std::string graph_to_edgelist(const NeighborhoodGraph& graph, std::string_view comment) {
  std::string out;
  append_comment(out, comment);
  out += "nodes=" + std::to_string(graph.node_count()) + '\n';
  for (const auto& e : graph.edges()) {
    out += std::to_string(e.j);
    out += ' ';
    out += std::to_string(e.k);
    out += '\n';
  }
  return out;
}

NeighborhoodGraph graph_from_edgelist(std::string_view text, const std::string& source) {
  std::size_t nodes = 0;
  bool header_seen = false;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for_each_line(text, [&](std::string_view line, std::size_t no) {
    if (!header_seen) {
      if (!line.starts_with("nodes=")) throw ParseError(source, no, "first line must be nodes=<d>");
      nodes = parse_index(trim(line.substr(6)), source, no);
      header_seen = true;
      return;
    }
    auto f = split_ws(line);
    if (f.size() != 2) throw ParseError(source, no, "expected 'j k'");
    const auto j = parse_index(f[0], source, no);
    const auto k = parse_index(f[1], source, no);
    if (j >= nodes || k >= nodes) throw ParseError(source, no, "node index out of range");
    if (j == k) throw ParseError(source, no, "self-loop");
    edges.emplace_back(j, k);
  });
  if (!header_seen) throw ParseError(source, 1, "missing nodes=<d> header");
  return NeighborhoodGraph(nodes, std::move(edges));
}

NeighborhoodGraph load_graph_edgelist(const std::filesystem::path& path) {
  return graph_from_edgelist(read_file(path), path.string());
}

void save_graph_edgelist(const NeighborhoodGraph& graph, const std::filesystem::path& path,
                         std::string_view comment) {
  write_file_atomic(path, graph_to_edgelist(graph, comment));
}

std::string values_to_csv(std::span<const double> values, std::string_view comment) {
  std::string out;
  append_comment(out, comment);
  for (double v : values) {
    out += format_double(v);
    out += '\n';
  }
  return out;
}

std::vector<double> values_from_csv(std::string_view text, const std::string& source) {
  std::vector<double> values;
  for_each_line(text, [&](std::string_view line, std::size_t no) {
    if (line.find(',') != std::string_view::npos) {
      throw ParseError(source, no, "map files hold a single column");
    }
    values.push_back(parse_double(line, source, no));
  });
  return values;
}

void save_map_csv(const EffectMap& map, const std::filesystem::path& path,
                  std::string_view comment) {
  write_file_atomic(path, values_to_csv(map.values, comment));
}

EffectMap load_map_csv(const std::filesystem::path& path, MapRole role) {
  return EffectMap{values_from_csv(read_file(path), path.string()), role};
}

void save_binary_map_csv(const BinaryEffectMap& map, const std::filesystem::path& path,
                         std::string_view comment) {
  std::string out;
  append_comment(out, comment);
  for (auto q : map.detections) out += q ? "1\n" : "0\n";
  write_file_atomic(path, out);
}

BinaryEffectMap load_binary_map_csv(const std::filesystem::path& path) {
  const auto source = path.string();
  BinaryEffectMap map;
  for_each_line(read_file(path), [&](std::string_view line, std::size_t no) {
    if (line == "0") map.detections.push_back(0);
    else if (line == "1") map.detections.push_back(1);
    else throw ParseError(source, no, "expected 0 or 1");
  });
  return map;
}

std::string provenance_comment(std::string_view config_hash, unsigned long long seed) {
  return "# config_hash=" + std::string(config_hash) + " seed=" + std::to_string(seed);
}

}  // namespace rsm::io
