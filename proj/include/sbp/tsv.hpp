#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "sbp/errors.hpp"
#include "sbp/graph.hpp"
#include "sbp/partition.hpp"

// On-disk formats use 1-based node and block ids; everything in memory is
// 0-based. Lines starting with '#' and blank lines are skipped.

namespace sbp::io {

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == '\t' || line[pos] == ' ')) ++pos;
    if (pos >= line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && line[end] != '\t' && line[end] != ' ') ++end;
    fields.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return fields;
}

inline std::int64_t parse_integer(std::string_view field, const std::string& where) {
  std::int64_t value = 0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw DataError(where + ": not an integer: '" + std::string(field) + "'");
  return value;
}

template <class OnRecord>
void for_each_record(std::istream& in, const std::string& source, OnRecord&& on_record) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = split_fields(line);
    if (fields.empty() || fields[0].front() == '#') continue;
    on_record(fields, source + ":" + std::to_string(line_no));
  }
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace detail

// source<TAB>target[<TAB>weight]
inline std::vector<Edge> read_edges(std::istream& in, const std::string& source = "<stream>") {
  std::vector<Edge> edges;
  detail::for_each_record(in, source, [&](const auto& f, const std::string& where) {
    if (f.size() < 2 || f.size() > 3) throw DataError(where + ": expected 2 or 3 fields");
    const auto s = detail::parse_integer(f[0], where);
    const auto t = detail::parse_integer(f[1], where);
    const auto w = f.size() == 3 ? detail::parse_integer(f[2], where) : 1;
    if (s < 1 || t < 1) throw DataError(where + ": node ids are 1-based");
    if (w < 1) throw DataError(where + ": edge weight must be positive");
    edges.push_back({s - 1, t - 1, w});
  });
  return edges;
}

inline std::vector<Edge> read_edges(const std::string& path) {
  auto in = detail::open_input(path);
  return read_edges(in, path);
}

inline void write_edges(std::ostream& out, const std::vector<Edge>& edges) {
  for (const auto& e : edges) out << e.source + 1 << '\t' << e.target + 1 << '\t' << e.weight << '\n';
}

inline void write_edges(const std::string& path, const std::vector<Edge>& edges) {
  auto out = detail::open_output(path);
  write_edges(out, edges);
  if (!out) throw DataError("failed writing '" + path + "'");
}

// node<TAB>block, every node from 1 to n exactly once (any order). Labels
// are kept as given (minus one), so the result need not be compact.
inline Partition read_partition(std::istream& in, const std::string& source = "<stream>") {
  std::vector<std::int64_t> labels;
  detail::for_each_record(in, source, [&](const auto& f, const std::string& where) {
    if (f.size() != 2) throw DataError(where + ": expected 2 fields");
    const auto node = detail::parse_integer(f[0], where);
    const auto block = detail::parse_integer(f[1], where);
    if (node < 1 || block < 1) throw DataError(where + ": node and block ids are 1-based");
    if (node > static_cast<std::int64_t>(Graph::kMaxNodes)) throw DataError(where + ": node id too large");
    const auto index = static_cast<std::size_t>(node - 1);
    if (labels.size() <= index) labels.resize(index + 1, 0);
    if (labels[index] != 0) throw DataError(where + ": node " + std::to_string(node) + " listed twice");
    labels[index] = block;
  });
  Partition p;
  p.num_blocks = 0;
  p.assignment.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 0) throw DataError(source + ": node " + std::to_string(i + 1) + " has no block");
    p.assignment.push_back(static_cast<Block>(labels[i] - 1));
    p.num_blocks = std::max(p.num_blocks, p.assignment.back() + 1);
  }
  return p;
}

inline Partition read_partition(const std::string& path) {
  auto in = detail::open_input(path);
  return read_partition(in, path);
}

inline void write_partition(std::ostream& out, const Partition& p) {
  for (std::size_t i = 0; i < p.size(); ++i) out << i + 1 << '\t' << p[i] + 1 << '\n';
}

inline void write_partition(const std::string& path, const Partition& p) {
  auto out = detail::open_output(path);
  write_partition(out, p);
  if (!out) throw DataError("failed writing '" + path + "'");
}

// node<TAB>flag with flag 0 or 1; nodes not listed are excluded.
inline std::vector<bool> read_mask(std::istream& in, std::size_t num_nodes, const std::string& source = "<stream>") {
  std::vector<bool> mask(num_nodes, false);
  detail::for_each_record(in, source, [&](const auto& f, const std::string& where) {
    if (f.size() != 2) throw DataError(where + ": expected 2 fields");
    const auto node = detail::parse_integer(f[0], where);
    const auto flag = detail::parse_integer(f[1], where);
    if (node < 1 || static_cast<std::size_t>(node) > num_nodes) throw DataError(where + ": node id out of range");
    if (flag != 0 && flag != 1) throw DataError(where + ": mask flag must be 0 or 1");
    mask[static_cast<std::size_t>(node - 1)] = flag == 1;
  });
  return mask;
}

inline std::vector<bool> read_mask(const std::string& path, std::size_t num_nodes) {
  auto in = detail::open_input(path);
  return read_mask(in, num_nodes, path);
}

inline void write_mask(const std::string& path, const std::vector<bool>& mask) {
  auto out = detail::open_output(path);
  for (std::size_t i = 0; i < mask.size(); ++i) out << i + 1 << '\t' << (mask[i] ? 1 : 0) << '\n';
  if (!out) throw DataError("failed writing '" + path + "'");
}

}  // namespace sbp::io
