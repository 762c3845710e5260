#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sbp/errors.hpp"

namespace sbp {

using Count = std::int64_t;

// A directed weighted edge record as it appears in input data. Ids are
// signed so malformed input can be rejected rather than wrapped.
struct Edge {
  std::int64_t source = 0;
  std::int64_t target = 0;
  Count weight = 1;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Immutable directed multigraph in CSR form, both directions stored.
// Parallel edges are merged into integer weights at construction. A
// self-loop of weight w appears in both the out- and in-list of its node,
// so it contributes w to the out-degree and w to the in-degree.
class Graph {
 public:
  struct Neighbor {
    std::size_t node;
    Count weight;
  };

  static constexpr std::size_t kMaxNodes = std::size_t{1} << 31;

  Graph() = default;

  static Graph from_edges(std::span<const Edge> edges,
                          std::optional<std::size_t> num_nodes = std::nullopt);

  std::size_t num_nodes() const noexcept { return num_nodes_; }
  Count total_edge_weight() const noexcept { return total_weight_; }
  std::size_t num_edge_records() const noexcept { return out_targets_.size(); }

  std::span<const Neighbor> out_neighbors(std::size_t i) const {
    return {out_targets_.data() + out_offsets_[i], out_offsets_[i + 1] - out_offsets_[i]};
  }
  std::span<const Neighbor> in_neighbors(std::size_t i) const {
    return {in_sources_.data() + in_offsets_[i], in_offsets_[i + 1] - in_offsets_[i]};
  }

  Count out_degree(std::size_t i) const { return out_degree_[i]; }
  Count in_degree(std::size_t i) const { return in_degree_[i]; }
  // Total degree k_i; a self-loop counts once in each direction.
  Count degree(std::size_t i) const { return out_degree_[i] + in_degree_[i]; }
  Count self_loop_weight(std::size_t i) const { return self_loop_[i]; }

  // Merged edges sorted by (source, target).
  std::vector<Edge> edges() const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.num_nodes_ == b.num_nodes_ && a.edges() == b.edges();
  }

 private:
  std::size_t num_nodes_ = 0;
  Count total_weight_ = 0;
  std::vector<std::size_t> out_offsets_{0};
  std::vector<Neighbor> out_targets_;
  std::vector<std::size_t> in_offsets_{0};
  std::vector<Neighbor> in_sources_;
  std::vector<Count> out_degree_;
  std::vector<Count> in_degree_;
  std::vector<Count> self_loop_;
};

inline Graph Graph::from_edges(std::span<const Edge> edges, std::optional<std::size_t> num_nodes) {
  std::int64_t max_id = -1;
  for (const auto& e : edges) {
    if (e.source < 0 || e.target < 0) detail::fail("edge has a negative node id");
    if (e.weight <= 0) detail::fail("edge weight must be a positive integer");
    if (static_cast<std::uint64_t>(e.source) >= kMaxNodes ||
        static_cast<std::uint64_t>(e.target) >= kMaxNodes) {
      detail::fail("node id exceeds the supported range");
    }
    max_id = std::max({max_id, e.source, e.target});
  }
  const std::size_t inferred = static_cast<std::size_t>(max_id + 1);
  if (num_nodes && *num_nodes < inferred) {
    detail::fail("node id " + std::to_string(max_id) + " out of range for " +
                 std::to_string(*num_nodes) + " nodes");
  }
  if (num_nodes && *num_nodes > kMaxNodes) detail::fail("node count exceeds the supported range");

  std::vector<Edge> merged(edges.begin(), edges.end());
  std::sort(merged.begin(), merged.end(), [](const Edge& a, const Edge& b) {
    return a.source != b.source ? a.source < b.source : a.target < b.target;
  });
  std::size_t out = 0;
  for (std::size_t k = 0; k < merged.size(); ++k) {
    if (out > 0 && merged[out - 1].source == merged[k].source &&
        merged[out - 1].target == merged[k].target) {
      merged[out - 1].weight += merged[k].weight;
    } else {
      merged[out++] = merged[k];
    }
  }
  merged.resize(out);

  Graph g;
  g.num_nodes_ = num_nodes.value_or(inferred);
  const std::size_t n = g.num_nodes_;
  g.out_degree_.assign(n, 0);
  g.in_degree_.assign(n, 0);
  g.self_loop_.assign(n, 0);
  g.out_offsets_.assign(n + 1, 0);
  g.in_offsets_.assign(n + 1, 0);
  for (const auto& e : merged) {
    const auto s = static_cast<std::size_t>(e.source);
    const auto t = static_cast<std::size_t>(e.target);
    ++g.out_offsets_[s + 1];
    ++g.in_offsets_[t + 1];
    g.out_degree_[s] += e.weight;
    g.in_degree_[t] += e.weight;
    if (s == t) g.self_loop_[s] += e.weight;
    g.total_weight_ += e.weight;
  }
  for (std::size_t i = 0; i < n; ++i) {
    g.out_offsets_[i + 1] += g.out_offsets_[i];
    g.in_offsets_[i + 1] += g.in_offsets_[i];
  }
  g.out_targets_.resize(merged.size());
  g.in_sources_.resize(merged.size());
  std::vector<std::size_t> out_fill(g.out_offsets_.begin(), g.out_offsets_.end() - 1);
  std::vector<std::size_t> in_fill(g.in_offsets_.begin(), g.in_offsets_.end() - 1);
  // merged is sorted by source, so every in-list ends up sorted by source too
  for (const auto& e : merged) {
    const auto s = static_cast<std::size_t>(e.source);
    const auto t = static_cast<std::size_t>(e.target);
    g.out_targets_[out_fill[s]++] = {t, e.weight};
    g.in_sources_[in_fill[t]++] = {s, e.weight};
  }
  return g;
}

inline std::vector<Edge> Graph::edges() const {
  std::vector<Edge> result;
  result.reserve(out_targets_.size());
  for (std::size_t i = 0; i < num_nodes_; ++i) {
    for (const auto& nb : out_neighbors(i)) {
      result.push_back({static_cast<std::int64_t>(i), static_cast<std::int64_t>(nb.node), nb.weight});
    }
  }
  return result;
}

inline Graph build_graph(std::span<const Edge> edges,
                         std::optional<std::size_t> num_nodes = std::nullopt) {
  return Graph::from_edges(edges, num_nodes);
}

}  // namespace sbp
