#pragma once

// Brute-force reference computations shared by the unit tests and the
// acceptance binary. Everything here works on dense matrices and explicit
// loops, without reusing the library's incremental code paths.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "sbp/graph.hpp"
#include "sbp/partition.hpp"

namespace oracle {

using DenseMatrix = std::vector<std::vector<std::int64_t>>;

inline DenseMatrix block_counts(const sbp::Graph& g, const std::vector<sbp::Block>& b, std::size_t B) {
  DenseMatrix m(B, std::vector<std::int64_t>(B, 0));
  for (const auto& e : g.edges()) m[b[e.source]][b[e.target]] += e.weight;
  return m;
}

inline std::int64_t row_sum(const DenseMatrix& m, std::size_t r) {
  std::int64_t s = 0;
  for (auto v : m[r]) s += v;
  return s;
}

inline std::int64_t col_sum(const DenseMatrix& m, std::size_t c) {
  std::int64_t s = 0;
  for (const auto& row : m) s += row[c];
  return s;
}

// Sum over r, s of M log(M / (d_out[r] d_in[s])), zero cells skipped.
inline double log_posterior_sum(const DenseMatrix& m) {
  const std::size_t B = m.size();
  double total = 0.0;
  for (std::size_t r = 0; r < B; ++r) {
    const double dout = static_cast<double>(row_sum(m, r));
    for (std::size_t s = 0; s < B; ++s) {
      if (m[r][s] == 0) continue;
      const double v = static_cast<double>(m[r][s]);
      total += v * std::log(v / (dout * static_cast<double>(col_sum(m, s))));
    }
  }
  return total;
}

inline double description_length(const sbp::Graph& g, const std::vector<sbp::Block>& b, std::size_t B) {
  const double N = static_cast<double>(g.num_nodes());
  const double E = static_cast<double>(g.total_edge_weight());
  const double Bd = static_cast<double>(B);
  if (E == 0.0) return N * std::log(Bd);
  const double x = Bd * Bd / E;
  const double h = (1.0 + x) * std::log(1.0 + x) - x * std::log(x);
  return E * h + N * std::log(Bd) - log_posterior_sum(block_counts(g, b, B));
}

// Change of the posterior sum when node i moves to block s (positive means
// the sum decreases, i.e. the entropy term grows), matching the sign of the
// library's Delta S.
inline double delta_S(const sbp::Graph& g, std::vector<sbp::Block> b, std::size_t B, std::size_t i, sbp::Block s) {
  const double before = log_posterior_sum(block_counts(g, b, B));
  b[i] = s;
  const double after = log_posterior_sum(block_counts(g, b, B));
  return before - after;
}

// Weight between node i and each block, counting out- and in-edges and a
// self-loop twice, under assignment b.
inline std::vector<std::int64_t> node_block_weights(const sbp::Graph& g, const std::vector<sbp::Block>& b,
                                                    std::size_t B, std::size_t i) {
  std::vector<std::int64_t> k(B, 0);
  for (const auto& e : g.edges()) {
    if (static_cast<std::size_t>(e.source) == i) k[b[e.target]] += e.weight;
    if (static_cast<std::size_t>(e.target) == i) k[b[e.source]] += e.weight;
  }
  return k;
}

struct Hastings {
  double forward = 0.0;
  double backward = 0.0;
};

// Both proposal sums evaluated from full recomputations before and after the
// move; the backward sum uses the neighbor blocks as they are after the move.
inline Hastings hastings(const sbp::Graph& g, std::vector<sbp::Block> b, std::size_t B, std::size_t i, sbp::Block s) {
  const sbp::Block r = b[i];
  const double Bd = static_cast<double>(B);
  Hastings h;
  const auto before = block_counts(g, b, B);
  const auto k_before = node_block_weights(g, b, B, i);
  for (std::size_t t = 0; t < B; ++t) {
    if (k_before[t] == 0) continue;
    const double d = static_cast<double>(row_sum(before, t) + col_sum(before, t));
    h.forward += static_cast<double>(k_before[t]) * static_cast<double>(before[t][s] + before[s][t] + 1) / (d + Bd);
  }
  b[i] = s;
  const auto after = block_counts(g, b, B);
  const auto k_after = node_block_weights(g, b, B, i);
  for (std::size_t t = 0; t < B; ++t) {
    if (k_after[t] == 0) continue;
    const double d = static_cast<double>(row_sum(after, t) + col_sum(after, t));
    h.backward += static_cast<double>(k_after[t]) * static_cast<double>(after[t][r] + after[r][t] + 1) / (d + Bd);
  }
  return h;
}

struct Pairs {
  std::int64_t c1 = 0, c2 = 0, c3 = 0, c4 = 0;
};

// Explicit enumeration of every unordered node pair. c1: same truth, same
// output; c2: different in both; c3: same truth only; c4: same output only.
inline Pairs enumerate_pairs(const std::vector<sbp::Block>& truth, const std::vector<sbp::Block>& output) {
  Pairs p;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    for (std::size_t j = i + 1; j < truth.size(); ++j) {
      const bool t = truth[i] == truth[j];
      const bool o = output[i] == output[j];
      if (t && o) ++p.c1;
      else if (!t && !o) ++p.c2;
      else if (t) ++p.c3;
      else ++p.c4;
    }
  }
  return p;
}

inline sbp::Graph random_graph(std::mt19937_64& rng, std::size_t n, std::size_t edges, bool self_loops = true) {
  std::uniform_int_distribution<std::int64_t> node(0, static_cast<std::int64_t>(n) - 1);
  std::uniform_int_distribution<std::int64_t> weight(1, 3);
  std::vector<sbp::Edge> list;
  while (list.size() < edges) {
    const auto u = node(rng);
    const auto v = node(rng);
    if (u == v && !self_loops) continue;
    list.push_back({u, v, weight(rng)});
  }
  return sbp::Graph::from_edges(list, n);
}

// Random assignment in which every one of the B blocks is used.
inline std::vector<sbp::Block> random_assignment(std::mt19937_64& rng, std::size_t n, std::size_t B) {
  std::vector<sbp::Block> b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = i < B ? i : std::uniform_int_distribution<std::size_t>(0, B - 1)(rng);
  std::shuffle(b.begin(), b.end(), rng);
  return b;
}

inline bool close_relative(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace oracle
