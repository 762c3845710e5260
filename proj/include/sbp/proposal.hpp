#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>

#include "sbp/block_model.hpp"
#include "sbp/graph.hpp"
#include "sbp/partition.hpp"
#include "sbp/rng.hpp"

namespace sbp {

// The uniform variates consumed by one block proposal. Passing them in
// explicitly lets the per-node and batch code paths replay identical draws.
struct ProposalDraws {
  double neighbor = 1.0;       // selects the random edge of i
  double branch = 1.0;         // uniform-exploration vs. neighborhood branch
  double uniform_block = 1.0;  // block index in the uniform branch
  double multinomial = 1.0;    // block index in the neighborhood branch

  static ProposalDraws draw(CounterStream& rng) {
    ProposalDraws d;
    d.neighbor = rng.uniform();
    d.branch = rng.uniform();
    d.uniform_block = rng.uniform();
    d.multinomial = rng.uniform();
    return d;
  }
};

namespace detail {

// Index of the weighted item selected by u in (0, 1] over integer weights
// summing to `total`: the first item whose running sum exceeds floor(u * total).
inline Count scaled_threshold(double u, Count total) {
  const auto t = static_cast<Count>(std::floor(u * static_cast<double>(total)));
  return std::clamp<Count>(t, 0, total - 1);
}

inline Block uniform_index(double u, std::size_t n) {
  const auto k = static_cast<std::size_t>(std::floor(u * static_cast<double>(n)));
  return std::min(k, n - 1);
}

// Draws t with probability (M[u,t] + M[t,u]) / d_u: row u then column u.
template <BlockCountView View>
Block draw_block_neighbor(const View& state, const BlockMatrix& m, Block u, double draw) {
  const Count target = scaled_threshold(draw, state.degree(u));
  Count running = 0;
  Block chosen = u;
  bool found = false;
  m.for_each_in_row(u, [&](Block t, Count v) {
    if (found) return;
    running += v;
    if (running > target) {
      chosen = t;
      found = true;
    }
  });
  if (!found) {
    m.for_each_in_col(u, [&](Block t, Count v) {
      if (found) return;
      running += v;
      if (running > target) {
        chosen = t;
        found = true;
      }
    });
  }
  return chosen;
}

}  // namespace detail

// Neighbor of node i chosen proportionally to edge weight over the
// concatenation of its out- and in-lists (a self-loop appears in both).
inline std::size_t draw_neighbor(const Graph& graph, std::size_t i, double draw) {
  const Count target = detail::scaled_threshold(draw, graph.degree(i));
  Count running = 0;
  for (const auto& nb : graph.out_neighbors(i)) {
    running += nb.weight;
    if (running > target) return nb.node;
  }
  for (const auto& nb : graph.in_neighbors(i)) {
    running += nb.weight;
    if (running > target) return nb.node;
  }
  return i;  // unreachable for degree >= 1
}

// Proposes a block for node i. Requires degree(i) >= 1: a neighbor j is drawn
// by edge weight, u = b_j; with probability B / (d_u + B) the proposal is a
// uniform block, otherwise t is drawn with weight (M[u,t] + M[t,u]) / d_u.
inline Block propose_block(std::size_t i, std::span<const Block> assignment, const BlockModelState& state,
                           const Graph& graph, const ProposalDraws& draws) {
  const std::size_t B = state.num_blocks();
  if (B == 1) return 0;
  const Block u = assignment[draw_neighbor(graph, i, draws.neighbor)];
  const auto d_u = static_cast<double>(state.degree(u));
  if (draws.branch <= static_cast<double>(B) / (d_u + static_cast<double>(B))) {
    return detail::uniform_index(draws.uniform_block, B);
  }
  return detail::draw_block_neighbor(state, state.interblock_counts(), u, draws.multinomial);
}

inline Block propose_block(std::size_t i, const Partition& partition, const BlockModelState& state,
                           const Graph& graph, const ProposalDraws& draws) {
  return propose_block(i, std::span<const Block>(partition.assignment), state, graph, draws);
}

template <std::uniform_random_bit_generator Rng>
Block propose_block(std::size_t i, const Partition& partition, const BlockModelState& state, const Graph& graph,
                    Rng& rng) {
  CounterStream stream(rng());
  return propose_block(i, partition, state, graph, ProposalDraws::draw(stream));
}

// Merge proposal for block r on the block graph; never returns r. Mirrors
// propose_block with the block's row and column of M standing in for the
// node's edges, and renormalizes the neighborhood draw without r.
inline Block propose_merge(Block r, const BlockModelState& state, const ProposalDraws& draws) {
  const std::size_t B = state.num_blocks();
  const BlockMatrix& m = state.interblock_counts();
  auto uniform_other = [&](double x) {
    Block s = detail::uniform_index(x, B - 1);
    return s >= r ? s + 1 : s;
  };
  if (state.degree(r) == 0) return uniform_other(draws.uniform_block);
  const Block u = detail::draw_block_neighbor(state, m, r, draws.neighbor);
  const auto d_u = static_cast<double>(state.degree(u));
  if (draws.branch <= static_cast<double>(B) / (d_u + static_cast<double>(B))) {
    return uniform_other(draws.uniform_block);
  }
  const Count excluded = m.at(u, r) + m.at(r, u);
  const Count total = state.degree(u) - excluded;
  if (total == 0) return uniform_other(draws.uniform_block);
  const Count target = detail::scaled_threshold(draws.multinomial, total);
  Count running = 0;
  Block chosen = r;
  bool found = false;
  auto visit = [&](Block t, Count v) {
    if (found || t == r) return;
    running += v;
    if (running > target) {
      chosen = t;
      found = true;
    }
  };
  m.for_each_in_row(u, visit);
  if (!found) m.for_each_in_col(u, visit);
  return chosen;
}

struct HastingsTerms {
  double forward = 0.0;   // p_{r->s}, up to the common 1/k_i factor
  double backward = 0.0;  // p_{s->r}, same factor
};

// Proposal probabilities for the Hastings correction of moving node i from
// r to s:
//   p_{r->s} = sum_t K_it (M-[t,s] + M-[s,t] + 1) / (d-_t + B)
//   p_{s->r} = sum_t K_it (M+[t,r] + M+[r,t] + 1) / (d+_t + B)
// The self-loop share of K (a neighbor that is i itself) sits in block r
// before the move and in block s after it.
template <BlockCountView Before, BlockCountView After>
HastingsTerms hastings_correction(const NodeBlockEdgeCounts& counts, const Before& before, const After& after,
                                  Block r, Block s) {
  const auto B = static_cast<double>(before.num_blocks());
  HastingsTerms h;
  for (const auto& [t, k] : counts.combined) {
    const auto weight = static_cast<double>(k);
    h.forward += weight * static_cast<double>(before.count(t, s) + before.count(s, t) + 1) /
                 (static_cast<double>(before.degree(t)) + B);
    const Count moved_self = (t == r) ? 2 * counts.self_loop : 0;
    if (k != moved_self) {
      h.backward += static_cast<double>(k - moved_self) *
                    static_cast<double>(after.count(t, r) + after.count(r, t) + 1) /
                    (static_cast<double>(after.degree(t)) + B);
    }
  }
  if (counts.self_loop != 0) {
    h.backward += static_cast<double>(2 * counts.self_loop) *
                  static_cast<double>(after.count(s, r) + after.count(r, s) + 1) /
                  (static_cast<double>(after.degree(s)) + B);
  }
  return h;
}

}  // namespace sbp
