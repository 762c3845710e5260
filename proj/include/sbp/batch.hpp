#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "sbp/block_model.hpp"
#include "sbp/engine_types.hpp"
#include "sbp/nodal.hpp"
#include "sbp/proposal.hpp"

namespace sbp {

// Applies every accepted move of a frozen-snapshot sweep at once, then
// rebuilds M in one aggregation pass. A block that would end up empty keeps
// its lowest-id leaving node. Returns the number of moves applied.
inline std::size_t apply_snapshot_moves(const Graph& graph, PartitionState& chain, std::span<const Block> proposals,
                                        const std::vector<bool>& accept) {
  const Partition& before = chain.partition();
  const std::size_t n = before.size();
  Partition next = before;
  std::vector<std::size_t> sizes(before.num_blocks, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (accept[i]) next.assignment[i] = proposals[i];
    ++sizes[next.assignment[i]];
  }
  bool repaired = true;
  while (repaired) {
    repaired = false;
    for (Block b = 0; b < before.num_blocks; ++b) {
      if (sizes[b] != 0) continue;
      for (std::size_t i = 0; i < n; ++i) {
        if (before[i] == b && next[i] != b) {
          --sizes[next[i]];
          next.assignment[i] = b;
          ++sizes[b];
          repaired = true;
          break;
        }
      }
    }
  }
  std::size_t moved = 0;
  for (std::size_t i = 0; i < n; ++i) moved += (next[i] != before[i]) ? 1 : 0;
  if (moved > 0) chain.reset(graph, std::move(next));
  return moved;
}

// Result vectors of one batch sweep (one entry per node). Nodes whose
// proposal equals their current block carry zeros and accept = false.
struct BatchEvaluation {
  std::vector<Block> proposals;
  std::vector<bool> uniform_proposal;
  std::vector<double> delta_S;
  std::vector<double> p_forward;
  std::vector<double> p_backward;
  std::vector<double> p_accept;
  std::vector<bool> accept;
};

namespace detail {

using SparseLine = std::vector<std::pair<Block, Count>>;

// Node-by-block weights of A Gamma (rows) in CSR layout.
struct NodeBlockMatrix {
  std::vector<std::size_t> offsets{0};
  SparseLine entries;

  std::span<const std::pair<Block, Count>> row(std::size_t i) const {
    return {entries.data() + offsets[i], offsets[i + 1] - offsets[i]};
  }
  Count at(std::size_t i, Block t) const {
    auto r = row(i);
    auto it = std::lower_bound(r.begin(), r.end(), t, [](const auto& e, Block k) { return e.first < k; });
    return (it != r.end() && it->first == t) ? it->second : 0;
  }
};

template <class NeighborsOf>
NodeBlockMatrix node_block_product(std::size_t n, std::span<const Block> assignment, NeighborsOf neighbors_of) {
  NodeBlockMatrix m;
  m.offsets.reserve(n + 1);
  SparseLine scratch;
  for (std::size_t i = 0; i < n; ++i) {
    scratch.clear();
    for (const auto& nb : neighbors_of(i)) scratch.push_back({assignment[nb.node], nb.weight});
    std::sort(scratch.begin(), scratch.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& e : scratch) {
      if (m.entries.size() > m.offsets.back() && m.entries.back().first == e.first) {
        m.entries.back().second += e.second;
      } else {
        m.entries.push_back(e);
      }
    }
    m.offsets.push_back(m.entries.size());
  }
  return m;
}

// `base` plus sparse additive deltas; result sorted, zeros dropped.
inline SparseLine line_plus(SparseLine base, SparseLine deltas) {
  base.insert(base.end(), deltas.begin(), deltas.end());
  std::sort(base.begin(), base.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  SparseLine out;
  out.reserve(base.size());
  for (const auto& e : base) {
    if (!out.empty() && out.back().first == e.first) {
      out.back().second += e.second;
    } else {
      out.push_back(e);
    }
  }
  std::erase_if(out, [](const auto& e) { return e.second == 0; });
  return out;
}

inline Count line_at(const SparseLine& line, Block k) {
  auto it = std::lower_bound(line.begin(), line.end(), k, [](const auto& e, Block key) { return e.first < key; });
  return (it != line.end() && it->first == k) ? it->second : 0;
}

inline double posterior_term(Count m, Count d_out, Count d_in) {
  const auto dm = static_cast<double>(m);
  return dm * std::log(dm / (static_cast<double>(d_out) * static_cast<double>(d_in)));
}

// Cumulative form of the block transition rows (M + M^T) / d, in the same
// order the per-node proposal walks them: row u, then column u.
struct BlockTransitionTable {
  std::vector<std::size_t> offsets{0};
  std::vector<Block> targets;
  std::vector<Count> cumulative;

  BlockTransitionTable(const BlockMatrix& m) {
    for (Block u = 0; u < m.num_blocks(); ++u) {
      Count running = 0;
      auto push = [&](Block t, Count v) {
        running += v;
        targets.push_back(t);
        cumulative.push_back(running);
      };
      m.for_each_in_row(u, push);
      m.for_each_in_col(u, push);
      offsets.push_back(targets.size());
    }
  }

  Block draw(Block u, Count threshold) const {
    auto first = cumulative.begin() + static_cast<std::ptrdiff_t>(offsets[u]);
    auto last = cumulative.begin() + static_cast<std::ptrdiff_t>(offsets[u + 1]);
    auto it = std::upper_bound(first, last, threshold);
    return targets[static_cast<std::size_t>(it - cumulative.begin())];
  }
};

}  // namespace detail

// Batch evaluation of one sweep in matrix form: all nodes are proposed for
// and tested against the same frozen (b-, M-). Uses the same per-node draws
// as evaluate_nodal_update, so the two agree on proposals and accept masks.
inline BatchEvaluation batch_evaluate(const Graph& graph, std::span<const Block> assignment,
                                      const BlockModelState& state, double beta, std::uint64_t sweep_key) {
  const std::size_t N = graph.num_nodes();
  const std::size_t B = state.num_blocks();
  const auto Bd = static_cast<double>(B);
  const BlockMatrix& M = state.interblock_counts();

  BatchEvaluation ev;
  ev.proposals.assign(assignment.begin(), assignment.end());
  ev.uniform_proposal.assign(N, false);
  ev.delta_S.assign(N, 0.0);
  ev.p_forward.assign(N, 0.0);
  ev.p_backward.assign(N, 0.0);
  ev.p_accept.assign(N, 0.0);
  ev.accept.assign(N, false);

  // proposals: uniform vs. neighborhood selection per node
  const detail::BlockTransitionTable transition(M);
  std::vector<NodeDraws> draws(N);
  for (std::size_t i = 0; i < N; ++i) {
    if (graph.degree(i) == 0 || B == 1) continue;
    draws[i] = node_draws(sweep_key, i);
    const Block u = assignment[draw_neighbor(graph, i, draws[i].proposal.neighbor)];
    const double p_uniform = Bd / (static_cast<double>(state.degree(u)) + Bd);
    ev.uniform_proposal[i] = draws[i].proposal.branch <= p_uniform;
    ev.proposals[i] = ev.uniform_proposal[i]
                          ? detail::uniform_index(draws[i].proposal.uniform_block, B)
                          : transition.draw(u, detail::scaled_threshold(draws[i].proposal.multinomial, state.degree(u)));
  }

  // edge-count contributions: Delta M_row = A Gamma, Delta M_col = A^T Gamma
  const auto row_delta = detail::node_block_product(N, assignment, [&](std::size_t i) { return graph.out_neighbors(i); });
  const auto col_delta = detail::node_block_product(N, assignment, [&](std::size_t i) { return graph.in_neighbors(i); });

  for (std::size_t i = 0; i < N; ++i) {
    const Block r = assignment[i];
    const Block s = ev.proposals[i];
    if (s == r) continue;
    const Count self = graph.self_loop_weight(i);
    const auto drow = row_delta.row(i);
    const auto dcol = col_delta.row(i);
    const Count row_sum = graph.out_degree(i);
    const Count col_sum = graph.in_degree(i);

    // rows r, s (all columns) and columns r, s (other rows) under the proposal
    detail::SparseLine row_r_d, row_s_d, col_r_d, col_s_d;
    for (const auto& [k, w] : drow) {
      row_r_d.push_back({k, -w});
      row_s_d.push_back({k, w});
    }
    const Count col_at_r = col_delta.at(i, r);
    const Count col_at_s = col_delta.at(i, s);
    row_r_d.push_back({r, -col_at_r});
    row_r_d.push_back({s, col_at_r});
    row_s_d.push_back({r, -col_at_s});
    row_s_d.push_back({s, col_at_s});
    if (self != 0) {
      // the matrix-form update counts a self-loop once as a row and once as
      // a column contribution; it must land on (s, s) only
      row_r_d.push_back({r, self});
      row_r_d.push_back({s, -self});
      row_s_d.push_back({r, -self});
      row_s_d.push_back({s, self});
    }
    for (const auto& [j, w] : dcol) {
      if (j == r || j == s) continue;
      col_r_d.push_back({j, -w});
      col_s_d.push_back({j, w});
    }
    detail::SparseLine old_row_r, old_row_s, old_col_r, old_col_s;
    M.for_each_in_row(r, [&](Block k, Count v) { old_row_r.push_back({k, v}); });
    M.for_each_in_row(s, [&](Block k, Count v) { old_row_s.push_back({k, v}); });
    M.for_each_in_col(r, [&](Block j, Count v) {
      if (j != r && j != s) old_col_r.push_back({j, v});
    });
    M.for_each_in_col(s, [&](Block j, Count v) {
      if (j != r && j != s) old_col_s.push_back({j, v});
    });
    const auto new_row_r = detail::line_plus(old_row_r, std::move(row_r_d));
    const auto new_row_s = detail::line_plus(old_row_s, std::move(row_s_d));
    const auto new_col_r = detail::line_plus(old_col_r, std::move(col_r_d));
    const auto new_col_s = detail::line_plus(old_col_s, std::move(col_s_d));

    auto d_out_new = [&](Block t) {
      return state.out_degree(t) - (t == r ? row_sum : 0) + (t == s ? row_sum : 0);
    };
    auto d_in_new = [&](Block t) {
      return state.in_degree(t) - (t == r ? col_sum : 0) + (t == s ? col_sum : 0);
    };

    // Delta S restricted to rows and columns r and s
    double dS = 0.0;
    for (const auto& [k, v] : old_row_r) dS += detail::posterior_term(v, state.out_degree(r), state.in_degree(k));
    for (const auto& [k, v] : old_row_s) dS += detail::posterior_term(v, state.out_degree(s), state.in_degree(k));
    for (const auto& [j, v] : old_col_r) dS += detail::posterior_term(v, state.out_degree(j), state.in_degree(r));
    for (const auto& [j, v] : old_col_s) dS += detail::posterior_term(v, state.out_degree(j), state.in_degree(s));
    for (const auto& [k, v] : new_row_r) dS -= detail::posterior_term(v, d_out_new(r), d_in_new(k));
    for (const auto& [k, v] : new_row_s) dS -= detail::posterior_term(v, d_out_new(s), d_in_new(k));
    for (const auto& [j, v] : new_col_r) dS -= detail::posterior_term(v, d_out_new(j), d_in_new(r));
    for (const auto& [j, v] : new_col_s) dS -= detail::posterior_term(v, d_out_new(j), d_in_new(s));

    // Hastings vectors; K_i = (A + A^T) Gamma row i
    auto m_new = [&](Block a, Block b) -> Count {
      if (a == r) return detail::line_at(new_row_r, b);
      if (a == s) return detail::line_at(new_row_s, b);
      if (b == r) return detail::line_at(new_col_r, a);
      if (b == s) return detail::line_at(new_col_s, a);
      return M.at(a, b);
    };
    const auto K = detail::line_plus(detail::SparseLine(drow.begin(), drow.end()),
                                     detail::SparseLine(dcol.begin(), dcol.end()));
    double forward = 0.0, backward = 0.0;
    for (const auto& [t, k] : K) {
      forward += static_cast<double>(k) * static_cast<double>(M.at(t, s) + M.at(s, t) + 1) /
                 (static_cast<double>(state.degree(t)) + Bd);
      const Count k_after = k - (t == r ? 2 * self : 0);
      if (k_after != 0) {
        backward += static_cast<double>(k_after) * static_cast<double>(m_new(t, r) + m_new(r, t) + 1) /
                    (static_cast<double>(d_out_new(t) + d_in_new(t)) + Bd);
      }
    }
    if (self != 0) {
      backward += static_cast<double>(2 * self) * static_cast<double>(m_new(s, r) + m_new(r, s) + 1) /
                  (static_cast<double>(d_out_new(s) + d_in_new(s)) + Bd);
    }

    ev.delta_S[i] = dS;
    ev.p_forward[i] = forward;
    ev.p_backward[i] = backward;
    ev.p_accept[i] = acceptance_probability(beta, dS, forward, backward);
    ev.accept[i] = draws[i].accept <= ev.p_accept[i];
  }
  return ev;
}

struct SweepStats {
  std::size_t proposals = 0;  // proposals with s != r
  std::size_t accepted = 0;   // moves applied
};

inline SweepStats batch_sweep(const Graph& graph, PartitionState& chain, const MCMCConfig& config,
                              std::uint64_t sweep_key) {
  const auto ev = batch_evaluate(graph, chain.partition().assignment, chain.block_state(), config.beta, sweep_key);
  SweepStats stats;
  for (std::size_t i = 0; i < ev.proposals.size(); ++i) stats.proposals += ev.proposals[i] != chain.partition()[i];
  stats.accepted = apply_snapshot_moves(graph, chain, ev.proposals, ev.accept);
  return stats;
}

}  // namespace sbp
