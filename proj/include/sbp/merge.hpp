#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "sbp/block_model.hpp"
#include "sbp/engine_types.hpp"
#include "sbp/entropy.hpp"
#include "sbp/parallel.hpp"
#include "sbp/proposal.hpp"

namespace sbp {

// Edge counts of block r viewed as a single node of the block graph.
inline NodeBlockEdgeCounts block_as_node(const BlockModelState& state, Block r) {
  NodeBlockEdgeCounts c;
  c.own_block = r;
  const BlockMatrix& m = state.interblock_counts();
  m.for_each_in_row(r, [&](Block t, Count v) { c.out.push_back({t, v}); });
  m.for_each_in_col(r, [&](Block t, Count v) { c.in.push_back({t, v}); });
  c.self_loop = m.at(r, r);
  c.out_total = state.out_degree(r);
  c.in_total = state.in_degree(r);
  return c;
}

// Change in the log-posterior sum from folding block r into block s.
inline double merge_delta(const BlockModelState& state, Block r, Block s) {
  return delta_log_posterior(state, compute_move_delta(block_as_node(state, r), r, s));
}

struct MergeCandidate {
  Block block = 0;
  Block into = 0;
  double delta_S = std::numeric_limits<double>::infinity();
};

// Best of `proposals` merge proposals for every block; ties go to the lower
// target block.
inline std::vector<MergeCandidate> best_merges(const PartitionState& chain, const MCMCConfig& config,
                                               std::uint64_t pass_key) {
  const auto& state = chain.block_state();
  const std::size_t B = state.num_blocks();
  std::vector<MergeCandidate> best(B);
  detail::parallel_for(B, config.num_workers, [&](std::size_t r) {
    best[r].block = r;
    const auto counts = block_as_node(state, r);
    for (std::size_t p = 0; p < config.merge_proposals_per_block; ++p) {
      CounterStream stream(derive_seed(pass_key, {r, p}));
      const Block s = propose_merge(r, state, ProposalDraws::draw(stream));
      const double dS = delta_log_posterior(state, compute_move_delta(counts, r, s));
      if (dS < best[r].delta_S || (dS == best[r].delta_S && s < best[r].into)) {
        best[r].into = s;
        best[r].delta_S = dS;
      }
    }
  });
  return best;
}

// Greedy merge phase: executes the lowest-Delta-S block merges until
// `target_blocks` remain, then compacts labels.
inline void merge_blocks(const Graph& graph, PartitionState& chain, std::size_t target_blocks,
                         const MCMCConfig& config, std::uint64_t merge_key) {
  detail::require(target_blocks >= 1, "merge target must be at least one block");
  detail::require(target_blocks < chain.num_blocks(), "merge target must be below the current block count");
  const std::size_t B = chain.num_blocks();
  std::vector<Block> parent(B);
  std::iota(parent.begin(), parent.end(), Block{0});
  auto find = [&](Block b) {
    while (parent[b] != b) b = parent[b] = parent[parent[b]];
    return b;
  };
  std::size_t remaining = B - target_blocks;
  for (std::uint64_t pass = 0; remaining > 0 && pass < 64; ++pass) {
    auto candidates = best_merges(chain, config, derive_seed(merge_key, {pass}));
    std::sort(candidates.begin(), candidates.end(), [](const MergeCandidate& a, const MergeCandidate& b) {
      return a.delta_S != b.delta_S ? a.delta_S < b.delta_S : a.block < b.block;
    });
    for (const auto& c : candidates) {
      if (remaining == 0) break;
      const Block a = find(c.block);
      const Block b = find(c.into);
      if (a == b) continue;
      parent[std::max(a, b)] = std::min(a, b);
      --remaining;
    }
  }
  for (Block b = 1; b < B && remaining > 0; ++b) {
    const Block root = find(b);
    if (root != find(0)) {
      parent[root] = find(0);
      --remaining;
    }
  }
  Partition merged = chain.partition();
  for (auto& b : merged.assignment) b = find(b);
  chain.reset(graph, compact(merged));
}

}  // namespace sbp
