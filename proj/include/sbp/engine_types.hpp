#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sbp/block_model.hpp"
#include "sbp/errors.hpp"
#include "sbp/graph.hpp"
#include "sbp/partition.hpp"
#include "sbp/proposal.hpp"
#include "sbp/rng.hpp"

namespace sbp {

enum class ExecutionMode { sequential, parallel_snapshot, batch };

inline std::string_view to_string(ExecutionMode mode) {
  switch (mode) {
    case ExecutionMode::sequential: return "sequential";
    case ExecutionMode::parallel_snapshot: return "parallel";
    case ExecutionMode::batch: return "batch";
  }
  return "sequential";
}

inline ExecutionMode parse_execution_mode(std::string_view name) {
  if (name == "sequential") return ExecutionMode::sequential;
  if (name == "parallel" || name == "parallel-snapshot") return ExecutionMode::parallel_snapshot;
  if (name == "batch") return ExecutionMode::batch;
  detail::fail("unknown execution mode '" + std::string(name) + "'");
}

struct MCMCConfig {
  double beta = 3.0;
  std::size_t max_sweeps = 100;
  double convergence_threshold = 1e-4;
  // Looser threshold used by the search until a bracket around the best B
  // exists; equal to convergence_threshold disables the distinction.
  double initial_convergence_threshold = 5e-4;
  std::size_t convergence_window = 3;
  double merge_reduction_rate = 0.5;
  std::size_t merge_proposals_per_block = 10;
  std::uint64_t rng_seed = 0;
  ExecutionMode execution_mode = ExecutionMode::sequential;
  std::size_t num_workers = 1;

  void validate() const {
    detail::require(beta > 0.0, "beta must be positive");
    detail::require(max_sweeps > 0, "max_sweeps must be positive");
    detail::require(convergence_threshold > 0.0, "convergence threshold must be positive");
    detail::require(initial_convergence_threshold >= convergence_threshold,
                    "initial convergence threshold must not be tighter than the final one");
    detail::require(convergence_window > 0, "convergence window must be positive");
    detail::require(merge_reduction_rate > 0.0 && merge_reduction_rate < 1.0,
                    "merge reduction rate must lie in (0, 1)");
    detail::require(merge_proposals_per_block > 0, "merge proposals per block must be positive");
    detail::require(num_workers > 0, "worker count must be positive");
  }
};

struct ProposalOutcome {
  std::size_t node = 0;
  Block current = 0;
  Block proposed = 0;
  double delta_S = 0.0;
  double p_forward = 0.0;
  double p_backward = 0.0;
  double p_accept = 0.0;
  bool accepted = false;
  // Accepted by the Metropolis-Hastings draw but refused because it would
  // leave the source block empty.
  bool vetoed = false;
};

// Randomness consumed by one nodal update.
struct NodeDraws {
  ProposalDraws proposal;
  double accept = 1.0;
};

// Per-node draws for one sweep, independent of visiting order and of the
// execution mode.
inline NodeDraws node_draws(std::uint64_t sweep_key, std::size_t node) {
  CounterStream stream(derive_seed(sweep_key, {1, node}));
  NodeDraws d;
  d.proposal = ProposalDraws::draw(stream);
  d.accept = stream.uniform();
  return d;
}

// Partition plus its block model and block sizes, kept mutually consistent.
class PartitionState {
 public:
  PartitionState() = default;
  PartitionState(const Graph& graph, Partition partition)
      : state_(recompute_block_matrix(graph, partition)), partition_(std::move(partition)) {
    sizes_ = block_sizes(partition_);
  }

  const Partition& partition() const noexcept { return partition_; }
  const BlockModelState& block_state() const noexcept { return state_; }
  std::size_t num_blocks() const noexcept { return partition_.num_blocks; }
  std::size_t block_size(Block b) const { return sizes_[b]; }

  // Moves one node; `delta` must come from that node's edge counts.
  void move_node(std::size_t i, const MoveDelta& delta) {
    state_.apply(delta);
    --sizes_[delta.from];
    ++sizes_[delta.to];
    partition_.assignment[i] = delta.to;
  }

  void reset(const Graph& graph, Partition partition) { *this = PartitionState(graph, std::move(partition)); }

 private:
  BlockModelState state_;
  Partition partition_;
  std::vector<std::size_t> sizes_;
};

}  // namespace sbp
