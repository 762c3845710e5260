#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "sbp/batch.hpp"
#include "sbp/engine_types.hpp"
#include "sbp/entropy.hpp"
#include "sbp/nodal.hpp"
#include "sbp/parallel.hpp"

namespace sbp {

// Per-node evaluation of every node against the frozen sweep-start state.
// Pure in its inputs; split across `workers` threads.
inline std::vector<ProposalOutcome> snapshot_evaluate(const Graph& graph, const PartitionState& chain, double beta,
                                                      std::uint64_t sweep_key, std::size_t workers) {
  const std::size_t n = graph.num_nodes();
  std::vector<ProposalOutcome> outcomes(n);
  const auto& assignment = chain.partition().assignment;
  detail::parallel_for(n, workers, [&](std::size_t i) {
    outcomes[i] = evaluate_nodal_update(i, assignment, chain.block_state(), graph, beta, node_draws(sweep_key, i)).outcome;
  });
  return outcomes;
}

inline std::vector<std::size_t> sweep_order(std::size_t n, std::uint64_t sweep_key) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 engine(derive_seed(sweep_key, {0}));
  std::shuffle(order.begin(), order.end(), engine);
  return order;
}

// One sweep over all nodes in the configured execution mode.
inline SweepStats mcmc_sweep(const Graph& graph, PartitionState& chain, const MCMCConfig& config,
                             std::uint64_t sweep_key) {
  SweepStats stats;
  switch (config.execution_mode) {
    case ExecutionMode::sequential: {
      for (std::size_t i : sweep_order(graph.num_nodes(), sweep_key)) {
        const auto out = nodal_update(i, chain, graph, config, node_draws(sweep_key, i));
        stats.proposals += out.proposed != out.current;
        stats.accepted += out.accepted;
      }
      return stats;
    }
    case ExecutionMode::parallel_snapshot: {
      const auto outcomes = snapshot_evaluate(graph, chain, config.beta, sweep_key, config.num_workers);
      std::vector<Block> proposals(outcomes.size());
      std::vector<bool> accept(outcomes.size());
      for (std::size_t i = 0; i < outcomes.size(); ++i) {
        proposals[i] = outcomes[i].proposed;
        accept[i] = outcomes[i].accepted;
        stats.proposals += outcomes[i].proposed != outcomes[i].current;
      }
      stats.accepted = apply_snapshot_moves(graph, chain, proposals, accept);
      return stats;
    }
    case ExecutionMode::batch:
      return batch_sweep(graph, chain, config, sweep_key);
  }
  return stats;
}

struct MCMCResult {
  std::size_t sweeps = 0;
  std::size_t accepted = 0;
  bool converged = false;
  double description_length = 0.0;
  std::vector<double> history;  // H after each sweep
};

// Sweeps until the mean improvement of H over the last `convergence_window`
// sweeps drops below convergence_threshold * |H|, or max_sweeps is reached.
inline MCMCResult run_mcmc(const Graph& graph, PartitionState& chain, const MCMCConfig& config,
                           std::uint64_t run_key) {
  const std::size_t N = graph.num_nodes();
  const Count E = graph.total_edge_weight();
  MCMCResult result;
  double previous = description_length(chain.block_state(), N, E);
  result.description_length = previous;
  std::vector<double> improvements;
  for (std::size_t sweep = 0; sweep < config.max_sweeps; ++sweep) {
    const auto stats = mcmc_sweep(graph, chain, config, derive_seed(run_key, {sweep}));
    const double H = description_length(chain.block_state(), N, E);
    result.history.push_back(H);
    result.accepted += stats.accepted;
    result.sweeps = sweep + 1;
    improvements.push_back(previous - H);
    previous = H;
    result.description_length = H;
    if (stats.proposals == 0) {
      result.converged = true;
      break;
    }
    if (improvements.size() >= config.convergence_window) {
      const double mean =
          std::accumulate(improvements.end() - static_cast<std::ptrdiff_t>(config.convergence_window),
                          improvements.end(), 0.0) /
          static_cast<double>(config.convergence_window);
      if (mean < config.convergence_threshold * std::abs(H)) {
        result.converged = true;
        break;
      }
    }
  }
  return result;
}

}  // namespace sbp
