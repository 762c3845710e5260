#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <span>

#include "sbp/block_model.hpp"
#include "sbp/engine_types.hpp"
#include "sbp/entropy.hpp"
#include "sbp/proposal.hpp"

namespace sbp {

// Metropolis-Hastings acceptance probability. When both proposal
// probabilities vanish the correction is undefined and the move is taken
// only if it lowers the entropy.
inline double acceptance_probability(double beta, double delta_S, double p_forward, double p_backward) {
  if (p_forward <= 0.0 && p_backward <= 0.0) return delta_S < 0.0 ? 1.0 : 0.0;
  if (p_forward <= 0.0) return 1.0;
  return std::min(std::exp(-beta * delta_S) * p_backward / p_forward, 1.0);
}

struct NodalEvaluation {
  ProposalOutcome outcome;
  MoveDelta delta;
};

// Steps of the nodal update for node i that do not mutate anything: propose,
// build M+ on the affected cells, Hastings terms, Delta S and the accept
// decision. Nodes without edges are never moved.
inline NodalEvaluation evaluate_nodal_update(std::size_t i, std::span<const Block> assignment,
                                             const BlockModelState& state, const Graph& graph, double beta,
                                             const NodeDraws& draws) {
  NodalEvaluation eval;
  auto& out = eval.outcome;
  out.node = i;
  out.current = assignment[i];
  out.proposed = out.current;
  if (graph.degree(i) == 0) return eval;

  out.proposed = propose_block(i, assignment, state, graph, draws.proposal);
  if (out.proposed == out.current) return eval;  // nothing to accept

  const auto counts = node_block_edge_counts(graph, assignment, i);
  eval.delta = compute_move_delta(counts, out.current, out.proposed);
  const ProposedState after(state, eval.delta);
  const auto h = hastings_correction(counts, state, after, out.current, out.proposed);
  out.p_forward = h.forward;
  out.p_backward = h.backward;
  out.delta_S = delta_log_posterior(state, eval.delta);
  out.p_accept = acceptance_probability(beta, out.delta_S, out.p_forward, out.p_backward);
  out.accepted = draws.accept <= out.p_accept;
  return eval;
}

// One nodal update against the live state; applies the move on acceptance.
inline ProposalOutcome nodal_update(std::size_t i, PartitionState& chain, const Graph& graph,
                                    const MCMCConfig& config, const NodeDraws& draws) {
  auto eval = evaluate_nodal_update(i, chain.partition().assignment, chain.block_state(), graph, config.beta, draws);
  auto& out = eval.outcome;
  if (out.accepted && chain.block_size(out.current) == 1) {
    out.accepted = false;
    out.vetoed = true;
  }
  if (out.accepted) chain.move_node(i, eval.delta);
  return out;
}

template <std::uniform_random_bit_generator Rng>
ProposalOutcome nodal_update(std::size_t i, PartitionState& chain, const Graph& graph, const MCMCConfig& config,
                             Rng& rng) {
  return nodal_update(i, chain, graph, config, node_draws(rng(), i));
}

}  // namespace sbp
