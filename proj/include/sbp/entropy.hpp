#pragma once

#include <cmath>
#include <cstddef>

#include "sbp/block_model.hpp"

namespace sbp {

// x log x with 0 log 0 := 0, natural log throughout.
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// h(x) = (1 + x) log(1 + x) - x log x
inline double model_entropy_h(double x) { return xlogx(1.0 + x) - xlogx(x); }

// Sum over block pairs of M_rs log(M_rs / (d_out,r d_in,s)); the log
// posterior up to a constant. Zero entries contribute nothing.
inline double log_posterior(const BlockModelState& state) {
  double sum = 0.0;
  state.interblock_counts().for_each([&](Block r, Block s, Count m) {
    const double dm = static_cast<double>(m);
    sum += dm * std::log(dm / (static_cast<double>(state.out_degree(r)) * static_cast<double>(state.in_degree(s))));
  });
  return sum;
}

// Model part of the description length: E h(B^2 / E) + N log B.
inline double model_description_length(std::size_t num_nodes, Count num_edges, std::size_t num_blocks) {
  const double B = static_cast<double>(num_blocks);
  const double N = static_cast<double>(num_nodes);
  if (num_edges == 0) return N * std::log(B);
  const double E = static_cast<double>(num_edges);
  return E * model_entropy_h(B * B / E) + N * std::log(B);
}

// Total description length H of the model and the graph given the model.
inline double description_length(const BlockModelState& state, std::size_t num_nodes, Count num_edges) {
  return model_description_length(num_nodes, num_edges, state.num_blocks()) - log_posterior(state);
}

// Entropy change Delta S = -S(after) + S(before) of a single move, where S is
// the log-posterior sum. Only the cells listed in `delta` change, so the
// sum is evaluated through the split
//   S = sum M log M - sum_r d_out,r log d_out,r - sum_s d_in,s log d_in,s
// restricted to those cells and to the degree terms of blocks from/to.
inline double delta_log_posterior(const BlockModelState& before, const MoveDelta& delta) {
  double change = 0.0;  // S(after) - S(before)
  for (const auto& c : delta.cells) {
    const Count old_m = before.count(c.row, c.col);
    change += xlogx(static_cast<double>(old_m + c.delta)) - xlogx(static_cast<double>(old_m));
  }
  const Block r = delta.from;
  const Block s = delta.to;
  auto degree_term = [](Count old_r, Count old_s, Count moved) {
    return xlogx(static_cast<double>(old_r - moved)) - xlogx(static_cast<double>(old_r)) +
           xlogx(static_cast<double>(old_s + moved)) - xlogx(static_cast<double>(old_s));
  };
  change -= degree_term(before.out_degree(r), before.out_degree(s), delta.out_weight);
  change -= degree_term(before.in_degree(r), before.in_degree(s), delta.in_weight);
  return -change;
}

}  // namespace sbp
