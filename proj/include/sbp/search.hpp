#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <map>
#include <optional>
#include <vector>

#include "sbp/engine_types.hpp"
#include "sbp/entropy.hpp"
#include "sbp/mcmc.hpp"
#include "sbp/merge.hpp"

namespace sbp {

// Extends a partition of the id prefix [0, n) to all nodes of `graph`. New
// nodes, in ascending id order, join the block of their heaviest already
// assigned neighbor (lowest neighbor id on ties), or open a new block.
inline Partition warm_start(const Partition& previous, const Graph& graph) {
  const std::size_t n_prev = previous.size();
  const std::size_t N = graph.num_nodes();
  detail::require(n_prev <= N, "previous partition covers more nodes than the graph");
  constexpr Block unassigned = static_cast<Block>(-1);
  std::vector<Block> assignment(N, unassigned);
  std::copy(previous.assignment.begin(), previous.assignment.end(), assignment.begin());
  Block next_block = previous.num_blocks;
  std::map<std::size_t, Count> weight_to;
  for (std::size_t i = n_prev; i < N; ++i) {
    weight_to.clear();
    for (const auto& nb : graph.out_neighbors(i)) {
      if (nb.node != i && assignment[nb.node] != unassigned) weight_to[nb.node] += nb.weight;
    }
    for (const auto& nb : graph.in_neighbors(i)) {
      if (nb.node != i && assignment[nb.node] != unassigned) weight_to[nb.node] += nb.weight;
    }
    std::optional<std::size_t> pick;
    Count heaviest = 0;
    for (const auto& [j, w] : weight_to) {
      if (w > heaviest) {
        heaviest = w;
        pick = j;
      }
    }
    assignment[i] = pick ? assignment[*pick] : next_block++;
  }
  return make_partition(std::move(assignment));
}

struct SearchEntry {
  double description_length = 0.0;
  Partition partition;
  bool refined = false;  // evaluated by an MCMC run on this graph
};

struct SearchResult {
  Partition partition;
  std::size_t num_blocks = 0;
  double description_length = 0.0;
  std::map<std::size_t, double> probes;  // refined B -> H
  std::size_t evaluations = 0;
  std::size_t total_sweeps = 0;
};

// Golden-section search over the block count B. Cached partitions seed
// smaller targets through greedy merges; extra unrefined partitions (for
// example from a previous streaming stage) can be supplied up front.
class BlockCountSearch {
 public:
  static constexpr double kGoldenFraction = 0.3819660112501051;  // 2 - phi

  BlockCountSearch(const Graph& graph, MCMCConfig config, std::uint64_t search_key)
      : graph_(graph), config_(config), key_(search_key) {
    config_.validate();
    detail::require(graph.num_nodes() > 0, "cannot partition an empty graph");
    const std::size_t N = graph.num_nodes();
    Partition top = singleton_partition(N);
    const double H = description_length(recompute_block_matrix(graph, top), N, graph.total_edge_weight());
    cache_[N] = SearchEntry{H, std::move(top), true};
  }

  void add_supply(Partition p) {
    validate_partition(p, graph_.num_nodes());
    p = compact(p);
    const std::size_t B = p.num_blocks;
    if (cache_.contains(B)) return;
    const double H = description_length(recompute_block_matrix(graph_, p), graph_.num_nodes(),
                                        graph_.total_edge_weight());
    cache_[B] = SearchEntry{H, std::move(p), false};
  }

  const std::map<std::size_t, SearchEntry>& cache() const noexcept { return cache_; }

  SearchResult run(std::optional<std::size_t> evaluate_first = std::nullopt) {
    if (evaluate_first && cache_.contains(*evaluate_first) && !cache_.at(*evaluate_first).refined) {
      evaluate(*evaluate_first, config_.initial_convergence_threshold);
    }
    while (true) {
      const std::size_t best = best_refined();
      const auto lo = refined_neighbor(best, false);
      const auto hi = refined_neighbor(best, true);
      if (auto supply = nearest_supply(best, lo, hi)) {
        evaluate(*supply, lo ? config_.convergence_threshold : config_.initial_convergence_threshold);
        continue;
      }
      if (!lo) {
        if (best == 1) break;
        const auto step = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::floor(static_cast<double>(best) * config_.merge_reduction_rate)));
        evaluate(best - step, config_.initial_convergence_threshold);
        continue;
      }
      const std::size_t left = best - *lo;
      const std::size_t right = hi ? *hi - best : 0;
      if (std::max(left, right) <= 1) break;
      const std::size_t gap = std::max(left, right);
      const auto offset = std::clamp<std::size_t>(
          static_cast<std::size_t>(std::llround(kGoldenFraction * static_cast<double>(gap))), 1, gap - 1);
      evaluate(right > left ? best + offset : best - offset, config_.convergence_threshold);
    }
    SearchResult result;
    const std::size_t best = best_refined();
    result.partition = cache_.at(best).partition;
    result.num_blocks = best;
    result.description_length = cache_.at(best).description_length;
    for (const auto& [B, e] : cache_) {
      if (e.refined) result.probes[B] = e.description_length;
    }
    result.evaluations = evaluations_;
    result.total_sweeps = sweeps_;
    return result;
  }

 private:
  std::size_t best_refined() const {
    std::optional<std::size_t> best;
    for (const auto& [B, e] : cache_) {
      if (e.refined && (!best || e.description_length < cache_.at(*best).description_length)) best = B;
    }
    return *best;
  }

  std::optional<std::size_t> refined_neighbor(std::size_t B, bool above) const {
    if (above) {
      for (auto it = cache_.upper_bound(B); it != cache_.end(); ++it) {
        if (it->second.refined) return it->first;
      }
    } else {
      for (auto it = std::make_reverse_iterator(cache_.lower_bound(B)); it != cache_.rend(); ++it) {
        if (it->second.refined) return it->first;
      }
    }
    return std::nullopt;
  }

  std::optional<std::size_t> nearest_supply(std::size_t best, std::optional<std::size_t> lo,
                                            std::optional<std::size_t> hi) const {
    std::optional<std::size_t> pick;
    std::size_t distance = 0;
    for (const auto& [B, e] : cache_) {
      if (e.refined || (lo && B <= *lo) || (hi && B >= *hi)) continue;
      const std::size_t d = B > best ? B - best : best - B;
      if (!pick || d < distance) {
        pick = B;
        distance = d;
      }
    }
    return pick;
  }

  void evaluate(std::size_t target, double threshold) {
    PartitionState chain;
    if (auto it = cache_.find(target); it != cache_.end()) {
      chain = PartitionState(graph_, it->second.partition);
    } else {
      const auto seed = cache_.upper_bound(target);
      chain = PartitionState(graph_, seed->second.partition);
      merge_blocks(graph_, chain, target, config_, derive_seed(key_, {2, target}));
    }
    MCMCConfig mcmc_config = config_;
    mcmc_config.convergence_threshold = threshold;
    const auto mcmc = run_mcmc(graph_, chain, mcmc_config, derive_seed(key_, {1, target}));
    ++evaluations_;
    sweeps_ += mcmc.sweeps;
    auto [it, fresh] = cache_.try_emplace(target);
    auto& entry = it->second;
    if (fresh || mcmc.description_length < entry.description_length) {
      entry.description_length = mcmc.description_length;
      entry.partition = chain.partition();
    }
    entry.refined = true;
  }

  const Graph& graph_;
  MCMCConfig config_;
  std::uint64_t key_;
  std::map<std::size_t, SearchEntry> cache_;
  std::size_t evaluations_ = 0;
  std::size_t sweeps_ = 0;
};

inline SearchResult golden_section_search(const Graph& graph, const MCMCConfig& config) {
  BlockCountSearch search(graph, config, derive_seed(config.rng_seed, {0x5eac4}));
  return search.run();
}

}  // namespace sbp
