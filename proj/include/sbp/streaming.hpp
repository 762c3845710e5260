#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "sbp/errors.hpp"
#include "sbp/graph.hpp"
#include "sbp/metrics.hpp"
#include "sbp/search.hpp"

namespace sbp {

struct StageReport {
  std::size_t stage = 0;
  std::size_t num_nodes = 0;
  std::int64_t num_edges = 0;    // accumulated edge weight
  std::int64_t stage_edges = 0;  // edge weight ingested in this stage
  std::size_t num_blocks = 0;
  double description_length = 0.0;
  std::size_t evaluations = 0;
  std::size_t sweeps = 0;
  StageTiming timing;
  std::optional<CorrectnessReport> correctness;
};

inline std::uint64_t stage_search_key(std::uint64_t seed, std::size_t stage) {
  return stage <= 1 ? derive_seed(seed, {0x5eac4}) : derive_seed(seed, {0x5eac4, stage});
}

// Accumulates stage batches (edges in external ids) and partitions the graph
// after each one, warm-started from the previous stage's search cache.
class StreamingSession {
 public:
  explicit StreamingSession(MCMCConfig config, bool warm_start_enabled = true)
      : config_(config), warm_(warm_start_enabled) {
    config_.validate();
  }

  // Truth and evaluation mask indexed by external node id.
  void set_truth(Partition truth, std::vector<bool> mask) {
    detail::require(truth.size() == mask.size(), "truth and mask lengths differ");
    truth_ = std::move(truth);
    mask_ = std::move(mask);
  }

  void ingest_stage(std::size_t stage, std::span<const Edge> batch) {
    detail::require(stage == ingested_ + 1, "stages must be ingested in order");
    detail::require(pending_ == false, "previous stage has not been partitioned");
    std::vector<std::int64_t> fresh;
    for (const auto& e : batch) {
      detail::require(e.source >= 0 && e.target >= 0, "negative node id in stage batch");
      detail::require(e.weight >= 1, "edge weights must be positive");
      for (auto x : {e.source, e.target}) {
        if (!id_map_.contains(x)) fresh.push_back(x);
      }
    }
    std::sort(fresh.begin(), fresh.end());
    fresh.erase(std::unique(fresh.begin(), fresh.end()), fresh.end());
    for (auto x : fresh) {
      id_map_.emplace(x, external_.size());
      external_.push_back(x);
    }
    stage_edges_ = 0;
    for (const auto& e : batch) {
      edges_.push_back({static_cast<std::int64_t>(id_map_.at(e.source)),
                        static_cast<std::int64_t>(id_map_.at(e.target)), e.weight});
      stage_edges_ += e.weight;
    }
    graph_ = Graph::from_edges(edges_, external_.size());
    ingested_ = stage;
    pending_ = true;
  }

  const StageReport& partition_stage() {
    detail::require(pending_, "no ingested stage to partition");
    pending_ = false;
    StageReport report;
    report.stage = ingested_;
    report.num_nodes = graph_.num_nodes();
    report.num_edges = graph_.total_edge_weight();
    report.stage_edges = stage_edges_;
    const auto start = std::chrono::steady_clock::now();
    if (graph_.num_nodes() == 0) {
      report.num_blocks = 0;
    } else if (stage_edges_ == 0 && has_result_ && partition_.size() == graph_.num_nodes()) {
      report.num_blocks = partition_.num_blocks;
      report.description_length = description_length_;
    } else {
      BlockCountSearch search(graph_, config_, stage_search_key(config_.rng_seed, ingested_));
      std::optional<std::size_t> first;
      if (warm_ && has_result_) {
        Partition extended = warm_start(previous_cache_.at(previous_best_).partition, graph_);
        first = extended.num_blocks;
        search.add_supply(std::move(extended));
      }
      auto result = search.run(first);
      previous_cache_ = search.cache();
      previous_best_ = result.num_blocks;
      partition_ = std::move(result.partition);
      description_length_ = result.description_length;
      has_result_ = true;
      report.num_blocks = result.num_blocks;
      report.description_length = result.description_length;
      report.evaluations = result.evaluations;
      report.sweeps = result.total_sweeps;
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.timing = stage_timing(ingested_, stage_edges_, seconds);
    if (truth_ && graph_.num_nodes() > 0) report.correctness = evaluate_present();
    reports_.push_back(report);
    return reports_.back();
  }

  const Graph& graph() const noexcept { return graph_; }
  const Partition& partition() const noexcept { return partition_; }  // internal ids
  const std::vector<std::int64_t>& external_ids() const noexcept { return external_; }
  const std::vector<StageReport>& reports() const noexcept { return reports_; }
  std::size_t stages_ingested() const noexcept { return ingested_; }

  // Internal partition re-indexed by external id (blocks of absent ids are
  // reported as nullopt).
  std::vector<std::optional<Block>> partition_by_external_id() const {
    std::int64_t top = -1;
    for (auto x : external_) top = std::max(top, x);
    std::vector<std::optional<Block>> out(static_cast<std::size_t>(top + 1));
    for (std::size_t i = 0; i < partition_.size(); ++i) out[static_cast<std::size_t>(external_[i])] = partition_[i];
    return out;
  }

 private:
  CorrectnessReport evaluate_present() const {
    const std::size_t n = graph_.num_nodes();
    Partition truth_now{std::vector<Block>(n, 0), truth_->num_blocks};
    std::vector<bool> mask_now(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = static_cast<std::size_t>(external_[i]);
      if (x < truth_->size()) {
        truth_now.assignment[i] = (*truth_)[x];
        mask_now[i] = mask_[x];
      }
    }
    if (std::none_of(mask_now.begin(), mask_now.end(), [](bool b) { return b; })) return {};
    return evaluate_partition(truth_now, partition_, mask_now);
  }

  MCMCConfig config_;
  bool warm_;
  std::optional<Partition> truth_;
  std::vector<bool> mask_;
  std::unordered_map<std::int64_t, std::size_t> id_map_;
  std::vector<std::int64_t> external_;
  std::vector<Edge> edges_;
  Graph graph_;
  std::size_t ingested_ = 0;
  bool pending_ = false;
  std::int64_t stage_edges_ = 0;

  bool has_result_ = false;
  Partition partition_;
  double description_length_ = 0.0;
  std::map<std::size_t, SearchEntry> previous_cache_;
  std::size_t previous_best_ = 0;
  std::vector<StageReport> reports_;
};

}  // namespace sbp
