#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sbp/errors.hpp"
#include "sbp/hungarian.hpp"
#include "sbp/partition.hpp"

namespace sbp {

// Truth x output counts over the labels present among the masked-in nodes.
struct ContingencyTable {
  std::vector<std::vector<std::int64_t>> counts;
  std::vector<std::int64_t> row_totals;
  std::vector<std::int64_t> col_totals;
  std::int64_t grand_total = 0;
  std::vector<Block> truth_labels;   // row -> original truth block
  std::vector<Block> output_labels;  // column -> original output block

  std::size_t rows() const noexcept { return counts.size(); }
  std::size_t cols() const noexcept { return col_totals.size(); }
};

inline ContingencyTable build_contingency(const Partition& truth, const Partition& output,
                                          const std::vector<bool>& mask) {
  detail::require(truth.size() == output.size(), "truth and output partitions differ in length");
  detail::require(mask.size() == truth.size(), "mask length differs from the partitions");
  std::map<Block, std::size_t> rows, cols;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!mask[i]) continue;
    rows.emplace(truth[i], 0);
    cols.emplace(output[i], 0);
  }
  detail::require(!rows.empty(), "no nodes selected for evaluation");
  ContingencyTable t;
  for (auto& [label, index] : rows) {
    index = t.truth_labels.size();
    t.truth_labels.push_back(label);
  }
  for (auto& [label, index] : cols) {
    index = t.output_labels.size();
    t.output_labels.push_back(label);
  }
  t.counts.assign(rows.size(), std::vector<std::int64_t>(cols.size(), 0));
  t.row_totals.assign(rows.size(), 0);
  t.col_totals.assign(cols.size(), 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!mask[i]) continue;
    const std::size_t r = rows[truth[i]];
    const std::size_t c = cols[output[i]];
    ++t.counts[r][c];
    ++t.row_totals[r];
    ++t.col_totals[c];
    ++t.grand_total;
  }
  return t;
}

inline ContingencyTable build_contingency(const Partition& truth, const Partition& output) {
  return build_contingency(truth, output, std::vector<bool>(truth.size(), true));
}

// Contingency table given its counts directly.
inline ContingencyTable contingency_from_counts(std::vector<std::vector<std::int64_t>> counts) {
  ContingencyTable t;
  detail::require(!counts.empty() && !counts[0].empty(), "empty contingency table");
  const std::size_t C = counts[0].size();
  t.row_totals.assign(counts.size(), 0);
  t.col_totals.assign(C, 0);
  for (std::size_t r = 0; r < counts.size(); ++r) {
    detail::require(counts[r].size() == C, "ragged contingency table");
    for (std::size_t c = 0; c < C; ++c) {
      detail::require(counts[r][c] >= 0, "negative contingency count");
      t.row_totals[r] += counts[r][c];
      t.col_totals[c] += counts[r][c];
      t.grand_total += counts[r][c];
    }
    t.truth_labels.push_back(r);
  }
  for (std::size_t c = 0; c < C; ++c) t.output_labels.push_back(c);
  t.counts = std::move(counts);
  return t;
}

struct BlockMatching {
  std::vector<long> output_for_truth;  // -1: truth block left unmatched
  std::vector<long> truth_for_output;  // -1: surplus output block
  std::int64_t matched_total = 0;
};

inline BlockMatching match_blocks(const ContingencyTable& t) {
  BlockMatching m;
  m.output_for_truth = max_weight_assignment(t.counts);
  m.truth_for_output.assign(t.cols(), -1);
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const long c = m.output_for_truth[r];
    if (c < 0) continue;
    m.truth_for_output[static_cast<std::size_t>(c)] = static_cast<long>(r);
    m.matched_total += t.counts[r][static_cast<std::size_t>(c)];
  }
  return m;
}

inline double overall_accuracy(const ContingencyTable& t) {
  return static_cast<double>(match_blocks(t).matched_total) / static_cast<double>(t.grand_total);
}

struct BlockwiseScores {
  std::vector<double> precision;  // per output block (table column)
  std::vector<double> recall;     // per truth block (table row)
  std::vector<bool> surplus;      // output block without a truth partner
};

inline BlockwiseScores blockwise_precision_recall(const ContingencyTable& t) {
  const auto m = match_blocks(t);
  BlockwiseScores s;
  s.precision.assign(t.cols(), 0.0);
  s.surplus.assign(t.cols(), true);
  s.recall.assign(t.rows(), 0.0);
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const long c = m.output_for_truth[r];
    if (c < 0) continue;
    const auto cell = static_cast<double>(t.counts[r][static_cast<std::size_t>(c)]);
    s.recall[r] = cell / static_cast<double>(t.row_totals[r]);
    s.precision[static_cast<std::size_t>(c)] = cell / static_cast<double>(t.col_totals[static_cast<std::size_t>(c)]);
    s.surplus[static_cast<std::size_t>(c)] = false;
  }
  return s;
}

// Node pairs by co-membership: c1 same truth and same output block, c2 both
// different, c3 same truth only, c4 same output only.
struct PairCategories {
  std::int64_t c1 = 0, c2 = 0, c3 = 0, c4 = 0;
  std::int64_t total() const noexcept { return c1 + c2 + c3 + c4; }
};

struct PairwiseMetrics {
  PairCategories pairs;
  double rand_index = 0.0;
  double adjusted_rand_index = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

inline std::int64_t choose2(std::int64_t n) { return n * (n - 1) / 2; }

inline PairCategories pair_categories(const ContingencyTable& t) {
  PairCategories p;
  std::int64_t same_truth = 0, same_output = 0;
  for (const auto& row : t.counts) {
    for (auto n : row) p.c1 += choose2(n);
  }
  for (auto n : t.row_totals) same_truth += choose2(n);
  for (auto n : t.col_totals) same_output += choose2(n);
  p.c3 = same_truth - p.c1;
  p.c4 = same_output - p.c1;
  p.c2 = choose2(t.grand_total) - p.c1 - p.c3 - p.c4;
  return p;
}

inline PairwiseMetrics pairwise_metrics(const ContingencyTable& t) {
  detail::require(t.grand_total >= 2, "pairwise metrics need at least two nodes");
  PairwiseMetrics m;
  m.pairs = pair_categories(t);
  const auto& p = m.pairs;
  const auto total = static_cast<double>(p.total());
  m.rand_index = static_cast<double>(p.c1 + p.c2) / total;
  const double same_truth = static_cast<double>(p.c1 + p.c3);
  const double same_output = static_cast<double>(p.c1 + p.c4);
  const double expected = same_truth * same_output / total;
  const double max_index = 0.5 * (same_truth + same_output);
  m.adjusted_rand_index =
      max_index == expected ? 1.0 : (static_cast<double>(p.c1) - expected) / (max_index - expected);
  m.precision = same_output == 0.0 ? 1.0 : static_cast<double>(p.c1) / same_output;
  m.recall = same_truth == 0.0 ? 1.0 : static_cast<double>(p.c1) / same_truth;
  return m;
}

struct InformationMetrics {
  double mutual_information = 0.0;
  double truth_entropy = 0.0;
  double output_entropy = 0.0;
  std::optional<double> precision;  // I / H(O); empty when undefined
  std::optional<double> recall;     // I / H(T)
};

inline InformationMetrics information_metrics(const ContingencyTable& t) {
  InformationMetrics m;
  const auto n = static_cast<double>(t.grand_total);
  auto plogp = [&](std::int64_t c) {
    if (c == 0) return 0.0;
    const double p = static_cast<double>(c) / n;
    return p * std::log(p);
  };
  for (auto c : t.row_totals) m.truth_entropy -= plogp(c);
  for (auto c : t.col_totals) m.output_entropy -= plogp(c);
  for (std::size_t r = 0; r < t.rows(); ++r) {
    for (std::size_t c = 0; c < t.cols(); ++c) {
      const auto nrc = t.counts[r][c];
      if (nrc == 0) continue;
      const double p = static_cast<double>(nrc) / n;
      m.mutual_information += p * std::log(static_cast<double>(nrc) * n /
                                            (static_cast<double>(t.row_totals[r]) * static_cast<double>(t.col_totals[c])));
    }
  }
  m.mutual_information = std::max(0.0, m.mutual_information);
  auto ratio = [&](double h) -> std::optional<double> {
    if (h > 0.0) return std::clamp(m.mutual_information / h, 0.0, 1.0);
    if (m.mutual_information <= 1e-12) return 1.0;
    return std::nullopt;
  };
  m.precision = ratio(m.output_entropy);
  m.recall = ratio(m.truth_entropy);
  return m;
}

struct CorrectnessReport {
  double overall_accuracy = 0.0;
  BlockwiseScores blockwise;
  PairwiseMetrics pairwise;
  InformationMetrics information;
  std::size_t evaluated_nodes = 0;
  std::size_t truth_blocks = 0;
  std::size_t output_blocks = 0;
};

inline CorrectnessReport correctness_report(const ContingencyTable& t) {
  CorrectnessReport r;
  r.overall_accuracy = overall_accuracy(t);
  r.blockwise = blockwise_precision_recall(t);
  if (t.grand_total >= 2) r.pairwise = pairwise_metrics(t);
  r.information = information_metrics(t);
  r.evaluated_nodes = static_cast<std::size_t>(t.grand_total);
  r.truth_blocks = t.rows();
  r.output_blocks = t.cols();
  return r;
}

inline CorrectnessReport evaluate_partition(const Partition& truth, const Partition& output,
                                            const std::vector<bool>& mask) {
  return correctness_report(build_contingency(truth, output, mask));
}

inline CorrectnessReport evaluate_partition(const Partition& truth, const Partition& output) {
  return correctness_report(build_contingency(truth, output));
}

struct StageTiming {
  std::size_t stage = 0;
  std::int64_t num_edges = 0;
  double elapsed_seconds = 0.0;
  double rate = 0.0;
};

struct ComputationalReport {
  std::int64_t num_edges = 0;
  double elapsed_seconds = 0.0;
  double rate = 0.0;  // edges per second
  std::optional<std::uint64_t> peak_memory_bytes;
  std::size_t num_workers = 1;
  std::vector<StageTiming> stages;
};

// Peak resident set size of this process, when the platform exposes it.
inline std::optional<std::uint64_t> peak_memory_bytes() {
  std::ifstream status("/proc/self/status");
  std::string key;
  while (status >> key) {
    if (key == "VmHWM:") {
      std::uint64_t kb = 0;
      if (status >> kb) return kb * 1024;
      return std::nullopt;
    }
    std::getline(status, key);
  }
  return std::nullopt;
}

inline ComputationalReport computational_report(std::int64_t num_edges, double elapsed_seconds,
                                                std::size_t num_workers,
                                                std::optional<std::uint64_t> peak_memory = std::nullopt) {
  detail::require(elapsed_seconds > 0.0, "elapsed time must be positive");
  ComputationalReport r;
  r.num_edges = num_edges;
  r.elapsed_seconds = elapsed_seconds;
  r.rate = static_cast<double>(num_edges) / elapsed_seconds;
  r.peak_memory_bytes = peak_memory;
  r.num_workers = num_workers;
  return r;
}

// Streaming form: one row per stage plus totals. Stage edge counts are the
// edges processed in that stage.
inline ComputationalReport computational_report(const std::vector<StageTiming>& stages, std::size_t num_workers,
                                                std::optional<std::uint64_t> peak_memory = std::nullopt) {
  std::int64_t edges = 0;
  double seconds = 0.0;
  for (const auto& s : stages) {
    edges += s.num_edges;
    seconds += s.elapsed_seconds;
  }
  auto r = computational_report(edges, seconds, num_workers, peak_memory);
  r.stages = stages;
  return r;
}

inline StageTiming stage_timing(std::size_t stage, std::int64_t num_edges, double elapsed_seconds) {
  StageTiming s;
  s.stage = stage;
  s.num_edges = num_edges;
  s.elapsed_seconds = elapsed_seconds;
  s.rate = elapsed_seconds > 0.0 ? static_cast<double>(num_edges) / elapsed_seconds : 0.0;
  return s;
}

}  // namespace sbp
