#pragma once

#include <optional>

#include <json.hpp>

#include "sbp/metrics.hpp"
#include "sbp/streaming.hpp"

namespace sbp {

namespace detail {

template <class T>
nlohmann::json optional_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace detail

// Flat snake_case objects mirroring the report structs.
inline nlohmann::json to_json(const CorrectnessReport& r) {
  nlohmann::json j;
  j["evaluated_nodes"] = r.evaluated_nodes;
  j["truth_blocks"] = r.truth_blocks;
  j["output_blocks"] = r.output_blocks;
  j["overall_accuracy"] = r.overall_accuracy;
  j["blockwise_precision"] = r.blockwise.precision;
  j["blockwise_recall"] = r.blockwise.recall;
  nlohmann::json surplus = nlohmann::json::array();
  for (std::size_t c = 0; c < r.blockwise.surplus.size(); ++c) {
    if (r.blockwise.surplus[c]) surplus.push_back(c);
  }
  j["surplus_output_blocks"] = surplus;
  j["pair_c1"] = r.pairwise.pairs.c1;
  j["pair_c2"] = r.pairwise.pairs.c2;
  j["pair_c3"] = r.pairwise.pairs.c3;
  j["pair_c4"] = r.pairwise.pairs.c4;
  j["rand_index"] = r.pairwise.rand_index;
  j["adjusted_rand_index"] = r.pairwise.adjusted_rand_index;
  j["pairwise_precision"] = r.pairwise.precision;
  j["pairwise_recall"] = r.pairwise.recall;
  j["mutual_information"] = r.information.mutual_information;
  j["truth_entropy"] = r.information.truth_entropy;
  j["output_entropy"] = r.information.output_entropy;
  j["info_precision"] = detail::optional_json(r.information.precision);
  j["info_recall"] = detail::optional_json(r.information.recall);
  return j;
}

inline nlohmann::json to_json(const StageTiming& s) {
  return {{"stage", s.stage}, {"num_edges", s.num_edges}, {"elapsed_seconds", s.elapsed_seconds}, {"rate", s.rate}};
}

inline nlohmann::json to_json(const ComputationalReport& r) {
  nlohmann::json j;
  j["num_edges"] = r.num_edges;
  j["elapsed_seconds"] = r.elapsed_seconds;
  j["rate"] = r.rate;
  j["peak_memory_bytes"] = detail::optional_json(r.peak_memory_bytes);
  j["num_workers"] = r.num_workers;
  j["energy_joules"] = nullptr;
  j["rate_per_watt"] = nullptr;
  if (!r.stages.empty()) {
    j["stages"] = nlohmann::json::array();
    for (const auto& s : r.stages) j["stages"].push_back(to_json(s));
  }
  return j;
}

inline nlohmann::json to_json(const StageReport& r) {
  nlohmann::json j;
  j["stage"] = r.stage;
  j["num_nodes"] = r.num_nodes;
  j["num_edges"] = r.num_edges;
  j["stage_edges"] = r.stage_edges;
  j["num_blocks"] = r.num_blocks;
  j["description_length"] = r.description_length;
  j["evaluations"] = r.evaluations;
  j["sweeps"] = r.sweeps;
  j["elapsed_seconds"] = r.timing.elapsed_seconds;
  j["rate"] = r.timing.rate;
  j["correctness"] = r.correctness ? to_json(*r.correctness) : nlohmann::json(nullptr);
  return j;
}

}  // namespace sbp
