#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "sbp/generator.hpp"
#include "sbp/search.hpp"

namespace sbp {

inline double median(std::vector<double> values) {
  detail::require(!values.empty(), "median of an empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

// Generated benchmark family: mean total degree 16 and B ~ N^0.4 blocks.
inline GeneratorConfig bench_graph_config(std::int64_t target_edges, std::uint64_t seed) {
  GeneratorConfig g;
  g.num_nodes = static_cast<std::size_t>(std::max<std::int64_t>(32, target_edges / 8));
  g.num_blocks = std::max<std::size_t>(2, static_cast<std::size_t>(std::lround(std::pow(g.num_nodes, 0.4))));
  g.block_size_concentration = 5.0;
  g.powerlaw_exponent = -2.5;
  g.interaction = PlantedOmega{static_cast<double>(target_edges), 0.1};
  g.rng_seed = seed;
  return g;
}

struct BenchPoint {
  std::int64_t target_edges = 0;
  std::int64_t num_edges = 0;
  std::size_t num_nodes = 0;
  std::size_t num_blocks = 0;
  std::vector<double> samples;  // seconds per repeat
  double seconds = 0.0;         // median over repeats
  double rate = 0.0;            // num_edges / seconds
};

inline BenchPoint run_bench_point(std::int64_t target_edges, const MCMCConfig& config, std::size_t repeats,
                                  std::uint64_t seed) {
  detail::require(repeats >= 1, "need at least one repeat");
  const auto generated = generate(bench_graph_config(target_edges, seed));
  BenchPoint p;
  p.target_edges = target_edges;
  p.num_edges = generated.graph.total_edge_weight();
  p.num_nodes = generated.graph.num_nodes();
  for (std::size_t r = 0; r < repeats; ++r) {
    const auto start = std::chrono::steady_clock::now();
    const auto result = golden_section_search(generated.graph, config);
    p.samples.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    p.num_blocks = result.num_blocks;
  }
  p.seconds = median(p.samples);
  p.rate = static_cast<double>(p.num_edges) / p.seconds;
  return p;
}

}  // namespace sbp
