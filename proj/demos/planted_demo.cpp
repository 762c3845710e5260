// Plants four communities, recovers them and prints how close the result is.
#include <iomanip>
#include <iostream>

#include "sbp/sbp.hpp"

int main() {
  sbp::GeneratorConfig gen;
  gen.num_nodes = 400;
  gen.num_blocks = 4;
  gen.interaction = sbp::PlantedOmega{3200.0, 0.05};
  gen.rng_seed = 11;
  const auto generated = sbp::generate(gen);

  sbp::MCMCConfig config;
  config.rng_seed = 3;
  const auto result = sbp::golden_section_search(generated.graph, config);
  const auto report = sbp::evaluate_partition(generated.truth, result.partition);

  std::cout << std::fixed << std::setprecision(4);
  std::cout << "nodes " << generated.graph.num_nodes() << ", edges " << generated.graph.total_edge_weight() << '\n';
  std::cout << "blocks found " << result.num_blocks << " (planted " << gen.num_blocks << ")\n";
  std::cout << "description length " << result.description_length << '\n';
  for (const auto& [B, H] : result.probes) std::cout << "  B=" << B << "  H=" << H << '\n';
  std::cout << "pairwise precision " << report.pairwise.precision << ", recall " << report.pairwise.recall << '\n';
  std::cout << "adjusted rand index " << report.pairwise.adjusted_rand_index << '\n';
}
