#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "oracles.hpp"
#include "sbp/merge.hpp"

namespace {

sbp::Graph two_cliques() {
  std::vector<sbp::Edge> edges;
  for (std::int64_t base : {0, 10}) {
    for (std::int64_t u = 0; u < 10; ++u) {
      for (std::int64_t v = 0; v < 10; ++v) {
        if (u != v) edges.push_back({base + u, base + v, 1});
      }
    }
  }
  return sbp::build_graph(edges);
}

// Posterior-sum change of relabeling every node of block r as s.
double merge_oracle(const sbp::Graph& g, std::vector<sbp::Block> b, std::size_t B, sbp::Block r, sbp::Block s) {
  const double before = oracle::log_posterior_sum(oracle::block_counts(g, b, B));
  for (auto& x : b) {
    if (x == r) x = s;
  }
  return before - oracle::log_posterior_sum(oracle::block_counts(g, b, B));
}

}  // namespace

TEST(MergeBlocks, TwoBlocksToOne) {
  std::mt19937_64 rng(1);
  const auto g = oracle::random_graph(rng, 15, 40);
  sbp::PartitionState chain(g, sbp::Partition{oracle::random_assignment(rng, 15, 2), 2});
  sbp::merge_blocks(g, chain, 1, sbp::MCMCConfig{}, 3);
  EXPECT_EQ(chain.num_blocks(), 1u);
  EXPECT_EQ(chain.block_state().count(0, 0), g.total_edge_weight());
}

TEST(MergeBlocks, RejectsBadTargets) {
  const auto g = two_cliques();
  sbp::PartitionState chain(g, sbp::singleton_partition(20));
  EXPECT_THROW(sbp::merge_blocks(g, chain, 0, sbp::MCMCConfig{}, 1), sbp::InvalidInput);
  EXPECT_THROW(sbp::merge_blocks(g, chain, 20, sbp::MCMCConfig{}, 1), sbp::InvalidInput);
}

// Every clique split into halves: blocks {0, 1} cover the first clique,
// {2, 3} the second.
TEST(MergeBlocks, TwoCliqueHalvesReunite) {
  const auto g = two_cliques();
  std::vector<sbp::Block> b(20);
  for (std::size_t i = 0; i < 20; ++i) b[i] = i / 5;
  const sbp::Partition p{b, 4};
  const auto state = sbp::recompute_block_matrix(g, p);

  double worst_intra = -1e300, best_inter = 1e300;
  for (sbp::Block r = 0; r < 4; ++r) {
    for (sbp::Block s = 0; s < 4; ++s) {
      if (r == s) continue;
      const double dS = sbp::merge_delta(state, r, s);
      EXPECT_NEAR(dS, merge_oracle(g, b, 4, r, s), 1e-10);
      if (r / 2 == s / 2) {
        worst_intra = std::max(worst_intra, dS);
      } else {
        best_inter = std::min(best_inter, dS);
      }
    }
  }
  EXPECT_LT(worst_intra, best_inter);

  sbp::PartitionState chain(g, p);
  sbp::merge_blocks(g, chain, 2, sbp::MCMCConfig{}, 77);
  ASSERT_EQ(chain.num_blocks(), 2u);
  for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(chain.partition()[i], i < 10 ? 0u : 1u);
  EXPECT_EQ(chain.block_state(), sbp::recompute_block_matrix(g, chain.partition()));
}

TEST(MergeDelta, MirrorBlocksMatchFullRecomputation) {
  // Blocks 0 and 1 are copies: each a directed 3-cycle sending one edge to
  // block 2, so their rows, columns and degrees coincide.
  const auto g = sbp::build_graph(std::vector<sbp::Edge>{
      {0, 1, 1}, {1, 2, 1}, {2, 0, 1}, {3, 4, 1}, {4, 5, 1}, {5, 3, 1}, {0, 6, 1}, {3, 7, 1}, {6, 7, 2}});
  const std::vector<sbp::Block> b{0, 0, 0, 1, 1, 1, 2, 2};
  const auto state = sbp::recompute_block_matrix(g, sbp::Partition{b, 3});
  ASSERT_EQ(state.count(0, 0), state.count(1, 1));
  ASSERT_EQ(state.count(0, 2), state.count(1, 2));
  ASSERT_EQ(state.degree(0), state.degree(1));
  EXPECT_NEAR(sbp::merge_delta(state, 0, 1), merge_oracle(g, b, 3, 0, 1), 1e-12);
  EXPECT_NEAR(sbp::merge_delta(state, 0, 1), sbp::merge_delta(state, 1, 0), 1e-12);
}

TEST(MergeDelta, RandomStatesMatchFullRecomputation) {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(3, 40)(rng);
    const std::size_t B = std::uniform_int_distribution<std::size_t>(2, std::min<std::size_t>(n, 8))(rng);
    const auto g = oracle::random_graph(rng, n, 3 * n);
    const auto b = oracle::random_assignment(rng, n, B);
    const auto state = sbp::recompute_block_matrix(g, sbp::Partition{b, B});
    const sbp::Block r = std::uniform_int_distribution<std::size_t>(0, B - 1)(rng);
    const sbp::Block s = (r + 1 + std::uniform_int_distribution<std::size_t>(0, B - 2)(rng)) % B;
    EXPECT_TRUE(oracle::close_relative(sbp::merge_delta(state, r, s), merge_oracle(g, b, B, r, s), 1e-10));
  }
}

TEST(MergeBlocks, ReachesTargetAndCompacts) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = oracle::random_graph(rng, 60, 150);
    sbp::PartitionState chain(g, sbp::singleton_partition(60));
    const std::size_t target = std::uniform_int_distribution<std::size_t>(1, 59)(rng);
    sbp::merge_blocks(g, chain, target, sbp::MCMCConfig{}, trial);
    EXPECT_EQ(chain.num_blocks(), target);
    EXPECT_TRUE(sbp::is_compact(chain.partition()));
    EXPECT_EQ(chain.block_state(), sbp::recompute_block_matrix(g, chain.partition()));
  }
}

TEST(MergeBlocks, DeterministicForFixedKey) {
  std::mt19937_64 rng(9);
  const auto g = oracle::random_graph(rng, 80, 300);
  sbp::MCMCConfig parallel;
  parallel.num_workers = 4;
  sbp::PartitionState a(g, sbp::singleton_partition(80)), b(g, sbp::singleton_partition(80));
  sbp::merge_blocks(g, a, 12, sbp::MCMCConfig{}, 5);
  sbp::merge_blocks(g, b, 12, parallel, 5);
  EXPECT_EQ(a.partition(), b.partition());
}
