#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "sbp/generator.hpp"

namespace {

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
  }
  return sxy / sxx;
}

sbp::GeneratorConfig explicit_config(std::uint64_t seed) {
  sbp::GeneratorConfig c;
  c.num_nodes = 200;
  c.num_blocks = 4;
  c.interaction = sbp::ExplicitOmega{{{400, 100, 150, 100}, {120, 500, 100, 100}, {100, 100, 300, 200},
                                      {100, 180, 100, 450}}};
  c.rng_seed = seed;
  return c;
}

std::vector<sbp::Edge> sorted_union(const sbp::StreamSchedule& s) {
  std::vector<sbp::Edge> all;
  for (const auto& stage : s.stages) all.insert(all.end(), stage.begin(), stage.end());
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace

TEST(TruthPartition, LargeConcentrationGivesEqualSizes) {
  sbp::GeneratorConfig c;
  c.num_nodes = 1000;
  c.num_blocks = 4;
  c.block_size_concentration = 1e6;
  const double sigma = std::sqrt(1000.0 * 0.25 * 0.75);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    c.rng_seed = seed;
    for (auto size : sbp::block_sizes(sbp::sample_truth_partition(c))) {
      EXPECT_LE(std::abs(static_cast<double>(size) - 250.0), 3.0 * sigma) << "seed " << seed;
    }
  }
}

TEST(TruthPartition, SingleBlockIsAllZero) {
  sbp::GeneratorConfig c;
  c.num_nodes = 50;
  c.num_blocks = 1;
  const auto p = sbp::sample_truth_partition(c);
  EXPECT_EQ(p.num_blocks, 1u);
  EXPECT_TRUE(std::all_of(p.assignment.begin(), p.assignment.end(), [](sbp::Block b) { return b == 0; }));
}

TEST(TruthPartition, EveryBlockNonEmptyEvenWhenSkewed) {
  sbp::GeneratorConfig c;
  c.num_nodes = 30;
  c.num_blocks = 12;
  c.block_size_concentration = 0.05;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    c.rng_seed = seed;
    EXPECT_TRUE(sbp::is_compact(sbp::sample_truth_partition(c)));
  }
}

TEST(TruthPartition, Deterministic) {
  sbp::GeneratorConfig c;
  c.num_nodes = 500;
  c.num_blocks = 7;
  c.rng_seed = 8;
  EXPECT_EQ(sbp::sample_truth_partition(c), sbp::sample_truth_partition(c));
}

TEST(GeneratorConfig, RejectsInvalidValues) {
  sbp::GeneratorConfig c;
  c.num_nodes = 3;
  c.num_blocks = 4;
  EXPECT_THROW(sbp::sample_truth_partition(c), sbp::InvalidInput);
  c.num_blocks = 2;
  c.powerlaw_exponent = -1.5;
  EXPECT_THROW(c.validate(), sbp::InvalidInput);
  c.powerlaw_exponent = -2.5;
  c.block_size_concentration = 0.0;
  EXPECT_THROW(c.validate(), sbp::InvalidInput);
  c.block_size_concentration = 1.0;
  c.interaction = sbp::PlantedOmega{100.0, 1.0};
  EXPECT_THROW(c.validate(), sbp::InvalidInput);
  c.interaction = sbp::ExplicitOmega{{{1.0}}};
  EXPECT_THROW(c.validate(), sbp::InvalidInput);
  c.interaction = sbp::ExplicitOmega{{{1.0, -1.0}, {0.0, 1.0}}};
  EXPECT_THROW(c.validate(), sbp::InvalidInput);
}

TEST(DegreeCorrections, UniformWithoutCorrection) {
  sbp::GeneratorConfig c;
  c.num_nodes = 100;
  c.num_blocks = 3;
  c.degree_correction = false;
  const auto truth = sbp::sample_truth_partition(c);
  const auto sizes = sbp::block_sizes(truth);
  const auto theta = sbp::sample_degree_corrections(c, truth);
  for (std::size_t i = 0; i < 100; ++i) EXPECT_NEAR(theta[i], 1.0 / static_cast<double>(sizes[truth[i]]), 1e-15);
}

TEST(DegreeCorrections, NormalizedPerBlock) {
  sbp::GeneratorConfig c;
  c.num_nodes = 400;
  c.num_blocks = 6;
  c.rng_seed = 4;
  const auto truth = sbp::sample_truth_partition(c);
  const auto theta = sbp::sample_degree_corrections(c, truth);
  std::vector<double> sum(6, 0.0);
  for (std::size_t i = 0; i < theta.size(); ++i) sum[truth[i]] += theta[i];
  for (double s : sum) EXPECT_NEAR(s, 1.0, 1e-12);
}

// 10^5 raw draws at exponent -2.5: the log-binned density falls with slope
// -2.5 and the complementary CDF with slope -1.5.
TEST(DegreeCorrections, RawDrawsFollowPowerLaw) {
  sbp::GeneratorConfig c;
  c.num_nodes = 100000;
  c.powerlaw_exponent = -2.5;
  c.rng_seed = 10;
  auto raw = sbp::sample_raw_degree_corrections(c);
  std::sort(raw.begin(), raw.end());
  ASSERT_GE(raw.front(), 1.0);
  const double hi = std::pow(100000.0, 0.75);
  ASSERT_LE(raw.back(), hi);

  std::vector<double> lx, ly;
  const int bins = 20;
  for (int k = 0; k < bins; ++k) {
    const double a = std::pow(hi, static_cast<double>(k) / bins);
    const double b = std::pow(hi, static_cast<double>(k + 1) / bins);
    const auto count = std::lower_bound(raw.begin(), raw.end(), b) - std::lower_bound(raw.begin(), raw.end(), a);
    if (count < 20) continue;
    lx.push_back(std::log(std::sqrt(a * b)));
    ly.push_back(std::log(static_cast<double>(count) / (b - a)));
  }
  ASSERT_GE(lx.size(), 8u);
  EXPECT_NEAR(least_squares_slope(lx, ly), -2.5, 0.2);

  std::vector<double> cx, cy;
  for (double x = 1.0; x < hi / 20.0; x *= 1.3) {
    const auto above = raw.end() - std::lower_bound(raw.begin(), raw.end(), x);
    cx.push_back(std::log(x));
    cy.push_back(std::log(static_cast<double>(above) / static_cast<double>(raw.size())));
  }
  EXPECT_NEAR(least_squares_slope(cx, cy), -1.5, 0.2);
}

TEST(BoundedPowerLaw, StaysInsideBounds) {
  std::mt19937_64 rng(1);
  for (double exponent : {-3.0, -2.0, -1.0}) {
    for (double x : sbp::sample_bounded_powerlaw(1000, exponent, 2.0, 9.0, rng)) {
      EXPECT_GE(x, 2.0);
      EXPECT_LE(x, 9.0);
    }
  }
}

TEST(GenerateEdges, PoissonTotalHasExpectedMean) {
  sbp::GeneratorConfig c;
  c.num_nodes = 30;
  c.num_blocks = 1;
  c.interaction = sbp::ExplicitOmega{{{100.0}}};
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    c.rng_seed = seed;
    total += static_cast<double>(sbp::generate(c).graph.total_edge_weight());
  }
  EXPECT_NEAR(total / 200.0, 100.0, 3.0);
}

TEST(GenerateEdges, ZeroInteractionGivesEmptyGraph) {
  sbp::GeneratorConfig c;
  c.num_nodes = 20;
  c.num_blocks = 2;
  c.interaction = sbp::ExplicitOmega{{{0.0, 0.0}, {0.0, 0.0}}};
  const auto g = sbp::generate(c);
  EXPECT_EQ(g.graph.total_edge_weight(), 0);
  EXPECT_EQ(g.graph.num_nodes(), 20u);
}

TEST(GenerateEdges, MeanBlockCountsMatchInteraction) {
  const auto omega = std::get<sbp::ExplicitOmega>(explicit_config(0).interaction).omega;
  std::vector<std::vector<double>> mean(4, std::vector<double>(4, 0.0));
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto g = sbp::generate(explicit_config(seed));
    const auto M = oracle::block_counts(g.graph, g.truth.assignment, 4);
    for (std::size_t r = 0; r < 4; ++r) {
      for (std::size_t s = 0; s < 4; ++s) mean[r][s] += static_cast<double>(M[r][s]) / 100.0;
    }
  }
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t s = 0; s < 4; ++s) EXPECT_NEAR(mean[r][s], omega[r][s], 0.05 * omega[r][s]) << r << "," << s;
  }
}

TEST(GenerateEdges, PlantedOverlapSplitsExpectedEdges) {
  sbp::GeneratorConfig c;
  c.num_nodes = 300;
  c.num_blocks = 5;
  c.interaction = sbp::PlantedOmega{5000.0, 0.2};
  const auto truth = sbp::sample_truth_partition(c);
  const auto omega = sbp::resolve_omega(c, truth);
  double diag = 0.0, off = 0.0;
  for (std::size_t r = 0; r < 5; ++r) {
    for (std::size_t s = 0; s < 5; ++s) (r == s ? diag : off) += omega[r][s];
  }
  EXPECT_NEAR(diag, 4000.0, 1e-9);
  EXPECT_NEAR(off, 1000.0, 1e-9);
}

TEST(Generate, DeterministicForFixedSeed) {
  const auto a = sbp::generate(explicit_config(5));
  const auto b = sbp::generate(explicit_config(5));
  EXPECT_EQ(a.graph, b.graph);
  EXPECT_EQ(a.truth, b.truth);
  EXPECT_NE(a.graph, sbp::generate(explicit_config(6)).graph);
  EXPECT_TRUE(std::all_of(a.generated_mask.begin(), a.generated_mask.end(), [](bool m) { return m; }));
}

TEST(Embed, ZeroCouplingIsDisjointUnion) {
  const auto gen = sbp::generate(explicit_config(1));
  std::mt19937_64 rng(3);
  const auto real = oracle::random_graph(rng, 50, 200);
  const auto out = sbp::embed_in_real_graph(real, gen, 0.0, 9);
  EXPECT_EQ(out.graph.num_nodes(), 250u);
  EXPECT_EQ(out.graph.total_edge_weight(), real.total_edge_weight() + gen.graph.total_edge_weight());
  for (const auto& e : out.graph.edges()) EXPECT_EQ(e.source < 50, e.target < 50);
}

TEST(Embed, MaskAndTruthLayout) {
  const auto gen = sbp::generate(explicit_config(1));
  std::mt19937_64 rng(3);
  const auto out = sbp::embed_in_real_graph(oracle::random_graph(rng, 50, 200), gen, 5.0, 9);
  for (std::size_t i = 0; i < 250; ++i) {
    EXPECT_EQ(out.generated_mask[i], i >= 50);
    EXPECT_EQ(out.truth[i], i < 50 ? 4u : gen.truth[i - 50]);
  }
  EXPECT_EQ(out.truth.num_blocks, 5u);
}

TEST(Embed, CrossEdgeCountAveragesCoupling) {
  const auto gen = sbp::generate(explicit_config(2));
  std::mt19937_64 rng(8);
  const auto real = oracle::random_graph(rng, 100, 400);
  const double coupling = 40.0;
  double cross = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto out = sbp::embed_in_real_graph(real, gen, coupling, seed);
    for (const auto& e : out.graph.edges()) {
      if ((e.source < 100) != (e.target < 100)) cross += static_cast<double>(e.weight);
    }
  }
  EXPECT_NEAR(cross / 100.0, coupling, 0.2 * coupling);
  EXPECT_THROW(sbp::embed_in_real_graph(real, gen, -1.0, 0), sbp::InvalidInput);
}

TEST(Schedule, SingleStageIsWholeGraph) {
  const auto g = sbp::generate(explicit_config(3)).graph;
  for (auto mode : {sbp::StreamMode::edge_emergence, sbp::StreamMode::snowball}) {
    const auto s = sbp::emit_streaming_stages(g, mode, 1, 4);
    ASSERT_EQ(s.num_stages(), 1u);
    EXPECT_EQ(sorted_union(s), g.edges());
  }
}

TEST(Schedule, StagesPartitionTheEdgeMultiset) {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 60)(rng);
    const auto g = oracle::random_graph(rng, n, std::uniform_int_distribution<std::size_t>(1, 4 * n)(rng));
    const std::size_t stages = std::uniform_int_distribution<std::size_t>(1, g.num_edge_records())(rng);
    const auto mode = trial % 2 ? sbp::StreamMode::snowball : sbp::StreamMode::edge_emergence;
    const auto s = sbp::emit_streaming_stages(g, mode, stages, trial);
    ASSERT_EQ(s.num_stages(), stages);
    EXPECT_EQ(sorted_union(s), g.edges()) << "trial " << trial;
  }
}

TEST(Schedule, EdgeEmergenceBatchesAreNearEqual) {
  const auto g = sbp::generate(explicit_config(3)).graph;
  const auto s = sbp::emit_streaming_stages(g, sbp::StreamMode::edge_emergence, 7, 1);
  const std::size_t total = g.num_edge_records();
  for (const auto& stage : s.stages) {
    EXPECT_GE(stage.size(), total / 7);
    EXPECT_LE(stage.size(), total / 7 + 1);
  }
}

TEST(Schedule, SnowballOnPathFromStart) {
  const auto g = sbp::build_graph(std::vector<sbp::Edge>{{0, 1, 1}, {1, 2, 1}, {2, 3, 1}});
  const auto s = sbp::emit_streaming_stages(g, sbp::StreamMode::snowball, 2, 0, 0);
  EXPECT_EQ(s.stages[0], (std::vector<sbp::Edge>{{0, 1, 1}}));
  EXPECT_EQ(s.stages[1], (std::vector<sbp::Edge>{{1, 2, 1}, {2, 3, 1}}));
  EXPECT_EQ(s.frontiers[0], (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(s.frontiers[1], (std::vector<std::size_t>{2, 3}));
}

TEST(Schedule, SnowballStageEdgesLieInsideFrontier) {
  const auto g = sbp::generate(explicit_config(4)).graph;
  const auto s = sbp::emit_streaming_stages(g, sbp::StreamMode::snowball, 5, 2);
  std::vector<bool> reached(g.num_nodes(), false);
  for (std::size_t k = 0; k < 5; ++k) {
    for (auto v : s.frontiers[k]) reached[v] = true;
    for (const auto& e : s.stages[k]) {
      EXPECT_TRUE(reached[e.source] && reached[e.target]);
    }
  }
}

TEST(Schedule, Deterministic) {
  const auto g = sbp::generate(explicit_config(3)).graph;
  for (auto mode : {sbp::StreamMode::edge_emergence, sbp::StreamMode::snowball}) {
    const auto a = sbp::emit_streaming_stages(g, mode, 6, 11);
    const auto b = sbp::emit_streaming_stages(g, mode, 6, 11);
    EXPECT_EQ(a.stages, b.stages);
  }
}

TEST(Schedule, RejectsTooManyStages) {
  const auto g = sbp::build_graph(std::vector<sbp::Edge>{{0, 1, 1}, {1, 2, 1}});
  EXPECT_THROW(sbp::emit_streaming_stages(g, sbp::StreamMode::edge_emergence, 3, 0), sbp::InvalidInput);
  EXPECT_THROW(sbp::emit_streaming_stages(g, sbp::StreamMode::edge_emergence, 0, 0), sbp::InvalidInput);
  EXPECT_THROW(sbp::parse_stream_mode("sideways"), sbp::InvalidInput);
}
