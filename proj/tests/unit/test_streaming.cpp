#include <gtest/gtest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "sbp/generator.hpp"
#include "sbp/streaming.hpp"

namespace {

sbp::GeneratedGraph planted(std::uint64_t seed) {
  sbp::GeneratorConfig c;
  c.num_nodes = 240;
  c.num_blocks = 4;
  c.interaction = sbp::PlantedOmega{2400.0, 0.05};
  c.rng_seed = seed;
  return sbp::generate(c);
}

}  // namespace

TEST(Streaming, SingleStageMatchesBatchSearch) {
  const auto data = planted(1);
  sbp::MCMCConfig config;
  config.rng_seed = 6;
  sbp::StreamingSession session(config);
  const auto edges = data.graph.edges();
  session.ingest_stage(1, edges);
  const auto& report = session.partition_stage();
  const auto batch = sbp::golden_section_search(session.graph(), config);
  EXPECT_EQ(session.partition(), batch.partition);
  EXPECT_EQ(report.num_blocks, batch.num_blocks);
  EXPECT_EQ(report.description_length, batch.description_length);
  EXPECT_EQ(report.num_edges, data.graph.total_edge_weight());
}

TEST(Streaming, IdMapGrowsWithNewNodes) {
  sbp::StreamingSession session(sbp::MCMCConfig{});
  const std::vector<sbp::Edge> first{{10, 11, 1}, {11, 10, 1}, {12, 10, 1}};
  const std::vector<sbp::Edge> second{{12, 40, 1}, {40, 41, 2}, {10, 11, 1}};
  session.ingest_stage(1, first);
  session.partition_stage();
  EXPECT_EQ(session.external_ids(), (std::vector<std::int64_t>{10, 11, 12}));
  session.ingest_stage(2, second);
  const auto& report = session.partition_stage();
  EXPECT_EQ(session.external_ids(), (std::vector<std::int64_t>{10, 11, 12, 40, 41}));
  EXPECT_EQ(report.num_nodes, 5u);
  EXPECT_EQ(report.num_edges, 7);
  EXPECT_EQ(report.stage_edges, 4);
  const auto by_id = session.partition_by_external_id();
  ASSERT_EQ(by_id.size(), 42u);
  EXPECT_FALSE(by_id[0].has_value());
  EXPECT_TRUE(by_id[41].has_value());
}

TEST(Streaming, EmptyStageKeepsPartition) {
  const auto data = planted(2);
  sbp::StreamingSession session(sbp::MCMCConfig{});
  const auto edges = data.graph.edges();
  session.ingest_stage(1, edges);
  const auto before = session.partition_stage();
  const auto partition = session.partition();
  session.ingest_stage(2, std::vector<sbp::Edge>{});
  const auto& after = session.partition_stage();
  EXPECT_EQ(session.partition(), partition);
  EXPECT_EQ(after.num_blocks, before.num_blocks);
  EXPECT_EQ(after.description_length, before.description_length);
}

TEST(Streaming, RejectsOutOfOrderStages) {
  sbp::StreamingSession session(sbp::MCMCConfig{});
  const std::vector<sbp::Edge> batch{{0, 1, 1}};
  EXPECT_THROW(session.ingest_stage(2, batch), sbp::InvalidInput);
  session.ingest_stage(1, batch);
  EXPECT_THROW(session.ingest_stage(2, batch), sbp::InvalidInput);
  session.partition_stage();
  EXPECT_THROW(session.partition_stage(), sbp::InvalidInput);
  EXPECT_THROW(session.ingest_stage(1, batch), sbp::InvalidInput);
}

class StreamingModes : public ::testing::TestWithParam<sbp::StreamMode> {};

TEST_P(StreamingModes, AllStagesRebuildFullGraph) {
  const auto data = planted(3);
  const auto schedule = sbp::emit_streaming_stages(data.graph, GetParam(), 5, 4);
  sbp::StreamingSession session(sbp::MCMCConfig{});
  session.set_truth(data.truth, data.generated_mask);
  std::int64_t previous = 0;
  for (std::size_t k = 0; k < 5; ++k) {
    session.ingest_stage(k + 1, schedule.stages[k]);
    const auto& report = session.partition_stage();
    EXPECT_EQ(report.stage, k + 1);
    EXPECT_GE(report.num_edges, previous);
    previous = report.num_edges;
    if (report.num_nodes > 0) {
      ASSERT_TRUE(report.correctness.has_value());
      EXPECT_EQ(report.correctness->evaluated_nodes, report.num_nodes);
      EXPECT_EQ(session.partition().size(), report.num_nodes);
    }
  }
  EXPECT_EQ(session.reports().size(), 5u);
  EXPECT_EQ(session.stages_ingested(), 5u);
  EXPECT_EQ(previous, data.graph.total_edge_weight());

  // Translate back to external ids and compare with the original graph.
  std::vector<sbp::Edge> external;
  for (const auto& e : session.graph().edges()) {
    external.push_back({session.external_ids()[static_cast<std::size_t>(e.source)],
                        session.external_ids()[static_cast<std::size_t>(e.target)], e.weight});
  }
  std::sort(external.begin(), external.end());
  EXPECT_EQ(external, data.graph.edges());
}

INSTANTIATE_TEST_SUITE_P(Modes, StreamingModes,
                         ::testing::Values(sbp::StreamMode::edge_emergence, sbp::StreamMode::snowball),
                         [](const auto& info) {
                           auto name = std::string(sbp::to_string(info.param));
                           std::replace(name.begin(), name.end(), '-', '_');
                           return name;
                         });

TEST(Streaming, ColdAndWarmBothProduceValidPartitions) {
  const auto data = planted(4);
  const auto schedule = sbp::emit_streaming_stages(data.graph, sbp::StreamMode::edge_emergence, 4, 1);
  for (bool warm : {true, false}) {
    sbp::StreamingSession session(sbp::MCMCConfig{}, warm);
    for (std::size_t k = 0; k < 4; ++k) {
      session.ingest_stage(k + 1, schedule.stages[k]);
      const auto& report = session.partition_stage();
      EXPECT_TRUE(sbp::is_compact(session.partition()));
      EXPECT_EQ(session.partition().num_blocks, report.num_blocks);
      EXPECT_NEAR(report.description_length,
                  sbp::description_length(sbp::recompute_block_matrix(session.graph(), session.partition()),
                                          report.num_nodes, report.num_edges),
                  1e-8);
    }
  }
}
