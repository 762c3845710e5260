#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sbp/errors.hpp"
#include "sbp/graph.hpp"
#include "sbp/partition.hpp"
#include "sbp/rng.hpp"

namespace sbp {

using Matrix = std::vector<std::vector<double>>;

// Expected block-pair edge counts given directly.
struct ExplicitOmega {
  Matrix omega;
};

// Assortative planted partition: `target_edges` expected edges, a share
// `overlap` of them between blocks.
struct PlantedOmega {
  double target_edges = 0.0;
  double overlap = 0.0;
};

struct GeneratorConfig {
  std::size_t num_nodes = 0;
  std::size_t num_blocks = 1;
  double powerlaw_exponent = -2.5;
  bool degree_correction = true;  // false: theta_i = 1 / |block(i)|
  double block_size_concentration = 5.0;
  std::variant<PlantedOmega, ExplicitOmega> interaction = PlantedOmega{};
  std::uint64_t rng_seed = 0;

  void validate() const {
    detail::require(num_nodes >= 1, "graph needs at least one node");
    detail::require(num_blocks >= 1, "need at least one block");
    detail::require(num_blocks <= num_nodes, "more blocks than nodes");
    detail::require(powerlaw_exponent >= -3.0 && powerlaw_exponent <= -2.0,
                    "power-law exponent must lie in [-3, -2]");
    detail::require(block_size_concentration > 0.0, "Dirichlet concentration must be positive");
    if (const auto* p = std::get_if<PlantedOmega>(&interaction)) {
      detail::require(p->target_edges >= 0.0, "target edge count must be nonnegative");
      detail::require(p->overlap >= 0.0 && p->overlap < 1.0, "overlap ratio must lie in [0, 1)");
    } else {
      const auto& omega = std::get<ExplicitOmega>(interaction).omega;
      detail::require(omega.size() == num_blocks, "interaction matrix has the wrong dimension");
      for (const auto& row : omega) {
        detail::require(row.size() == num_blocks, "interaction matrix has the wrong dimension");
        for (double v : row) detail::require(v >= 0.0 && std::isfinite(v), "interaction entries must be >= 0");
      }
    }
  }
};

struct GeneratedGraph {
  Graph graph;
  Partition truth;
  std::vector<bool> generated_mask;
};

namespace detail {

// Independent engines per generation step so that changing one step's
// consumption does not shift the others.
inline std::mt19937_64 step_engine(std::uint64_t seed, std::uint64_t step) {
  return std::mt19937_64(derive_seed(seed, {0x6e6, step}));
}

}  // namespace detail

inline Partition sample_truth_partition(const GeneratorConfig& config) {
  config.validate();
  const std::size_t N = config.num_nodes;
  const std::size_t B = config.num_blocks;
  auto rng = detail::step_engine(config.rng_seed, 1);
  if (B == 1) return Partition{std::vector<Block>(N, 0), 1};

  std::gamma_distribution<double> gamma(config.block_size_concentration, 1.0);
  std::vector<double> proportions(B);
  for (auto& p : proportions) p = gamma(rng);
  if (std::accumulate(proportions.begin(), proportions.end(), 0.0) <= 0.0) {
    std::fill(proportions.begin(), proportions.end(), 1.0);
  }
  std::discrete_distribution<std::size_t> pick(proportions.begin(), proportions.end());
  std::vector<Block> assignment(N);
  std::vector<std::size_t> sizes(B, 0);
  for (auto& b : assignment) {
    b = pick(rng);
    ++sizes[b];
  }
  for (Block empty = 0; empty < B; ++empty) {
    if (sizes[empty] != 0) continue;
    const Block largest = static_cast<Block>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < N; ++i) {
      if (assignment[i] == largest) members.push_back(i);
    }
    const std::size_t chosen = members[std::uniform_int_distribution<std::size_t>(0, members.size() - 1)(rng)];
    assignment[chosen] = empty;
    --sizes[largest];
    ++sizes[empty];
  }
  return Partition{std::move(assignment), B};
}

// Draws from the density p(x) proportional to x^exponent on [lo, hi].
inline std::vector<double> sample_bounded_powerlaw(std::size_t count, double exponent, double lo, double hi,
                                                   std::mt19937_64& rng) {
  detail::require(lo > 0.0 && hi > lo, "power-law bounds must satisfy 0 < lo < hi");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> out(count);
  const double a = exponent + 1.0;
  if (std::abs(a) < 1e-12) {
    const double log_ratio = std::log(hi / lo);
    for (auto& x : out) x = lo * std::exp(unit(rng) * log_ratio);
    return out;
  }
  const double la = std::pow(lo, a);
  const double ha = std::pow(hi, a);
  for (auto& x : out) x = std::pow(la + unit(rng) * (ha - la), 1.0 / a);
  return out;
}

// Raw degree-correction draws on [1, N^(3/4)] before block normalization.
inline std::vector<double> sample_raw_degree_corrections(const GeneratorConfig& config) {
  auto rng = detail::step_engine(config.rng_seed, 2);
  const double hi = std::max(2.0, std::pow(static_cast<double>(config.num_nodes), 0.75));
  return sample_bounded_powerlaw(config.num_nodes, config.powerlaw_exponent, 1.0, hi, rng);
}

inline std::vector<double> sample_degree_corrections(const GeneratorConfig& config, const Partition& truth) {
  config.validate();
  detail::require(truth.size() == config.num_nodes, "truth partition length differs from N");
  std::vector<double> theta = config.degree_correction ? sample_raw_degree_corrections(config)
                                                       : std::vector<double>(config.num_nodes, 1.0);
  std::vector<double> block_sum(truth.num_blocks, 0.0);
  for (std::size_t i = 0; i < theta.size(); ++i) block_sum[truth[i]] += theta[i];
  for (std::size_t i = 0; i < theta.size(); ++i) theta[i] /= block_sum[truth[i]];
  return theta;
}

inline Matrix resolve_omega(const GeneratorConfig& config, const Partition& truth) {
  if (const auto* e = std::get_if<ExplicitOmega>(&config.interaction)) return e->omega;
  const auto& planted = std::get<PlantedOmega>(config.interaction);
  const std::size_t B = config.num_blocks;
  const auto sizes = block_sizes(truth);
  Matrix omega(B, std::vector<double>(B, 0.0));
  if (B == 1) {
    omega[0][0] = planted.target_edges;
    return omega;
  }
  double diag_norm = 0.0, off_norm = 0.0;
  for (std::size_t r = 0; r < B; ++r) {
    for (std::size_t s = 0; s < B; ++s) {
      const double w = static_cast<double>(sizes[r]) * static_cast<double>(sizes[s]);
      (r == s ? diag_norm : off_norm) += w;
    }
  }
  for (std::size_t r = 0; r < B; ++r) {
    for (std::size_t s = 0; s < B; ++s) {
      const double w = static_cast<double>(sizes[r]) * static_cast<double>(sizes[s]);
      omega[r][s] = r == s ? (1.0 - planted.overlap) * planted.target_edges * w / diag_norm
                           : planted.overlap * planted.target_edges * w / off_norm;
    }
  }
  return omega;
}

// Grouped Poisson sampling: the total for block pair (r, s) is Poisson with
// mean omega[r][s]; each edge's endpoints are then drawn proportionally to
// theta inside r and inside s.
inline GeneratedGraph generate_edges(const GeneratorConfig& config, const Partition& truth,
                                     const std::vector<double>& theta) {
  config.validate();
  const std::size_t B = config.num_blocks;
  const Matrix omega = resolve_omega(config, truth);
  detail::require(omega.size() == B, "interaction matrix has the wrong dimension");
  std::vector<std::vector<std::size_t>> members(B);
  for (std::size_t i = 0; i < truth.size(); ++i) members[truth[i]].push_back(i);
  std::vector<std::discrete_distribution<std::size_t>> within(B);
  for (std::size_t r = 0; r < B; ++r) {
    std::vector<double> w;
    w.reserve(members[r].size());
    for (std::size_t i : members[r]) w.push_back(theta[i]);
    within[r] = std::discrete_distribution<std::size_t>(w.begin(), w.end());
  }
  auto rng = detail::step_engine(config.rng_seed, 3);
  std::vector<Edge> edges;
  for (std::size_t r = 0; r < B; ++r) {
    detail::require(omega[r].size() == B, "interaction matrix has the wrong dimension");
    for (std::size_t s = 0; s < B; ++s) {
      if (omega[r][s] <= 0.0) continue;
      const auto total = std::poisson_distribution<std::int64_t>(omega[r][s])(rng);
      for (std::int64_t e = 0; e < total; ++e) {
        const auto u = members[r][within[r](rng)];
        const auto v = members[s][within[s](rng)];
        edges.push_back({static_cast<std::int64_t>(u), static_cast<std::int64_t>(v), 1});
      }
    }
  }
  GeneratedGraph g;
  g.graph = Graph::from_edges(edges, config.num_nodes);
  g.truth = truth;
  g.generated_mask.assign(config.num_nodes, true);
  return g;
}

inline GeneratedGraph generate(const GeneratorConfig& config) {
  const Partition truth = sample_truth_partition(config);
  return generate_edges(config, truth, sample_degree_corrections(config, truth));
}

// Union of a real graph (ids first, truth block B) and a generated graph.
// Each real/generated pair is joined with probability
// min(1, coupling k_u k_v / (sum k_real * sum k_gen)), direction chosen by a
// fair coin.
inline GeneratedGraph embed_in_real_graph(const Graph& real, const GeneratedGraph& generated, double coupling,
                                          std::uint64_t rng_seed) {
  detail::require(coupling >= 0.0 && std::isfinite(coupling), "coupling must be nonnegative");
  const std::size_t nr = real.num_nodes();
  const std::size_t ng = generated.graph.num_nodes();
  std::vector<Edge> edges;
  for (const auto& e : real.edges()) edges.push_back(e);
  for (auto e : generated.graph.edges()) {
    e.source += static_cast<std::int64_t>(nr);
    e.target += static_cast<std::int64_t>(nr);
    edges.push_back(e);
  }
  double sum_real = 0.0, sum_gen = 0.0;
  for (std::size_t u = 0; u < nr; ++u) sum_real += static_cast<double>(real.degree(u));
  for (std::size_t v = 0; v < ng; ++v) sum_gen += static_cast<double>(generated.graph.degree(v));
  if (coupling > 0.0 && sum_real > 0.0 && sum_gen > 0.0) {
    std::mt19937_64 rng(derive_seed(rng_seed, {0xe3b}));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double scale = coupling / (sum_real * sum_gen);
    for (std::size_t u = 0; u < nr; ++u) {
      const double ku = static_cast<double>(real.degree(u));
      if (ku == 0.0) continue;
      for (std::size_t v = 0; v < ng; ++v) {
        const double p = std::min(1.0, scale * ku * static_cast<double>(generated.graph.degree(v)));
        if (p <= 0.0 || unit(rng) >= p) continue;
        const auto a = static_cast<std::int64_t>(u);
        const auto b = static_cast<std::int64_t>(nr + v);
        if (unit(rng) < 0.5) {
          edges.push_back({a, b, 1});
        } else {
          edges.push_back({b, a, 1});
        }
      }
    }
  }
  GeneratedGraph out;
  out.graph = Graph::from_edges(edges, nr + ng);
  out.truth.num_blocks = generated.truth.num_blocks + 1;
  out.truth.assignment.assign(nr, generated.truth.num_blocks);
  out.truth.assignment.insert(out.truth.assignment.end(), generated.truth.assignment.begin(),
                              generated.truth.assignment.end());
  out.generated_mask.assign(nr, false);
  out.generated_mask.insert(out.generated_mask.end(), generated.generated_mask.begin(),
                            generated.generated_mask.end());
  return out;
}

enum class StreamMode { edge_emergence, snowball };

inline std::string_view to_string(StreamMode mode) {
  return mode == StreamMode::snowball ? "snowball" : "edge-emergence";
}

inline StreamMode parse_stream_mode(std::string_view name) {
  if (name == "edge-emergence" || name == "emergence" || name == "edge") return StreamMode::edge_emergence;
  if (name == "snowball") return StreamMode::snowball;
  detail::fail("unknown stream mode '" + std::string(name) + "'");
}

struct StreamSchedule {
  StreamMode mode = StreamMode::edge_emergence;
  std::vector<std::vector<Edge>> stages;
  std::vector<std::vector<std::size_t>> frontiers;  // snowball: nodes reached per stage

  std::size_t num_stages() const noexcept { return stages.size(); }
};

// Splits the graph's weighted edge records into `num_stages` disjoint
// batches. Edge emergence permutes the records; snowball follows a
// breadth-first exploration (ignoring direction) from `start`, or a random
// node, restarting at a random unvisited node when the frontier runs dry.
inline StreamSchedule emit_streaming_stages(const Graph& graph, StreamMode mode, std::size_t num_stages,
                                            std::uint64_t rng_seed, std::optional<std::size_t> start = {}) {
  detail::require(num_stages >= 1, "need at least one stage");
  auto records = graph.edges();
  detail::require(num_stages <= records.size(), "more stages than edges");
  std::mt19937_64 rng(derive_seed(rng_seed, {0x57e}));
  StreamSchedule schedule;
  schedule.mode = mode;
  schedule.stages.resize(num_stages);
  auto chunk_bound = [&](std::size_t k, std::size_t total) { return k * total / num_stages; };

  if (mode == StreamMode::edge_emergence) {
    std::shuffle(records.begin(), records.end(), rng);
    for (std::size_t k = 0; k < num_stages; ++k) {
      schedule.stages[k].assign(records.begin() + static_cast<std::ptrdiff_t>(chunk_bound(k, records.size())),
                                records.begin() + static_cast<std::ptrdiff_t>(chunk_bound(k + 1, records.size())));
    }
    return schedule;
  }

  const std::size_t N = graph.num_nodes();
  detail::require(!start || *start < N, "snowball start node out of range");
  std::vector<bool> visited(N, false);
  std::vector<std::size_t> order;
  order.reserve(N);
  std::vector<std::size_t> unvisited(N);
  std::iota(unvisited.begin(), unvisited.end(), std::size_t{0});
  std::shuffle(unvisited.begin(), unvisited.end(), rng);
  if (start) {
    std::iter_swap(std::find(unvisited.begin(), unvisited.end(), *start), unvisited.begin());
  }
  std::size_t cursor = 0;
  std::vector<std::size_t> queue;
  while (order.size() < N) {
    while (visited[unvisited[cursor]]) ++cursor;
    queue.assign(1, unvisited[cursor]);
    visited[queue[0]] = true;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t i = queue[head];
      order.push_back(i);
      auto reach = [&](std::size_t j) {
        if (!visited[j]) {
          visited[j] = true;
          queue.push_back(j);
        }
      };
      for (const auto& nb : graph.out_neighbors(i)) reach(nb.node);
      for (const auto& nb : graph.in_neighbors(i)) reach(nb.node);
    }
  }
  std::vector<std::size_t> stage_of(N);
  schedule.frontiers.resize(num_stages);
  for (std::size_t k = 0; k < num_stages; ++k) {
    for (std::size_t p = chunk_bound(k, N); p < chunk_bound(k + 1, N); ++p) {
      stage_of[order[p]] = k;
      schedule.frontiers[k].push_back(order[p]);
    }
  }
  for (const auto& e : records) {
    const auto k = std::max(stage_of[static_cast<std::size_t>(e.source)], stage_of[static_cast<std::size_t>(e.target)]);
    schedule.stages[k].push_back(e);
  }
  return schedule;
}

}  // namespace sbp
