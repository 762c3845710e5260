#include <algorithm>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sbp/report_json.hpp"
#include "sbp/sbp.hpp"

namespace {

using json = nlohmann::json;

constexpr int kFormatVersion = 1;
constexpr const char* kToolVersion = "1.0.0";

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

void write_json(const std::string& path, const json& doc) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw sbp::DataError("cannot open '" + path + "' for writing");
  out << doc.dump(2) << '\n';
}

struct Manifest {
  std::string command;
  std::vector<std::string> argv;
  json config = json::object();
  json inputs = json::array();
  json outputs = json::array();

  void write(const std::string& name) {
    const std::string path = name + "_manifest.json";
    outputs.push_back(path);
    json doc;
    doc["format_version"] = kFormatVersion;
    doc["tool_version"] = kToolVersion;
    doc["command"] = command;
    doc["argv"] = argv;
    doc["config"] = config;
    doc["inputs"] = inputs;
    doc["outputs"] = outputs;
    doc["timestamp"] = utc_timestamp();
    write_json(path, doc);
  }
};

struct EngineFlags {
  sbp::MCMCConfig config;
  std::string mode = "sequential";
  bool common_random = false;

  void add_to(CLI::App* app) {
    app->add_option("--mode", mode, "sequential | parallel | batch")->capture_default_str();
    app->add_option("--workers", config.num_workers, "worker threads for parallel sweeps")->capture_default_str();
    app->add_option("--seed", config.rng_seed, "master random seed")->capture_default_str();
    app->add_option("--beta", config.beta, "MCMC update rate")->capture_default_str();
    app->add_option("--max-sweeps", config.max_sweeps)->capture_default_str();
    app->add_option("--threshold", config.convergence_threshold, "relative convergence threshold")
        ->capture_default_str();
    app->add_option("--initial-threshold", config.initial_convergence_threshold,
                    "threshold before the block-count bracket exists")
        ->capture_default_str();
    app->add_option("--window", config.convergence_window)->capture_default_str();
    app->add_option("--merge-rate", config.merge_reduction_rate)->capture_default_str();
    app->add_option("--merge-proposals", config.merge_proposals_per_block)->capture_default_str();
    app->add_flag("--common-random", common_random,
                  "sequential mode evaluates every node against the sweep-start state so it "
                  "replays the batch path exactly");
  }

  sbp::MCMCConfig resolve() const {
    sbp::MCMCConfig c = config;
    c.execution_mode = sbp::parse_execution_mode(mode);
    if (common_random && c.execution_mode == sbp::ExecutionMode::sequential) {
      c.execution_mode = sbp::ExecutionMode::parallel_snapshot;
      c.num_workers = 1;
    }
    c.validate();
    return c;
  }

  json echo() const {
    const auto c = resolve();
    return {{"execution_mode", std::string(sbp::to_string(c.execution_mode))},
            {"requested_mode", mode},
            {"common_random", common_random},
            {"num_workers", c.num_workers},
            {"rng_seed", c.rng_seed},
            {"beta", c.beta},
            {"max_sweeps", c.max_sweeps},
            {"convergence_threshold", c.convergence_threshold},
            {"initial_convergence_threshold", c.initial_convergence_threshold},
            {"convergence_window", c.convergence_window},
            {"merge_reduction_rate", c.merge_reduction_rate},
            {"merge_proposals_per_block", c.merge_proposals_per_block}};
  }
};

sbp::Graph load_graph(const std::string& path, std::size_t min_nodes) {
  const auto edges = sbp::io::read_edges(path);
  std::size_t n = min_nodes;
  for (const auto& e : edges) n = std::max<std::size_t>(n, static_cast<std::size_t>(std::max(e.source, e.target)) + 1);
  return sbp::Graph::from_edges(edges, n);
}

// Whitespace-separated B x B matrix of expected block-pair edge counts.
sbp::Matrix read_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw sbp::DataError("cannot open '" + path + "' for reading");
  sbp::Matrix m;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::vector<double> row;
    std::string token;
    while (fields >> token) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(token, &used));
        if (used != token.size()) throw std::invalid_argument(token);
      } catch (const std::exception&) {
        throw sbp::DataError(path + ":" + std::to_string(line_no) + ": not a number: '" + token + "'");
      }
    }
    if (!row.empty()) m.push_back(std::move(row));
  }
  return m;
}

void write_block_partition(const std::string& path, const std::vector<std::optional<sbp::Block>>& blocks) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw sbp::DataError("cannot open '" + path + "' for writing");
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i]) out << i + 1 << '\t' << *blocks[i] + 1 << '\n';
  }
}

json merge_flat(json a, const json& b) {
  for (const auto& [k, v] : b.items()) a[k] = v;
  return a;
}

struct GenerateFlags {
  sbp::GeneratorConfig gen;
  double edges = 0.0;
  double overlap = 0.05;
  std::string omega_file;
  bool no_degree_correction = false;
  std::size_t stages = 0;
  std::string stream_mode = "edge-emergence";
  std::string real_graph;
  double coupling = 1.0;
  std::string name;
};

int cmd_generate(const GenerateFlags& f, Manifest& manifest) {
  sbp::GeneratorConfig config = f.gen;
  config.degree_correction = !f.no_degree_correction;
  if (!f.omega_file.empty()) {
    config.interaction = sbp::ExplicitOmega{read_matrix(f.omega_file)};
    manifest.inputs.push_back(f.omega_file);
  } else {
    const double edges = f.edges > 0.0 ? f.edges : 8.0 * static_cast<double>(config.num_nodes);
    config.interaction = sbp::PlantedOmega{edges, f.overlap};
    manifest.config["target_edges"] = edges;
    manifest.config["overlap"] = f.overlap;
  }
  auto generated = sbp::generate(config);
  if (!f.real_graph.empty()) {
    manifest.inputs.push_back(f.real_graph);
    generated = sbp::embed_in_real_graph(load_graph(f.real_graph, 0), generated, f.coupling, config.rng_seed);
    sbp::io::write_mask(f.name + "_mask.tsv", generated.generated_mask);
    manifest.outputs.push_back(f.name + "_mask.tsv");
  }
  sbp::io::write_edges(f.name + ".tsv", generated.graph.edges());
  sbp::io::write_partition(f.name + "_truth.tsv", generated.truth);
  manifest.outputs.push_back(f.name + ".tsv");
  manifest.outputs.push_back(f.name + "_truth.tsv");
  if (f.stages > 0) {
    const auto schedule = sbp::emit_streaming_stages(generated.graph, sbp::parse_stream_mode(f.stream_mode), f.stages,
                                                     config.rng_seed);
    for (std::size_t k = 0; k < schedule.num_stages(); ++k) {
      const std::string path = f.name + "_stage_" + std::to_string(k + 1) + ".tsv";
      sbp::io::write_edges(path, schedule.stages[k]);
      manifest.outputs.push_back(path);
    }
  }
  manifest.config["num_nodes"] = config.num_nodes;
  manifest.config["num_blocks"] = config.num_blocks;
  manifest.config["powerlaw_exponent"] = config.powerlaw_exponent;
  manifest.config["degree_correction"] = config.degree_correction;
  manifest.config["block_size_concentration"] = config.block_size_concentration;
  manifest.config["rng_seed"] = config.rng_seed;
  manifest.config["stages"] = f.stages;
  manifest.config["stream_mode"] = f.stream_mode;
  manifest.config["coupling"] = f.coupling;
  std::cout << "generated " << generated.graph.num_nodes() << " nodes, " << generated.graph.total_edge_weight()
            << " edges -> " << f.name << ".tsv\n";
  return 0;
}

struct PartitionFlags {
  EngineFlags engine;
  std::string input;
  std::string truth;
  std::string mask;
  std::size_t num_nodes = 0;
  std::string name;
};

int cmd_partition(const PartitionFlags& f, Manifest& manifest) {
  const auto config = f.engine.resolve();
  manifest.config = f.engine.echo();
  manifest.inputs.push_back(f.input);
  std::optional<sbp::Partition> truth;
  if (!f.truth.empty()) {
    truth = sbp::io::read_partition(f.truth);
    manifest.inputs.push_back(f.truth);
  }
  const auto graph = load_graph(f.input, std::max(f.num_nodes, truth ? truth->size() : 0));
  const auto start = std::chrono::steady_clock::now();
  const auto result = sbp::golden_section_search(graph, config);
  const double seconds =
      std::max(1e-9, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());

  sbp::io::write_partition(f.name + "_partition.tsv", result.partition);
  manifest.outputs.push_back(f.name + "_partition.tsv");
  const auto comp = sbp::computational_report(graph.total_edge_weight(), seconds, config.num_workers,
                                              sbp::peak_memory_bytes());
  json report = sbp::to_json(comp);
  report["command"] = "partition";
  report["num_nodes"] = graph.num_nodes();
  report["num_blocks"] = result.num_blocks;
  report["description_length"] = result.description_length;
  report["execution_mode"] = std::string(sbp::to_string(config.execution_mode));
  report["evaluations"] = result.evaluations;
  report["sweeps"] = result.total_sweeps;
  json probes = json::object();
  for (const auto& [B, H] : result.probes) probes[std::to_string(B)] = H;
  report["probes"] = probes;
  if (truth) {
    if (truth->size() != graph.num_nodes()) throw sbp::DataError("truth file does not cover every node");
    std::vector<bool> mask(graph.num_nodes(), true);
    if (!f.mask.empty()) {
      mask = sbp::io::read_mask(f.mask, graph.num_nodes());
      manifest.inputs.push_back(f.mask);
    }
    report = merge_flat(report, sbp::to_json(sbp::evaluate_partition(*truth, result.partition, mask)));
  }
  write_json(f.name + "_report.json", report);
  manifest.outputs.push_back(f.name + "_report.json");
  std::cout << "B* = " << result.num_blocks << ", H = " << std::setprecision(10) << result.description_length
            << " (" << seconds << " s) -> " << f.name << "_partition.tsv\n";
  return 0;
}

struct EvaluateFlags {
  std::string truth;
  std::string partition;
  std::string mask;
  std::string name;
};

int cmd_evaluate(const EvaluateFlags& f, Manifest& manifest) {
  const auto truth = sbp::io::read_partition(f.truth);
  const auto output = sbp::io::read_partition(f.partition);
  manifest.inputs.push_back(f.truth);
  manifest.inputs.push_back(f.partition);
  if (truth.size() != output.size()) {
    throw sbp::DataError("truth covers " + std::to_string(truth.size()) + " nodes, partition covers " +
                         std::to_string(output.size()));
  }
  std::vector<bool> mask(truth.size(), true);
  if (!f.mask.empty()) {
    mask = sbp::io::read_mask(f.mask, truth.size());
    manifest.inputs.push_back(f.mask);
  }
  json report = sbp::to_json(sbp::evaluate_partition(truth, output, mask));
  report["command"] = "evaluate";
  write_json(f.name + "_report.json", report);
  manifest.outputs.push_back(f.name + "_report.json");
  std::cout << report.dump(2) << '\n';
  return 0;
}

struct StreamFlags {
  EngineFlags engine;
  std::string prefix;
  std::size_t stages = 0;
  std::string truth;
  std::string mask;
  bool cold_each_stage = false;
  std::string name;
};

int cmd_stream(const StreamFlags& f, Manifest& manifest) {
  const auto config = f.engine.resolve();
  manifest.config = f.engine.echo();
  manifest.config["cold_each_stage"] = f.cold_each_stage;
  std::size_t stages = f.stages;
  if (stages == 0) {
    while (std::filesystem::exists(f.prefix + "_stage_" + std::to_string(stages + 1) + ".tsv")) ++stages;
  }
  if (stages == 0) throw sbp::DataError("no stage files found for prefix '" + f.prefix + "'");
  sbp::StreamingSession session(config, !f.cold_each_stage);
  if (!f.truth.empty()) {
    auto truth = sbp::io::read_partition(f.truth);
    std::vector<bool> mask(truth.size(), true);
    if (!f.mask.empty()) {
      mask = sbp::io::read_mask(f.mask, truth.size());
      manifest.inputs.push_back(f.mask);
    }
    manifest.inputs.push_back(f.truth);
    session.set_truth(std::move(truth), std::move(mask));
  }
  json stage_reports = json::array();
  std::vector<sbp::StageTiming> timings;
  for (std::size_t k = 1; k <= stages; ++k) {
    const std::string path = f.prefix + "_stage_" + std::to_string(k) + ".tsv";
    manifest.inputs.push_back(path);
    session.ingest_stage(k, sbp::io::read_edges(path));
    const auto& r = session.partition_stage();
    stage_reports.push_back(sbp::to_json(r));
    timings.push_back(r.timing);
    std::cout << "stage " << k << ": N = " << r.num_nodes << ", E = " << r.num_edges << ", B = " << r.num_blocks
              << ", H = " << std::setprecision(10) << r.description_length << '\n';
  }
  json report;
  report["command"] = "stream";
  report["stages"] = stage_reports;
  json totals = sbp::to_json(sbp::computational_report(
      [&] {
        auto t = timings;
        for (auto& s : t) s.elapsed_seconds = std::max(s.elapsed_seconds, 1e-9);
        return t;
      }(),
      config.num_workers, sbp::peak_memory_bytes()));
  totals.erase("stages");
  report["totals"] = totals;
  report["final_num_blocks"] = session.reports().back().num_blocks;
  report["final_description_length"] = session.reports().back().description_length;
  write_json(f.name + "_stream_report.json", report);
  write_block_partition(f.name + "_partition.tsv", session.partition_by_external_id());
  manifest.outputs.push_back(f.name + "_stream_report.json");
  manifest.outputs.push_back(f.name + "_partition.tsv");
  return 0;
}

struct BenchFlags {
  EngineFlags engine;
  std::vector<std::int64_t> sizes{1000, 10000};
  std::size_t repeats = 1;
  std::uint64_t graph_seed = 1;
  std::string name;
};

int cmd_bench(const BenchFlags& f, Manifest& manifest) {
  const auto config = f.engine.resolve();
  manifest.config = f.engine.echo();
  manifest.config["sizes"] = f.sizes;
  manifest.config["repeats"] = f.repeats;
  manifest.config["graph_seed"] = f.graph_seed;
  std::ofstream table(f.name + "_bench.tsv", std::ios::trunc);
  if (!table) throw sbp::DataError("cannot open '" + f.name + "_bench.tsv' for writing");
  table << "# edges\tnodes\tblocks\tseconds\trate\n";
  std::cout << "edges\tnodes\tblocks\tseconds\trate\n";
  json rows = json::array();
  for (auto E : f.sizes) {
    if (E < 1) throw sbp::InvalidInput("bench sizes must be positive");
    const auto p = sbp::run_bench_point(E, config, f.repeats, f.graph_seed);
    std::ostringstream line;
    line << p.num_edges << '\t' << p.num_nodes << '\t' << p.num_blocks << '\t' << p.seconds << '\t' << p.rate;
    table << line.str() << '\n';
    std::cout << line.str() << '\n';
    rows.push_back({{"target_edges", p.target_edges},
                    {"num_edges", p.num_edges},
                    {"num_nodes", p.num_nodes},
                    {"num_blocks", p.num_blocks},
                    {"samples", p.samples},
                    {"seconds", p.seconds},
                    {"rate", p.rate}});
  }
  write_json(f.name + "_bench.json", {{"command", "bench"}, {"rows", rows}});
  manifest.outputs.push_back(f.name + "_bench.tsv");
  manifest.outputs.push_back(f.name + "_bench.json");
  return 0;
}

int run(std::vector<std::string> args);

int cmd_replay(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw sbp::DataError("cannot open '" + manifest_path + "' for reading");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw sbp::DataError(manifest_path + ": " + e.what());
  }
  if (!doc.contains("format_version") || doc["format_version"] != kFormatVersion || !doc.contains("argv")) {
    throw sbp::DataError(manifest_path + ": unsupported manifest");
  }
  auto argv = doc["argv"].get<std::vector<std::string>>();
  if (argv.empty() || argv[0] == "replay") throw sbp::DataError(manifest_path + ": manifest has no command");
  return run(std::move(argv));
}

int run(std::vector<std::string> args) {
  CLI::App app{"Stochastic block partition: generate, partition, stream and evaluate graphs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  GenerateFlags gen;
  auto* generate = app.add_subcommand("generate", "sample a degree-corrected SBM graph with its truth partition");
  generate->add_option("-N,--nodes", gen.gen.num_nodes, "number of nodes")->required();
  generate->add_option("-B,--blocks", gen.gen.num_blocks, "number of truth blocks")->required();
  generate->add_option("--edges", gen.edges, "expected edge count (default 8 N)");
  generate->add_option("--overlap", gen.overlap, "expected between-block share of edges")->capture_default_str();
  generate->add_option("--omega", gen.omega_file, "explicit B x B matrix of expected block-pair edge counts");
  generate->add_option("--exponent", gen.gen.powerlaw_exponent, "degree-correction power-law exponent")
      ->capture_default_str();
  generate->add_option("--alpha", gen.gen.block_size_concentration, "Dirichlet concentration of block sizes")
      ->capture_default_str();
  generate->add_flag("--no-degree-correction", gen.no_degree_correction, "plain SBM (theta uniform per block)");
  generate->add_option("--seed", gen.gen.rng_seed)->capture_default_str();
  generate->add_option("--stages", gen.stages, "also emit this many streaming stage files");
  generate->add_option("--stream-mode", gen.stream_mode, "edge-emergence | snowball")->capture_default_str();
  generate->add_option("--embed", gen.real_graph, "edge file of a real graph to embed the generated graph into");
  generate->add_option("--coupling", gen.coupling, "expected number of real/generated cross edges")
      ->capture_default_str();
  generate->add_option("-o,--output", gen.name, "output name prefix")->required();

  PartitionFlags part;
  auto* partition = app.add_subcommand("partition", "partition a graph by golden-section search over B");
  part.engine.add_to(partition);
  partition->add_option("-i,--input", part.input, "edge TSV")->required();
  partition->add_option("--truth", part.truth, "truth partition TSV for an evaluation in the report");
  partition->add_option("--mask", part.mask, "node mask TSV restricting the evaluation");
  partition->add_option("--num-nodes", part.num_nodes, "node count when trailing ids have no edges");
  partition->add_option("-o,--output", part.name, "output name prefix")->required();

  EvaluateFlags eval;
  auto* evaluate = app.add_subcommand("evaluate", "compare an output partition against the truth");
  evaluate->add_option("--truth", eval.truth)->required();
  evaluate->add_option("--partition", eval.partition)->required();
  evaluate->add_option("--mask", eval.mask, "node mask TSV (node, 0/1)");
  evaluate->add_option("-o,--output", eval.name, "output name prefix")->required();

  StreamFlags strm;
  auto* stream = app.add_subcommand("stream", "ingest <prefix>_stage_<k>.tsv files and partition after each");
  strm.engine.add_to(stream);
  stream->add_option("-i,--input", strm.prefix, "stage file prefix")->required();
  stream->add_option("--stages", strm.stages, "number of stages (default: all present)");
  stream->add_option("--truth", strm.truth);
  stream->add_option("--mask", strm.mask);
  stream->add_flag("--cold-each-stage", strm.cold_each_stage, "partition every stage from scratch");
  stream->add_option("-o,--output", strm.name, "output name prefix")->required();

  BenchFlags bench;
  auto* bench_cmd = app.add_subcommand("bench", "time partitioning on generated graphs of increasing size");
  bench.engine.add_to(bench_cmd);
  bench_cmd->add_option("--sizes", bench.sizes, "target edge counts")->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--repeats", bench.repeats, "runs per size; the median is reported")->capture_default_str();
  bench_cmd->add_option("--graph-seed", bench.graph_seed)->capture_default_str();
  bench_cmd->add_option("-o,--output", bench.name, "output name prefix")->required();

  std::string manifest_path;
  auto* replay = app.add_subcommand("replay", "re-run the command recorded in a manifest");
  replay->add_option("manifest", manifest_path)->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*replay) return cmd_replay(manifest_path);
    Manifest manifest;
    manifest.argv = args;
    int code = 0;
    std::string name;
    if (*generate) {
      manifest.command = "generate";
      name = gen.name;
      code = cmd_generate(gen, manifest);
    } else if (*partition) {
      manifest.command = "partition";
      name = part.name;
      code = cmd_partition(part, manifest);
    } else if (*evaluate) {
      manifest.command = "evaluate";
      name = eval.name;
      code = cmd_evaluate(eval, manifest);
    } else if (*stream) {
      manifest.command = "stream";
      manifest.inputs.push_back(strm.prefix);
      name = strm.name;
      code = cmd_stream(strm, manifest);
    } else {
      manifest.command = "bench";
      name = bench.name;
      code = cmd_bench(bench, manifest);
    }
    manifest.write(name);
    return code;
  } catch (const sbp::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const sbp::InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace

int main(int argc, char** argv) { return run(std::vector<std::string>(argv + 1, argv + argc)); }
