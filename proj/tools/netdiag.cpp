// netdiag: topology parsing, self-modeling, root-cause diagnosis and the
// simulation harness from the command line.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "netdiag/error.hpp"
#include "netdiag/simulator.hpp"

using namespace netdiag;

namespace {

enum Exit { kOk = 0, kUsage = 2, kInput = 3, kModel = 4, kContradiction = 5 };

std::string read_source(const std::string& path, std::chrono::milliseconds timeout = std::chrono::seconds(5)) {
  if (path.rfind("http://", 0) == 0 || path.rfind("https://", 0) == 0) {
    spdlog::debug("fetching {}", path);
    return fetch_document(path, timeout);
  }
  std::ifstream in(path == "-" ? "/dev/stdin" : path, std::ios::binary);
  if (!in) fail(Errc::io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io, "cannot write '" + path + "'");
  out << text;
}

bool looks_like_model(const std::string& doc) {
  return doc.find("\"vertices\"") != std::string::npos;
}

DependencyGraph load_model(const std::string& doc, const TemplateProfile& profile) {
  if (looks_like_model(doc)) {
    auto g = import_graph_json(doc);
    return g.sorted() ? g : topological_sort(g);
  }
  return build_model(descriptor_from_json(doc), profile);
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("netdiag");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("NETDIAG_LOG")) {
    spdlog::set_level(spdlog::level::from_str(env));
  }
}

int exit_code(const Error& e) {
  switch (error_class(e.code())) {
    case ErrorClass::input: return kInput;
    case ErrorClass::model: return kModel;
    case ErrorClass::inference: return kContradiction;
  }
  return 1;
}

const std::map<std::string, Dialect> kDialects{
    {"native", Dialect::Native}, {"floodlight", Dialect::Floodlight}, {"opendaylight", Dialect::OpenDaylight}};
const std::map<std::string, ProfileMode> kProfiles{
    {"table-compat", ProfileMode::TableCompat}, {"degree-adaptive", ProfileMode::DegreeAdaptive}};

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"SDN dependency-graph self-modeling and Bayesian root-cause diagnosis"};
  app.require_subcommand(1);
  std::string output;

  // parse
  auto* parse = app.add_subcommand("parse", "Classify a topology document into a network descriptor");
  std::string source, controller;
  Dialect dialect = Dialect::Native;
  int timeout_ms = 5000;
  std::uint64_t snapshot = 0;
  parse->add_option("source", source, "Topology file or http:// URL")->required();
  parse->add_option("--dialect", dialect, "native | floodlight | opendaylight")
      ->transform(CLI::CheckedTransformer(kDialects, CLI::ignore_case));
  parse->add_option("--controller", controller, "Controller node id (overrides the document)");
  parse->add_option("--timeout", timeout_ms, "HTTP timeout in milliseconds")->check(CLI::PositiveNumber);
  parse->add_option("--snapshot", snapshot, "Snapshot instant recorded in the descriptor");

  // model
  auto* model = app.add_subcommand("model", "Build the dependency graph for a descriptor");
  std::string model_input;
  ProfileMode profile = ProfileMode::TableCompat;
  std::string export_format = "json";
  model->add_option("input", model_input, "Descriptor JSON, or an exported model to re-sort")->required();
  model->add_option("--profile", profile, "table-compat | degree-adaptive")
      ->transform(CLI::CheckedTransformer(kProfiles, CLI::ignore_case));
  model->add_option("--export", export_format, "json | dot")->check(CLI::IsMember({"json", "dot"}));

  // diagnose
  auto* diag = app.add_subcommand("diagnose", "Rank root causes for an alarm and observations");
  std::string diag_model, evidence_path, priors_path;
  ProfileMode diag_profile = ProfileMode::DegreeAdaptive;
  DiagnosisOptions options;
  bool pretty = false;
  diag->add_option("model", diag_model, "Model JSON (or a descriptor, built with --profile)")->required();
  diag->add_option("evidence", evidence_path, "Evidence JSON")->required();
  diag->add_option("--priors", priors_path, "Prior config JSON");
  diag->add_option("--profile", diag_profile, "Profile used when the input is a descriptor")
      ->transform(CLI::CheckedTransformer(kProfiles, CLI::ignore_case));
  diag->add_option("--tie-epsilon", options.tie_epsilon, "Score gap below which elements tie")
      ->check(CLI::NonNegativeNumber);
  diag->add_option("--top-k", options.top_k, "Keep only the k best elements and vertices (0 = all)");
  diag->add_flag("--pretty", pretty, "Human-readable text instead of JSON");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run a fault-injection campaign");
  std::string campaign_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool timing = false;
  sim->add_option("config", campaign_path, "Campaign config JSON")->required();
  sim->add_option("--seed", seed, "Override the campaign seed");
  sim->add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");
  sim->add_flag("--timing", timing, "Include wall-clock time in the report");

  // bench
  auto* bench = app.add_subcommand("bench", "Time model construction, CSV output");
  std::string bench_path;
  std::optional<int> repetitions;
  bench->add_option("config", bench_path, "Bench config JSON (defaults apply when omitted)");
  bench->add_option("--repetitions", repetitions, "Repetitions per size")->check(CLI::PositiveNumber);

  // generate
  auto* gen = app.add_subcommand("generate", "Write a synthetic topology in the native dialect");
  std::string shape = "linear", mode = "out-of-band";
  int hosts = 4, fanout = 2;
  gen->add_option("--shape", shape, "linear | tree | ring | star")
      ->check(CLI::IsMember({"linear", "tree", "ring", "star"}));
  gen->add_option("--hosts", hosts, "Number of hosts")->check(CLI::PositiveNumber);
  gen->add_option("--fanout", fanout, "Tree fanout")->check(CLI::Range(2, 64));
  gen->add_option("--mode", mode, "out-of-band | in-band")->check(CLI::IsMember({"out-of-band", "in-band"}));

  for (auto* sub : {parse, model, diag, sim, bench, gen}) {
    sub->add_option("-o,--output", output, "Write the result here instead of stdout");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*parse) {
      const auto doc = read_source(source, std::chrono::milliseconds(timeout_ms));
      const auto raw = parse_dialect(doc, dialect, controller);
      const auto topology = classify(raw, snapshot);
      spdlog::info("{} elements, {}", topology.network.elements.size(),
                   control_mode_name(topology.network.control_mode));
      write_output(output, descriptor_to_json(topology));
    } else if (*model) {
      const auto g = load_model(read_source(model_input), {profile});
      spdlog::info("{} vertices, {} edges", g.size(), g.edges().size());
      write_output(output, export_graph(g, export_format == "dot" ? ExportFormat::Dot : ExportFormat::Json));
    } else if (*diag) {
      const auto g = load_model(read_source(diag_model), {diag_profile});
      const auto priors = priors_path.empty() ? PriorConfig::defaults()
                                              : PriorConfig::from_json(read_source(priors_path));
      const auto bn = attach_parameters(g, priors);
      const auto ev = evidence_file_from_json(read_source(evidence_path));
      const auto report = diagnose(bn, ev.alarm, ev.observations, options);
      write_output(output, pretty ? explain(report) : report_to_json(report));
    } else if (*sim) {
      auto config = CampaignConfig::from_json(read_source(campaign_path));
      if (seed) config.seed = *seed;
      if (threads) config.threads = *threads;
      config.record_timing = timing;
      const auto report = run_campaign(config);
      spdlog::info("{} trials, {} hits, {} errors", report.trials, report.hits, report.errors);
      write_output(output, campaign_report_to_json(report));
    } else if (*bench) {
      auto config = bench_path.empty() ? BenchConfig{} : BenchConfig::from_json(read_source(bench_path));
      if (repetitions) config.repetitions = *repetitions;
      write_output(output, bench_to_csv(benchmark_build(config)));
    } else if (*gen) {
      TopologyKind kind;
      const auto m = parse_control_mode(mode);
      switch (parse_shape(shape)) {
        case Shape::Linear: kind = TopologyKind::linear(); break;
        case Shape::Ring: kind = TopologyKind::ring(); break;
        case Shape::Star: kind = TopologyKind::star(); break;
        case Shape::Tree: kind = TopologyKind::tree_for_hosts(hosts, fanout); break;
      }
      write_output(output, raw_to_native_json(generate_raw_topology(kind, hosts, m)));
    }
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return exit_code(e);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kInput;
  }
  return kOk;
}
