#include "netdiag/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <deque>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "netdiag/error.hpp"

namespace netdiag {

std::string_view fault_mode_name(FaultMode m) noexcept {
  switch (m) {
    case FaultMode::NodeShutdown: return "node-shutdown";
    case FaultMode::LinkCut: return "link-cut";
    case FaultMode::CpuLoad: return "cpu-load";
  }
  return "?";
}

FaultMode parse_fault_mode(std::string_view name) {
  if (name == "node-shutdown" || name == "NodeShutdown") return FaultMode::NodeShutdown;
  if (name == "link-cut" || name == "LinkCut") return FaultMode::LinkCut;
  if (name == "cpu-load" || name == "CpuLoad") return FaultMode::CpuLoad;
  fail(Errc::config, "unknown fault mode '" + std::string(name) + "'");
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// std::uniform_*_distribution differ between standard libraries, so draws
// are made directly from the engine output.
std::uint64_t uniform_below(std::uint64_t& state, std::uint64_t bound) {
  if (bound == 0) fail(Errc::domain, "uniform_below needs a positive bound");
  std::mt19937_64 engine(state);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = engine();
  } while (x >= limit);
  state = engine();
  return x % bound;
}

double uniform_unit(std::uint64_t& state) {
  std::mt19937_64 engine(state);
  const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
  state = engine();
  return u;
}

GroundTruth inject(const DependencyGraph& g, const FaultScenario& scenario) {
  GroundTruth truth;
  std::vector<char> down(g.size(), 0);
  std::set<std::string> seen;
  std::deque<std::size_t> queue;
  for (const auto& f : scenario.faults) {
    if (!seen.insert(f.target).second) fail(Errc::scenario, "more than one fault on '" + f.target + "'");
    const auto owned = g.owned_by(f.target);
    if (owned.empty()) fail(Errc::scenario, "fault target '" + f.target + "' is not in the model");
    const auto type = g.vertex(owned.front()).owner_type;
    if ((f.mode == FaultMode::LinkCut) != is_link(type)) {
      fail(Errc::scenario, std::string(fault_mode_name(f.mode)) + " does not apply to '" + f.target + "'");
    }
    switch (f.mode) {
      case FaultMode::NodeShutdown:
      case FaultMode::LinkCut:
        for (auto v : owned) queue.push_back(v);
        break;
      case FaultMode::CpuLoad: {
        if (!(f.fraction >= 0.0 && f.fraction <= 1.0)) {
          fail(Errc::scenario, "cpu load on '" + f.target + "' must lie in [0,1]");
        }
        const auto cpu = std::find_if(owned.begin(), owned.end(), [&](std::size_t v) {
          return g.vertex(v).kind == VertexKind::Cpu;
        });
        if (cpu == owned.end()) fail(Errc::scenario, "'" + f.target + "' has no CPU vertex");
        truth.cpu_loads[g.vertex(*cpu).label] = f.fraction;
        break;
      }
    }
  }
  while (!queue.empty()) {
    const auto v = queue.front();
    queue.pop_front();
    if (down[v]) continue;
    down[v] = 1;
    for (auto c : g.children(v)) queue.push_back(c);
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    truth.vertex_states[g.vertex(i).label] = down[i] ? State::Down : State::Up;
  }
  return truth;
}

ObservationSet synthesize_observations(const GroundTruth& truth, const DependencyGraph& g,
                                       const Visibility& visibility) {
  ObservationSet obs;
  std::uint64_t state = splitmix64(visibility.seed);
  for (const auto& v : g.vertices()) {
    if (v.kind != VertexKind::NetworkCard) continue;
    if (visibility.kind == Visibility::Kind::Sampled && !(uniform_unit(state) < visibility.fraction)) {
      continue;
    }
    auto it = truth.vertex_states.find(v.label);
    obs.nic_states[v.label] = it == truth.vertex_states.end() ? State::Up : it->second;
  }
  obs.cpu_utilization = truth.cpu_loads;
  return obs;
}

std::optional<ServiceAlarm> alarm_for(const BayesianNetwork& bn, const Topology& topology,
                                      const GroundTruth& truth) {
  const auto is_down = [&](const std::string& label) {
    auto it = truth.vertex_states.find(label);
    return it != truth.vertex_states.end() && it->second == State::Down;
  };
  std::vector<std::string> hosts;
  for (const auto& e : topology.network.elements) {
    if (e.type == ElementType::Host) hosts.push_back(e.element_id);
  }
  for (std::size_t i = 0; i < hosts.size(); ++i) {
    for (std::size_t j = i + 1; j < hosts.size(); ++j) {
      ServiceAlarm alarm{AlarmKind::ServiceDegradation, std::make_pair(hosts[i], hosts[j]), 0};
      const auto parents = service_parents(bn, alarm, topology);
      if (std::any_of(parents.begin(), parents.end(), is_down)) return alarm;
    }
  }
  ServiceAlarm infra{AlarmKind::InfrastructureFailure, std::nullopt, 0};
  const auto parents = service_parents(bn, infra, topology);
  if (std::any_of(parents.begin(), parents.end(), is_down)) return infra;
  for (const auto& e : topology.network.elements) {
    if (e.type != ElementType::Controller) continue;
    const auto* g = bn.graph().get();
    if (!g) break;
    for (auto v : g->owned_by(e.element_id)) {
      if (is_down(g->vertex(v).label)) return infra;
    }
  }
  return std::nullopt;
}

ObservationSet cpu_load_observations(const DependencyGraph& g,
                                     const std::map<std::string, double>& fixed,
                                     std::uint64_t seed, double low, double high) {
  ObservationSet obs;
  std::uint64_t state = splitmix64(seed);
  for (const auto& v : g.vertices()) {
    if (v.kind != VertexKind::Cpu) continue;
    const double draw = low + (high - low) * uniform_unit(state);
    auto it = fixed.find(v.owner);
    obs.cpu_utilization[v.label] = it != fixed.end() ? it->second : draw;
  }
  return obs;
}

bool is_hit(const RootCauseReport& report, const std::vector<std::string>& faulted) {
  auto group = top_group(report);
  auto want = faulted;
  std::sort(group.begin(), group.end());
  std::sort(want.begin(), want.end());
  return !want.empty() && group == want;
}

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

json parse_config(std::string_view document, const char* what) {
  try {
    return json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    fail(Errc::parse, std::string("malformed ") + what + " at byte " + std::to_string(e.byte));
  }
}

TopologyKind kind_from_name(const std::string& name) {
  switch (parse_shape(name)) {
    case Shape::Linear: return TopologyKind::linear();
    case Shape::Ring: return TopologyKind::ring();
    case Shape::Star: return TopologyKind::star();
    case Shape::Tree: return {Shape::Tree, 2, 1};
  }
  return TopologyKind::linear();
}

// Tree cells are sized from the host count; the other shapes take it directly.
Topology cell_topology(const TopologyKind& kind, int n_hosts, ControlMode mode) {
  if (kind.shape == Shape::Tree) {
    return generate_topology(TopologyKind::tree_for_hosts(n_hosts, kind.fanout), n_hosts, mode);
  }
  return generate_topology(kind, n_hosts, mode);
}

struct Cell {
  TopologyKind kind;
  ControlMode mode;
  int n_hosts;
};

struct CellModel {
  Topology topology;
  BayesianNetwork bn;
  std::vector<std::string> nodes, links;
  std::string error;
};

}  // namespace

CampaignConfig CampaignConfig::from_json(std::string_view document) {
  const auto doc = parse_config(document, "campaign config");
  CampaignConfig c;
  try {
    if (doc.contains("shapes")) {
      c.shapes.clear();
      for (const auto& s : doc.at("shapes")) c.shapes.push_back(kind_from_name(s.get<std::string>()));
    }
    if (doc.contains("tree_fanout")) {
      for (auto& k : c.shapes) {
        if (k.shape == Shape::Tree) k.fanout = doc.at("tree_fanout").get<int>();
      }
    }
    if (doc.contains("control_modes")) {
      c.control_modes.clear();
      for (const auto& m : doc.at("control_modes")) {
        c.control_modes.push_back(parse_control_mode(m.get<std::string>()));
      }
    }
    if (doc.contains("n_hosts")) c.n_hosts = doc.at("n_hosts").get<std::vector<int>>();
    if (doc.contains("fault_modes")) {
      c.fault_modes.clear();
      for (const auto& m : doc.at("fault_modes")) c.fault_modes.push_back(parse_fault_mode(m.get<std::string>()));
    }
    if (doc.contains("trials_per_cell")) c.trials_per_cell = doc.at("trials_per_cell").get<int>();
    if (doc.contains("seed")) c.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("top_k")) c.top_k = doc.at("top_k").get<std::size_t>();
    if (doc.contains("threads")) c.threads = doc.at("threads").get<unsigned>();
    if (doc.contains("visibility")) {
      const auto& v = doc.at("visibility");
      const auto kind = v.at("kind").get<std::string>();
      if (kind == "all-nics") {
        c.visibility = Visibility::all_nics();
      } else if (kind == "sampled") {
        c.visibility = Visibility::sampled(v.value("fraction", 1.0), v.value("seed", c.seed));
      } else {
        fail(Errc::config, "unknown visibility kind '" + kind + "'");
      }
    }
  } catch (const json::exception& e) {
    fail(Errc::config, std::string("invalid campaign config: ") + e.what());
  }
  if (c.trials_per_cell < 0) fail(Errc::config, "trials_per_cell must be non-negative");
  if (c.top_k == 0) fail(Errc::config, "top_k must be positive");
  for (auto m : c.fault_modes) {
    if (m == FaultMode::CpuLoad) fail(Errc::config, "campaigns inject node-shutdown and link-cut faults only");
  }
  return c;
}

CampaignReport run_campaign(const CampaignConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  std::vector<Cell> cells;
  for (const auto& kind : config.shapes) {
    for (auto mode : config.control_modes) {
      for (int n : config.n_hosts) cells.push_back({kind, mode, n});
    }
  }

  CampaignReport report;
  report.top_k = config.top_k;
  std::vector<CellModel> models(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    CellStats stats{cells[c].kind, cells[c].mode, cells[c].n_hosts};
    auto& m = models[c];
    try {
      m.topology = cell_topology(cells[c].kind, cells[c].n_hosts, cells[c].mode);
      stats.control_mode_detected = m.topology.network.control_mode == cells[c].mode;
      m.bn = attach_parameters(build_model(m.topology, TemplateProfile::degree_adaptive()),
                               PriorConfig::defaults());
      for (const auto& e : m.topology.network.elements) {
        (is_link(e.type) ? m.links : m.nodes).push_back(e.element_id);
      }
    } catch (const Error& e) {
      m.error = e.what();
    }
    report.breakdown.push_back(stats);
  }

  const std::size_t per_cell = static_cast<std::size_t>(std::max(config.trials_per_cell, 0));
  const std::size_t total = cells.size() * per_cell;
  std::vector<TrialRecord> log(total);

  const auto run_trial = [&](std::size_t index) {
    auto& rec = log[index];
    rec.cell = index / per_cell;
    rec.trial = static_cast<int>(index % per_cell);
    rec.alarm = "none";
    const auto& m = models[rec.cell];
    if (!m.error.empty()) {
      rec.error = m.error;
      return;
    }
    std::uint64_t state = splitmix64(config.seed ^ splitmix64(index));
    try {
      if (config.fault_modes.empty()) fail(Errc::config, "no fault modes configured");
      rec.fault.mode = config.fault_modes[uniform_below(state, config.fault_modes.size())];
      const auto& pool = rec.fault.mode == FaultMode::LinkCut ? m.links : m.nodes;
      if (pool.empty()) fail(Errc::scenario, "no element can take this fault");
      rec.fault.target = pool[uniform_below(state, pool.size())];
      const auto& g = *m.bn.graph();
      const auto truth = inject(g, {{rec.fault}, state});
      auto vis = config.visibility;
      vis.seed = splitmix64(vis.seed ^ state);
      const auto obs = synthesize_observations(truth, g, vis);
      const auto alarm = alarm_for(m.bn, m.topology, truth);
      if (alarm) rec.alarm = alarm_kind_name(alarm->kind);
      const auto result = diagnose(m.bn, alarm, obs, {});
      if (!result.element_ranking.empty()) rec.rank1 = result.element_ranking.front().element_id;
      rec.hit = is_hit(result, {rec.fault.target});
      for (std::size_t k = 0; k < result.element_ranking.size() && k < config.top_k; ++k) {
        if (result.element_ranking[k].element_id == rec.fault.target) rec.topk_hit = true;
      }
    } catch (const Error& e) {
      rec.error = e.what();
    }
  };

  unsigned workers = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(total, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < total; ++i) run_trial(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < total;) run_trial(i);
      });
    }
    for (auto& t : pool) t.join();
  }

  for (const auto& rec : log) {
    auto& cell = report.breakdown[rec.cell];
    ++cell.trials;
    ++report.trials;
    if (!rec.error.empty()) {
      ++cell.errors;
      ++report.errors;
    }
    if (rec.hit) ++cell.hits, ++report.hits;
    if (rec.topk_hit) ++cell.topk_hits, ++report.topk_hits;
  }
  if (report.trials > 0) {
    report.top1_accuracy = static_cast<double>(report.hits) / static_cast<double>(report.trials);
    report.topk_accuracy = static_cast<double>(report.topk_hits) / static_cast<double>(report.trials);
  }
  report.log = std::move(log);
  if (config.record_timing) {
    report.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  }
  return report;
}

std::string campaign_report_to_json(const CampaignReport& report) {
  ojson doc;
  doc["trials"] = report.trials;
  doc["hits"] = report.hits;
  doc["errors"] = report.errors;
  doc["top_k"] = report.top_k;
  doc["top1_accuracy"] = report.top1_accuracy ? ojson(*report.top1_accuracy) : ojson(nullptr);
  doc["topk_accuracy"] = report.topk_accuracy ? ojson(*report.topk_accuracy) : ojson(nullptr);
  auto& cells = doc["breakdown"] = ojson::array();
  for (const auto& c : report.breakdown) {
    ojson cell;
    cell["shape"] = shape_name(c.kind.shape);
    if (c.kind.shape == Shape::Tree) cell["fanout"] = c.kind.fanout;
    cell["control_mode"] = control_mode_name(c.control_mode);
    cell["n_hosts"] = c.n_hosts;
    cell["control_mode_detected"] = c.control_mode_detected;
    cell["trials"] = c.trials;
    cell["hits"] = c.hits;
    cell["topk_hits"] = c.topk_hits;
    cell["errors"] = c.errors;
    cells.push_back(std::move(cell));
  }
  auto& log = doc["trial_log"] = ojson::array();
  for (const auto& r : report.log) {
    ojson t;
    t["cell"] = r.cell;
    t["trial"] = r.trial;
    t["fault"] = fault_mode_name(r.fault.mode);
    t["target"] = r.fault.target;
    t["alarm"] = r.alarm;
    t["rank1"] = r.rank1;
    t["hit"] = r.hit;
    t["topk_hit"] = r.topk_hit;
    if (!r.error.empty()) t["error"] = r.error;
    log.push_back(std::move(t));
  }
  if (report.elapsed_ms) doc["elapsed_ms"] = *report.elapsed_ms;
  return doc.dump(2) + "\n";
}

BenchConfig BenchConfig::from_json(std::string_view document) {
  const auto doc = parse_config(document, "bench config");
  BenchConfig c;
  try {
    if (doc.contains("kinds")) {
      c.kinds.clear();
      for (const auto& k : doc.at("kinds")) c.kinds.push_back(parse_shape(k.get<std::string>()));
    }
    if (doc.contains("min_elements")) c.min_elements = doc.at("min_elements").get<int>();
    if (doc.contains("max_elements")) c.max_elements = doc.at("max_elements").get<int>();
    if (doc.contains("repetitions")) c.repetitions = doc.at("repetitions").get<int>();
    if (doc.contains("profile")) c.profile.mode = parse_profile(doc.at("profile").get<std::string>());
  } catch (const json::exception& e) {
    fail(Errc::config, std::string("invalid bench config: ") + e.what());
  }
  if (c.repetitions < 1) fail(Errc::config, "repetitions must be at least 1");
  if (c.min_elements > c.max_elements) fail(Errc::config, "min_elements exceeds max_elements");
  return c;
}

std::vector<std::pair<Shape, int>> bench_sizes(const BenchConfig& config) {
  std::vector<std::pair<Shape, int>> out;
  for (auto kind : config.kinds) {
    if (kind == Shape::Linear) {
      const int lo = std::max(2, (config.min_elements + 4) / 5);
      const int hi = config.max_elements / 5;
      if (hi < lo) continue;
      std::set<int> hosts;
      for (int i = 0; i < 8; ++i) hosts.insert(lo + (hi - lo) * i / 7);
      for (int n : hosts) out.emplace_back(kind, n);
    } else if (kind == Shape::Tree) {
      for (int n = 2; 5 * n - 3 <= config.max_elements; n *= 2) {
        if (5 * n - 3 >= config.min_elements) out.emplace_back(kind, n);
      }
    } else {
      fail(Errc::config, "benchmarks cover linear and tree topologies only");
    }
  }
  return out;
}

std::vector<BenchRow> benchmark_build(const BenchConfig& config) {
  using clock = std::chrono::steady_clock;
  std::vector<BenchRow> rows;
  for (auto [shape, n] : bench_sizes(config)) {
    const auto topology = shape == Shape::Tree
                              ? generate_topology(TopologyKind::tree_for_hosts(n), n, ControlMode::OutOfBand)
                              : generate_topology(TopologyKind::linear(), n, ControlMode::OutOfBand);
    BenchRow row;
    row.kind = shape;
    row.n_hosts = n;
    row.n_switches = static_cast<int>(topology.network.count(ElementType::MasterSwitch) +
                                      topology.network.count(ElementType::SlaveSwitch));
    row.n_elements = static_cast<int>(topology.network.elements.size());
    row.repetitions = config.repetitions;
    double sum = 0.0;
    for (int r = 0; r < config.repetitions; ++r) {
      const auto t0 = clock::now();
      const auto g = build_model(topology, config.profile);
      const double ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
      row.vertices = g.size();
      sum += ms;
      row.min_ms = r == 0 ? ms : std::min(row.min_ms, ms);
      row.max_ms = r == 0 ? ms : std::max(row.max_ms, ms);
    }
    row.mean_ms = sum / config.repetitions;
    rows.push_back(row);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
    return a.kind != b.kind ? a.kind < b.kind : a.n_elements < b.n_elements;
  });
  return rows;
}

std::string bench_to_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream os;
  os << "kind,n_hosts,n_switches,n_elements,vertices,repetitions,mean_ms,min_ms,max_ms\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.4f,%.4f,%.4f", r.mean_ms, r.min_ms, r.max_ms);
    os << shape_name(r.kind) << ',' << r.n_hosts << ',' << r.n_switches << ',' << r.n_elements << ','
       << r.vertices << ',' << r.repetitions << ',' << buf << '\n';
  }
  return os.str();
}

}  // namespace netdiag
