#pragma once

// Fault injection against synthetic topologies, observation synthesis,
// diagnosis campaigns and model-build benchmarks.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "netdiag/diagnosis.hpp"

namespace netdiag {

enum class FaultMode { NodeShutdown, LinkCut, CpuLoad };

std::string_view fault_mode_name(FaultMode m) noexcept;  // node-shutdown, link-cut, cpu-load
FaultMode parse_fault_mode(std::string_view name);

struct Fault {
  std::string target;  // element id
  FaultMode mode = FaultMode::NodeShutdown;
  double fraction = 0.0;  // CpuLoad only
};

struct FaultScenario {
  std::vector<Fault> faults;
  std::uint64_t seed = 0;
};

struct GroundTruth {
  std::map<std::string, State> vertex_states;
  std::map<std::string, double> cpu_loads;  // Cpu label -> utilization

  bool operator==(const GroundTruth&) const = default;
};

/// Forces the faulted vertices down and propagates along every edge; a
/// vertex is down iff it was forced or one of its parents is down. Throws
/// scenario error for unknown targets, a mode that does not fit the target
/// type, repeated targets or a load outside [0,1].
GroundTruth inject(const DependencyGraph& g, const FaultScenario& scenario);

struct Visibility {
  enum class Kind { AllNics, Sampled } kind = Kind::AllNics;
  double fraction = 1.0;
  std::uint64_t seed = 0;

  static Visibility all_nics() { return {}; }
  static Visibility sampled(double fraction, std::uint64_t seed) {
    return {Kind::Sampled, fraction, seed};
  }
};

/// NIC states (all of them, or a seeded subset) plus every recorded CPU load.
ObservationSet synthesize_observations(const GroundTruth& truth, const DependencyGraph& g,
                                       const Visibility& visibility = {});

/// Alarm a monitoring system would raise for the truth: a degradation on the
/// first host pair (in element order) whose service depends on a down
/// vertex, else an infrastructure failure if a controller or control-link
/// vertex is down, else none.
std::optional<ServiceAlarm> alarm_for(const BayesianNetwork& bn, const Topology& topology,
                                      const GroundTruth& truth);

/// CPU utilizations for every node: `fixed` entries by element id, the rest
/// drawn uniformly from [low, high] with the given seed.
ObservationSet cpu_load_observations(const DependencyGraph& g,
                                     const std::map<std::string, double>& fixed,
                                     std::uint64_t seed, double low = 0.05, double high = 0.95);

/// Hit iff the fault set equals the top tie group of the report.
bool is_hit(const RootCauseReport& report, const std::vector<std::string>& faulted);

/// Deterministic integer in [0, bound) from a 64-bit generator state.
std::uint64_t uniform_below(std::uint64_t& state, std::uint64_t bound);
double uniform_unit(std::uint64_t& state);
std::uint64_t splitmix64(std::uint64_t x) noexcept;

struct CampaignConfig {
  std::vector<TopologyKind> shapes{TopologyKind::linear()};
  std::vector<ControlMode> control_modes{ControlMode::OutOfBand};
  std::vector<int> n_hosts{4};
  std::vector<FaultMode> fault_modes{FaultMode::NodeShutdown, FaultMode::LinkCut};
  int trials_per_cell = 10;
  std::uint64_t seed = 1;
  Visibility visibility;
  std::size_t top_k = 3;
  unsigned threads = 0;  // 0 picks the hardware concurrency
  bool record_timing = false;

  /// {"shapes": ["linear", ...], "control_modes": [...], "n_hosts": [...],
  ///  "fault_modes": [...], "trials_per_cell": n, "seed": s,
  ///  "visibility": {"kind": "all-nics"|"sampled", "fraction": f}, "top_k": k}
  static CampaignConfig from_json(std::string_view document);
};

struct TrialRecord {
  std::size_t cell = 0;
  int trial = 0;
  Fault fault;
  std::string alarm;  // alarm kind name, or "none"
  bool hit = false;
  bool topk_hit = false;
  std::string rank1;
  std::string error;  // empty unless the trial aborted
};

struct CellStats {
  TopologyKind kind;
  ControlMode control_mode = ControlMode::OutOfBand;
  int n_hosts = 0;
  bool control_mode_detected = false;
  std::size_t trials = 0, hits = 0, topk_hits = 0, errors = 0;
};

struct CampaignReport {
  std::size_t trials = 0, hits = 0, topk_hits = 0, errors = 0;
  std::size_t top_k = 3;
  std::optional<double> top1_accuracy;  // empty when there were no trials
  std::optional<double> topk_accuracy;
  std::vector<CellStats> breakdown;
  std::vector<TrialRecord> log;
  std::optional<double> elapsed_ms;  // only with record_timing
};

CampaignReport run_campaign(const CampaignConfig& config);
std::string campaign_report_to_json(const CampaignReport& report);

struct BenchConfig {
  std::vector<Shape> kinds{Shape::Linear, Shape::Tree};
  int min_elements = 15;
  int max_elements = 500;
  int repetitions = 20;
  TemplateProfile profile;

  /// {"kinds": ["linear", "tree"], "min_elements": 15, "max_elements": 500,
  ///  "repetitions": 20, "profile": "table-compat"}
  static BenchConfig from_json(std::string_view document);
};

struct BenchRow {
  Shape kind = Shape::Linear;
  int n_hosts = 0, n_switches = 0, n_elements = 0;
  std::size_t vertices = 0;
  int repetitions = 0;
  double mean_ms = 0.0, min_ms = 0.0, max_ms = 0.0;
};

/// (shape, n_hosts) pairs whose element totals fall in [min, max]. Linear
/// networks have 5 elements per host and are sampled at 8 roughly even
/// points; trees use every power-of-two host count.
std::vector<std::pair<Shape, int>> bench_sizes(const BenchConfig& config);

/// Times build_model serially; rows sorted by (kind, n_elements).
std::vector<BenchRow> benchmark_build(const BenchConfig& config);
std::string bench_to_csv(const std::vector<BenchRow>& rows);

}  // namespace netdiag
