#pragma once

// Root-cause ranking from a service alarm plus network observations.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "netdiag/bayes.hpp"

namespace netdiag {

enum class AlarmKind { InfrastructureFailure, ServiceDegradation };

std::string_view alarm_kind_name(AlarmKind kind) noexcept;
AlarmKind parse_alarm_kind(std::string_view name);

struct ServiceAlarm {
  AlarmKind kind = AlarmKind::InfrastructureFailure;
  std::optional<std::pair<std::string, std::string>> endpoints;  // host element ids
  std::int64_t raised_at = 0;

  bool operator==(const ServiceAlarm&) const = default;
};

inline constexpr std::string_view kServiceLabel = "SERVICE.ALARM_1";

struct ObservationSet {
  std::map<std::string, State> nic_states;
  std::map<std::string, double> cpu_utilization;

  bool operator==(const ObservationSet&) const = default;
};

/// Adds a deterministic-OR service vertex (kServiceLabel). Degradations
/// depend on the links and node activations along the fewest-hop data path
/// between the endpoints plus the controller's activation; in in-band mode
/// also on the control links and inter-switch links that carry the path's
/// switches to the controller. Infrastructure failures depend on the
/// controller's activation and every control link.
BayesianNetwork attach_service_vertex(const BayesianNetwork& bn, const ServiceAlarm& alarm,
                                      const Topology& topology);

/// Labels of the service vertex's parents, in network index order.
std::vector<std::string> service_parents(const BayesianNetwork& bn, const ServiceAlarm& alarm,
                                         const Topology& topology);

/// NIC states become hard evidence; CPU utilization u becomes soft evidence
/// (1 - u, u).
Evidence ingest_observations(const ObservationSet& obs, const BayesianNetwork& bn);

struct DiagnosisOptions {
  double tie_epsilon = 1e-6;
  std::size_t top_k = 0;  // 0 keeps every candidate
};

struct ElementScore {
  std::string element_id;
  double score = 0.0;
};

struct VertexScore {
  std::string label;
  double posterior = 0.0;
};

struct RootCauseReport {
  std::vector<ElementScore> element_ranking;
  std::vector<VertexScore> vertex_ranking;
  Evidence evidence_echo;
  /// Runs of two or more ranked elements within tie_epsilon of the run's leader.
  std::vector<std::vector<std::string>> ties;
  /// P(vertex failed on its own | evidence) for the unobserved vertices of
  /// the rank-1 element.
  std::vector<VertexScore> top_element_split;
  double tie_epsilon = 1e-6;
};

/// Elements whose scores lie within tie_epsilon of the rank-1 score.
std::vector<std::string> top_group(const RootCauseReport& report);

/// Element scores are P(any unobserved vertex of the element is down | e);
/// vertices with hard evidence never appear as candidates. Without an alarm
/// only the observations are applied.
RootCauseReport diagnose(const BayesianNetwork& bn, const std::optional<ServiceAlarm>& alarm,
                         const ObservationSet& obs, const DiagnosisOptions& options = {});

std::string explain(const RootCauseReport& report);

std::string report_to_json(const RootCauseReport& report);

struct EvidenceFile {
  std::optional<ServiceAlarm> alarm;
  ObservationSet observations;
};

/// {"alarm": {...}, "nic_states": {label: "up"|"down"}, "cpu_utilization": {label: u}}
EvidenceFile evidence_file_from_json(std::string_view document);
std::string evidence_file_to_json(const EvidenceFile& file);

}  // namespace netdiag
