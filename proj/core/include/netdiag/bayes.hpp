#pragma once

// Noisy-OR Bayesian network over a dependency graph, with exact inference by
// variable elimination and a brute-force enumeration oracle.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "netdiag/graph.hpp"

namespace netdiag {

enum class State : std::uint8_t { Up = 0, Down = 1 };

std::string_view state_name(State s) noexcept;
State parse_state(std::string_view name);

/// P(down | parents) = 1 - (1 - leak) * prod over down parents of inhibition[i].
struct NoisyOrCpt {
  double leak = 0.0;
  std::vector<double> inhibition;

  bool operator==(const NoisyOrCpt&) const = default;
};

double cpt_probability(const NoisyOrCpt& cpt, std::span<const State> parent_states);

/// Leak values per vertex kind, with optional per-label overrides.
struct PriorConfig {
  std::map<VertexKind, double> by_kind;
  std::map<std::string, double> by_label;

  /// LinkState 0.01, NetworkCard 0.005, Cpu 0.01, VnfProcess 0.01,
  /// VnfConfig 0.01, VnfActive 0.001.
  static PriorConfig defaults();
  /// {"kinds": {"Cpu": 0.01, ...}, "labels": {"C_1.CPU_1": 0.5}}; unspecified
  /// kinds keep their defaults.
  static PriorConfig from_json(std::string_view document);
};

struct BnVertex {
  std::string label;
  std::vector<std::size_t> parents;
  NoisyOrCpt cpt;
  std::optional<VertexKind> kind;  // empty for vertices added on top of the graph
  std::string owner;
};

class BayesianNetwork {
 public:
  BayesianNetwork() = default;

  std::size_t size() const noexcept { return vertices_.size(); }
  const BnVertex& vertex(std::size_t i) const { return vertices_.at(i); }
  const std::vector<BnVertex>& vertices() const noexcept { return vertices_; }
  std::optional<std::size_t> find(std::string_view label) const;
  std::size_t index_of(std::string_view label) const;  // throws mapping error

  /// The graph this network was parameterized from; null for hand-built networks.
  const std::shared_ptr<const DependencyGraph>& graph() const noexcept { return graph_; }

  /// Appends a vertex; parents must already exist. Returns its index.
  std::size_t add_vertex(BnVertex v);

  /// Splits a vertex's leak into its own root vertex "<label>#leak" and makes
  /// the vertex a deterministic function of its parents and that root.
  std::size_t expose_leak(std::size_t v);

  void set_graph(std::shared_ptr<const DependencyGraph> g) { graph_ = std::move(g); }

 private:
  std::vector<BnVertex> vertices_;
  std::unordered_map<std::string, std::size_t> index_;
  std::shared_ptr<const DependencyGraph> graph_;
};

BayesianNetwork attach_parameters(const DependencyGraph& g, const PriorConfig& priors);

struct Likelihood {
  double up = 1.0;
  double down = 1.0;

  bool operator==(const Likelihood&) const = default;
};

class Evidence {
 public:
  /// Throws config error if the label already carries different or soft evidence.
  Evidence& set_hard(const std::string& label, State state);
  /// Throws config error on hard/soft overlap or an invalid likelihood pair.
  Evidence& set_soft(const std::string& label, Likelihood likelihood);

  const std::map<std::string, State>& hard() const noexcept { return hard_; }
  const std::map<std::string, Likelihood>& soft() const noexcept { return soft_; }
  bool observed(const std::string& label) const { return hard_.contains(label); }

  bool operator==(const Evidence&) const = default;

 private:
  std::map<std::string, State> hard_;
  std::map<std::string, Likelihood> soft_;
};

/// vertex label -> P(down | evidence)
using Marginals = std::map<std::string, double>;

constexpr std::size_t kDefaultEnumerationCap = 20;

/// Sums the full joint; throws size error above `cap` vertices.
Marginals enumerate_joint(const BayesianNetwork& bn, const Evidence& evidence,
                          const std::vector<std::string>& queries,
                          std::size_t cap = kDefaultEnumerationCap);

/// Exact marginals. Builds a min-fill elimination order over the evidence-
/// and query-relevant part of the network, eliminates every variable, and
/// turns the elimination cliques into a tree so one backward pass yields all
/// requested marginals.
Marginals eliminate_variables(const BayesianNetwork& bn, const Evidence& evidence,
                              const std::vector<std::string>& queries);

/// log P(evidence); throws contradiction if it is zero.
double log_evidence_probability(const BayesianNetwork& bn, const Evidence& evidence);

/// P(at least one vertex of the set is down | evidence).
double posterior_disjunction(const BayesianNetwork& bn, const Evidence& evidence,
                             const std::vector<std::string>& vertex_set);

/// P(the vertex failed on its own, through its leak | evidence) per label.
Marginals origin_posteriors(const BayesianNetwork& bn, const Evidence& evidence,
                            const std::vector<std::string>& labels);

}  // namespace netdiag
