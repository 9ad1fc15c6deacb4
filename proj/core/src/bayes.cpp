#include "netdiag/bayes.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "netdiag/error.hpp"

namespace netdiag {

std::string_view state_name(State s) noexcept { return s == State::Up ? "up" : "down"; }

State parse_state(std::string_view name) {
  if (name == "up") return State::Up;
  if (name == "down") return State::Down;
  fail(Errc::parse, "state must be \"up\" or \"down\", got '" + std::string(name) + "'");
}

namespace {

void check_probability(double p, const std::string& what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    fail(Errc::config, what + " must lie in [0,1], got " + std::to_string(p));
  }
}

}  // namespace

double cpt_probability(const NoisyOrCpt& cpt, std::span<const State> parent_states) {
  if (parent_states.size() != cpt.inhibition.size()) {
    fail(Errc::arity, "CPT has " + std::to_string(cpt.inhibition.size()) + " parents, got " +
                          std::to_string(parent_states.size()) + " states");
  }
  double up = 1.0 - cpt.leak;
  for (std::size_t i = 0; i < parent_states.size(); ++i) {
    if (parent_states[i] == State::Down) up *= cpt.inhibition[i];
  }
  return 1.0 - up;
}

PriorConfig PriorConfig::defaults() {
  PriorConfig p;
  p.by_kind = {
      {VertexKind::LinkState, 0.01}, {VertexKind::NetworkCard, 0.005},
      {VertexKind::Cpu, 0.01},       {VertexKind::VnfProcess, 0.01},
      {VertexKind::VnfConfig, 0.01}, {VertexKind::VnfActive, 0.001},
  };
  return p;
}

PriorConfig PriorConfig::from_json(std::string_view document) {
  using json = nlohmann::json;
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    fail(Errc::parse, "malformed prior config at byte " + std::to_string(e.byte));
  }
  auto priors = defaults();
  const auto read = [](const json& v, const std::string& key) {
    if (!v.is_number()) fail(Errc::config, "leak for '" + key + "' must be a number");
    const double p = v.get<double>();
    check_probability(p, "leak for '" + key + "'");
    return p;
  };
  if (doc.contains("kinds")) {
    for (const auto& [key, v] : doc.at("kinds").items()) priors.by_kind[parse_kind(key)] = read(v, key);
  }
  if (doc.contains("labels")) {
    for (const auto& [key, v] : doc.at("labels").items()) priors.by_label[key] = read(v, key);
  }
  return priors;
}

std::optional<std::size_t> BayesianNetwork::find(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t BayesianNetwork::index_of(std::string_view label) const {
  if (auto i = find(label)) return *i;
  fail(Errc::mapping, "no vertex labelled '" + std::string(label) + "'");
}

std::size_t BayesianNetwork::add_vertex(BnVertex v) {
  if (v.cpt.inhibition.size() != v.parents.size()) {
    fail(Errc::arity, "vertex '" + v.label + "' has " + std::to_string(v.parents.size()) +
                          " parents but " + std::to_string(v.cpt.inhibition.size()) +
                          " inhibitions");
  }
  check_probability(v.cpt.leak, "leak of '" + v.label + "'");
  for (double q : v.cpt.inhibition) check_probability(q, "inhibition of '" + v.label + "'");
  for (auto p : v.parents) {
    if (p >= vertices_.size()) fail(Errc::referential, "parent of '" + v.label + "' does not exist");
  }
  const std::size_t idx = vertices_.size();
  if (!index_.emplace(v.label, idx).second) {
    fail(Errc::label_collision, "vertex label '" + v.label + "' appears twice");
  }
  vertices_.push_back(std::move(v));
  return idx;
}

std::size_t BayesianNetwork::expose_leak(std::size_t v) {
  const auto leak = vertices_.at(v).cpt.leak;
  const auto root = add_vertex({vertices_.at(v).label + "#leak", {}, {leak, {}}, std::nullopt,
                                vertices_.at(v).owner});
  auto& target = vertices_[v];
  target.cpt.leak = 0.0;
  target.parents.push_back(root);
  target.cpt.inhibition.push_back(0.0);
  return root;
}

BayesianNetwork attach_parameters(const DependencyGraph& input, const PriorConfig& priors) {
  auto g = std::make_shared<const DependencyGraph>(input.sorted() ? input : topological_sort(input));
  for (const auto& [label, leak] : priors.by_label) {
    if (!g->find(label)) fail(Errc::config, "prior override for unknown vertex '" + label + "'");
    check_probability(leak, "leak for '" + label + "'");
  }
  std::vector<std::vector<std::size_t>> parents(g->size());
  for (const auto& e : g->edges()) parents[e.to].push_back(e.from);

  const auto fallback = PriorConfig::defaults();
  BayesianNetwork bn;
  for (std::size_t i = 0; i < g->size(); ++i) {
    const auto& v = g->vertex(i);
    double leak = 0.0;
    if (auto it = priors.by_label.find(v.label); it != priors.by_label.end()) {
      leak = it->second;
    } else if (auto k = priors.by_kind.find(v.kind); k != priors.by_kind.end()) {
      leak = k->second;
    } else {
      leak = fallback.by_kind.at(v.kind);
    }
    // Sorted graph: every parent index is below i, so add_vertex accepts it.
    std::sort(parents[i].begin(), parents[i].end());
    NoisyOrCpt cpt{leak, std::vector<double>(parents[i].size(), 0.0)};
    bn.add_vertex({v.label, std::move(parents[i]), std::move(cpt), v.kind, v.owner});
  }
  bn.set_graph(std::move(g));
  return bn;
}

Evidence& Evidence::set_hard(const std::string& label, State state) {
  if (soft_.contains(label)) fail(Errc::config, "'" + label + "' already has soft evidence");
  auto [it, inserted] = hard_.emplace(label, state);
  if (!inserted && it->second != state) {
    fail(Errc::config, "'" + label + "' observed both up and down");
  }
  return *this;
}

Evidence& Evidence::set_soft(const std::string& label, Likelihood likelihood) {
  if (hard_.contains(label)) fail(Errc::config, "'" + label + "' already has hard evidence");
  check_probability(likelihood.up, "likelihood(up) of '" + label + "'");
  check_probability(likelihood.down, "likelihood(down) of '" + label + "'");
  if (likelihood.up == 0.0 && likelihood.down == 0.0) {
    fail(Errc::config, "likelihood of '" + label + "' is zero for both states");
  }
  soft_[label] = likelihood;
  return *this;
}

Marginals enumerate_joint(const BayesianNetwork& bn, const Evidence& evidence,
                          const std::vector<std::string>& queries, std::size_t cap) {
  const std::size_t n = bn.size();
  if (n > cap) {
    fail(Errc::size, "enumeration over " + std::to_string(n) + " vertices exceeds the cap of " +
                         std::to_string(cap));
  }
  std::vector<int> fixed(n, -1);
  std::vector<Likelihood> weight(n);
  for (const auto& [label, s] : evidence.hard()) fixed[bn.index_of(label)] = static_cast<int>(s);
  for (const auto& [label, l] : evidence.soft()) weight[bn.index_of(label)] = l;
  std::vector<std::size_t> query_idx;
  for (const auto& q : queries) query_idx.push_back(bn.index_of(q));

  double z = 0.0;
  std::vector<double> down(query_idx.size(), 0.0);
  std::vector<State> states(n);
  std::vector<State> parent_states;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    bool consistent = true;
    for (std::size_t i = 0; i < n; ++i) {
      states[i] = (mask >> i) & 1 ? State::Down : State::Up;
      if (fixed[i] >= 0 && fixed[i] != static_cast<int>(states[i])) consistent = false;
    }
    if (!consistent) continue;
    double p = 1.0;
    for (std::size_t i = 0; i < n && p > 0.0; ++i) {
      const auto& v = bn.vertex(i);
      parent_states.clear();
      for (auto par : v.parents) parent_states.push_back(states[par]);
      const double pd = cpt_probability(v.cpt, parent_states);
      p *= states[i] == State::Down ? pd : 1.0 - pd;
      p *= states[i] == State::Down ? weight[i].down : weight[i].up;
    }
    z += p;
    for (std::size_t q = 0; q < query_idx.size(); ++q) {
      if (states[query_idx[q]] == State::Down) down[q] += p;
    }
  }
  if (!(z > 0.0)) fail(Errc::contradiction, "evidence has zero probability under the model");
  Marginals out;
  for (std::size_t q = 0; q < queries.size(); ++q) out[queries[q]] = down[q] / z;
  return out;
}

double posterior_disjunction(const BayesianNetwork& bn, const Evidence& evidence,
                             const std::vector<std::string>& vertex_set) {
  if (vertex_set.empty()) fail(Errc::config, "disjunction over an empty vertex set");
  BayesianNetwork augmented = bn;
  BnVertex query{"__any_down__", {}, {}, std::nullopt, {}};
  for (const auto& label : vertex_set) query.parents.push_back(bn.index_of(label));
  query.cpt.inhibition.assign(query.parents.size(), 0.0);
  augmented.add_vertex(query);
  return eliminate_variables(augmented, evidence, {"__any_down__"}).at("__any_down__");
}

Marginals origin_posteriors(const BayesianNetwork& bn, const Evidence& evidence,
                            const std::vector<std::string>& labels) {
  BayesianNetwork exposed = bn;
  std::vector<std::string> queries;
  for (const auto& label : labels) {
    queries.push_back(exposed.vertex(exposed.expose_leak(bn.index_of(label))).label);
  }
  const auto m = eliminate_variables(exposed, evidence, queries);
  Marginals out;
  for (std::size_t i = 0; i < labels.size(); ++i) out[labels[i]] = m.at(queries[i]);
  return out;
}

}  // namespace netdiag
