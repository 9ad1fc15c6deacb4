#include "netdiag/diagnosis.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <set>
#include <sstream>

#include <json.hpp>

#include "netdiag/error.hpp"

namespace netdiag {

std::string_view alarm_kind_name(AlarmKind kind) noexcept {
  return kind == AlarmKind::InfrastructureFailure ? "infrastructure-failure" : "service-degradation";
}

AlarmKind parse_alarm_kind(std::string_view name) {
  if (name == "infrastructure-failure") return AlarmKind::InfrastructureFailure;
  if (name == "service-degradation") return AlarmKind::ServiceDegradation;
  fail(Errc::parse, "unknown alarm kind '" + std::string(name) + "'");
}

namespace {

std::string label_of(const std::string& owner, VertexKind kind) {
  return owner + "." + std::string(kind_token(kind)) + "_1";
}

const Element* controller_of(const Topology& t) {
  for (const auto& e : t.network.elements) {
    if (e.type == ElementType::Controller) return &e;
  }
  return nullptr;
}

struct Hop {
  std::string node;
  std::string link;
};

// Fewest-hop path over links accepted by `use`, neighbours visited in
// (element id, link id) order so ties resolve lexicographically.
template <typename Accept>
std::optional<std::vector<Hop>> shortest_path(const Topology& t, const std::string& src,
                                              const std::string& dst, Accept use) {
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> adj;
  for (const auto& l : t.links.entries) {
    const auto* link = t.network.find(l.link_id);
    if (!link || !use(link->type)) continue;
    adj[l.endpoint_a].emplace_back(l.endpoint_b, l.link_id);
    adj[l.endpoint_b].emplace_back(l.endpoint_a, l.link_id);
  }
  for (auto& [node, list] : adj) std::sort(list.begin(), list.end());

  std::map<std::string, Hop> came_from;
  std::deque<std::string> queue{src};
  std::set<std::string> seen{src};
  while (!queue.empty() && !seen.contains(dst)) {
    const auto u = queue.front();
    queue.pop_front();
    for (const auto& [v, link] : adj[u]) {
      if (seen.insert(v).second) {
        came_from[v] = {u, link};
        queue.push_back(v);
      }
    }
  }
  if (!seen.contains(dst)) return std::nullopt;
  std::vector<Hop> path{{dst, ""}};
  for (std::string at = dst; at != src;) {
    const auto& hop = came_from.at(at);
    path.back().link = hop.link;
    path.push_back({hop.node, ""});
    at = hop.node;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

std::vector<std::string> service_parents(const BayesianNetwork& bn, const ServiceAlarm& alarm,
                                         const Topology& topology) {
  std::set<std::string> labels;
  const auto* controller = controller_of(topology);
  if (controller) labels.insert(label_of(controller->element_id, VertexKind::VnfActive));

  const auto control_links = [&] {
    for (const auto& e : topology.network.elements) {
      if (e.type == ElementType::ControlLink) labels.insert(label_of(e.element_id, VertexKind::LinkState));
    }
  };

  if (alarm.kind == AlarmKind::InfrastructureFailure) {
    control_links();
  } else {
    if (!alarm.endpoints) fail(Errc::config, "service-degradation alarm needs endpoints");
    const auto& [src, dst] = *alarm.endpoints;
    for (const auto* id : {&src, &dst}) {
      const auto* e = topology.network.find(*id);
      if (!e || is_link(e->type) || e->type == ElementType::Controller) {
        fail(Errc::mapping, "alarm endpoint '" + *id + "' is not a host or switch");
      }
    }
    const auto path = shortest_path(topology, src, dst, [](ElementType t) {
      return t == ElementType::AccessLink || t == ElementType::InterSwitchLink;
    });
    if (!path) fail(Errc::unreachable, "no data path between '" + src + "' and '" + dst + "'");

    bool has_switch = false;
    std::vector<std::string> slaves;
    std::string master;
    for (const auto& hop : *path) {
      labels.insert(label_of(hop.node, VertexKind::VnfActive));
      if (!hop.link.empty()) labels.insert(label_of(hop.link, VertexKind::LinkState));
      const auto type = topology.network.find(hop.node)->type;
      if (is_switch(type)) has_switch = true;
      if (type == ElementType::SlaveSwitch) slaves.push_back(hop.node);
    }
    if (topology.network.control_mode == ControlMode::InBand && has_switch) {
      for (const auto& e : topology.network.elements) {
        if (e.type == ElementType::MasterSwitch) master = e.element_id;
      }
      control_links();
      for (const auto& slave : slaves) {
        const auto ctl = shortest_path(topology, master, slave, [](ElementType t) {
          return t == ElementType::InterSwitchLink;
        });
        if (!ctl) fail(Errc::unreachable, "slave '" + slave + "' cannot reach the master switch");
        for (const auto& hop : *ctl) {
          if (!hop.link.empty()) labels.insert(label_of(hop.link, VertexKind::LinkState));
        }
      }
    }
  }

  std::vector<std::pair<std::size_t, std::string>> indexed;
  for (const auto& l : labels) indexed.emplace_back(bn.index_of(l), l);
  std::sort(indexed.begin(), indexed.end());
  std::vector<std::string> out;
  for (auto& [i, l] : indexed) out.push_back(std::move(l));
  return out;
}

BayesianNetwork attach_service_vertex(const BayesianNetwork& bn, const ServiceAlarm& alarm,
                                      const Topology& topology) {
  BnVertex service{std::string(kServiceLabel), {}, {}, std::nullopt, "SERVICE"};
  for (const auto& label : service_parents(bn, alarm, topology)) {
    service.parents.push_back(bn.index_of(label));
  }
  service.cpt.inhibition.assign(service.parents.size(), 0.0);
  BayesianNetwork out = bn;
  out.add_vertex(std::move(service));
  return out;
}

Evidence ingest_observations(const ObservationSet& obs, const BayesianNetwork& bn) {
  const auto expect = [&](const std::string& label, VertexKind kind) {
    const auto& v = bn.vertex(bn.index_of(label));
    if (v.kind != kind) {
      fail(Errc::mapping, "'" + label + "' is not a " + std::string(kind_name(kind)) + " vertex");
    }
  };
  Evidence ev;
  for (const auto& [label, state] : obs.nic_states) {
    expect(label, VertexKind::NetworkCard);
    ev.set_hard(label, state);
  }
  for (const auto& [label, u] : obs.cpu_utilization) {
    expect(label, VertexKind::Cpu);
    if (!(u >= 0.0 && u <= 1.0)) {
      fail(Errc::config, "utilization of '" + label + "' must lie in [0,1]");
    }
    ev.set_soft(label, {1.0 - u, u});
  }
  return ev;
}

std::vector<std::string> top_group(const RootCauseReport& report) {
  std::vector<std::string> out;
  if (report.element_ranking.empty()) return out;
  const double lead = report.element_ranking.front().score;
  for (const auto& e : report.element_ranking) {
    if (lead - e.score >= report.tie_epsilon) break;
    out.push_back(e.element_id);
  }
  return out;
}

RootCauseReport diagnose(const BayesianNetwork& bn, const std::optional<ServiceAlarm>& alarm,
                         const ObservationSet& obs, const DiagnosisOptions& options) {
  if (!bn.graph()) fail(Errc::config, "diagnosis needs a network built from a dependency graph");
  const auto& graph = *bn.graph();

  BayesianNetwork net = alarm ? attach_service_vertex(bn, *alarm, topology_of(graph)) : bn;
  Evidence ev = ingest_observations(obs, net);
  if (alarm) ev.set_hard(std::string(kServiceLabel), State::Down);

  std::vector<std::string> owners;
  std::map<std::string, std::vector<std::string>> candidates;
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const auto& v = net.vertex(i);
    if (ev.observed(v.label)) continue;
    auto [it, inserted] = candidates.try_emplace(v.owner);
    if (inserted) owners.push_back(v.owner);
    it->second.push_back(v.label);
  }

  BayesianNetwork augmented = net;
  std::vector<std::string> queries;
  for (const auto& owner : owners) {
    BnVertex any{owner + "#any", {}, {}, std::nullopt, owner};
    for (const auto& label : candidates[owner]) {
      any.parents.push_back(net.index_of(label));
      queries.push_back(label);
    }
    any.cpt.inhibition.assign(any.parents.size(), 0.0);
    queries.push_back(any.label);
    augmented.add_vertex(std::move(any));
  }

  RootCauseReport report;
  report.tie_epsilon = options.tie_epsilon;
  report.evidence_echo = ev;
  if (owners.empty()) return report;

  const auto m = eliminate_variables(augmented, ev, queries);
  for (const auto& owner : owners) {
    report.element_ranking.push_back({owner, m.at(owner + "#any")});
    for (const auto& label : candidates[owner]) report.vertex_ranking.push_back({label, m.at(label)});
  }
  std::sort(report.element_ranking.begin(), report.element_ranking.end(),
            [](const ElementScore& a, const ElementScore& b) {
              return a.score != b.score ? a.score > b.score : a.element_id < b.element_id;
            });
  std::sort(report.vertex_ranking.begin(), report.vertex_ranking.end(),
            [](const VertexScore& a, const VertexScore& b) {
              return a.posterior != b.posterior ? a.posterior > b.posterior : a.label < b.label;
            });

  const auto& ranking = report.element_ranking;
  for (std::size_t i = 0; i < ranking.size();) {
    std::size_t j = i + 1;
    while (j < ranking.size() && ranking[i].score - ranking[j].score < options.tie_epsilon) ++j;
    if (j - i >= 2) {
      std::vector<std::string> group;
      for (std::size_t k = i; k < j; ++k) group.push_back(ranking[k].element_id);
      report.ties.push_back(std::move(group));
    }
    i = j;
  }

  const auto& top = candidates[ranking.front().element_id];
  for (const auto& [label, p] : origin_posteriors(net, ev, top)) {
    report.top_element_split.push_back({label, p});
  }
  std::sort(report.top_element_split.begin(), report.top_element_split.end(),
            [&](const VertexScore& a, const VertexScore& b) {
              return net.index_of(a.label) < net.index_of(b.label);
            });

  if (options.top_k > 0) {
    if (report.element_ranking.size() > options.top_k) report.element_ranking.resize(options.top_k);
    if (report.vertex_ranking.size() > options.top_k) report.vertex_ranking.resize(options.top_k);
  }
  return report;
}

std::string explain(const RootCauseReport& report) {
  std::ostringstream os;
  char buf[64];
  const auto pct = [&](double p) {
    std::snprintf(buf, sizeof buf, "%.1f %%", 100.0 * p);
    return std::string(buf);
  };
  if (report.element_ranking.empty()) {
    os << "no unobserved candidates: every vertex carries hard evidence\n";
    return os.str();
  }
  const auto& top = report.element_ranking.front();
  os << "most probable root cause: " << top.element_id << " (" << pct(top.score) << ")\n";
  if (!report.top_element_split.empty()) {
    os << "  failing sub-component of " << top.element_id << ":\n";
    for (const auto& v : report.top_element_split) {
      os << "    " << v.label << "  " << pct(v.posterior) << "\n";
    }
  }
  for (const auto& group : report.ties) {
    os << "tie group of " << group.size() << ":";
    for (const auto& id : group) os << " " << id;
    os << "\n";
  }
  os << "element ranking:\n";
  for (std::size_t i = 0; i < report.element_ranking.size(); ++i) {
    const auto& e = report.element_ranking[i];
    os << "  " << (i + 1) << ". " << e.element_id << "  " << pct(e.score) << "\n";
  }
  return os.str();
}

namespace {
using ojson = nlohmann::ordered_json;
}

std::string report_to_json(const RootCauseReport& report) {
  ojson doc;
  auto& elements = doc["element_ranking"] = ojson::array();
  for (const auto& e : report.element_ranking) {
    elements.push_back({{"element", e.element_id}, {"score", e.score}});
  }
  auto& ties = doc["ties"] = ojson::array();
  for (const auto& g : report.ties) ties.push_back(g);
  auto& split = doc["top_element_split"] = ojson::array();
  for (const auto& v : report.top_element_split) {
    split.push_back({{"vertex", v.label}, {"origin_posterior", v.posterior}});
  }
  auto& vertices = doc["vertex_ranking"] = ojson::array();
  for (const auto& v : report.vertex_ranking) {
    vertices.push_back({{"vertex", v.label}, {"posterior", v.posterior}});
  }
  doc["tie_epsilon"] = report.tie_epsilon;
  auto& ev = doc["evidence"];
  ev["hard"] = ojson::object();
  for (const auto& [label, s] : report.evidence_echo.hard()) ev["hard"][label] = state_name(s);
  ev["soft"] = ojson::object();
  for (const auto& [label, l] : report.evidence_echo.soft()) {
    ev["soft"][label] = {{"up", l.up}, {"down", l.down}};
  }
  return doc.dump(2) + "\n";
}

EvidenceFile evidence_file_from_json(std::string_view document) {
  ojson doc;
  try {
    doc = ojson::parse(document.begin(), document.end());
  } catch (const ojson::parse_error& e) {
    fail(Errc::parse, "malformed evidence JSON at byte " + std::to_string(e.byte));
  }
  EvidenceFile file;
  try {
    if (doc.contains("alarm") && !doc.at("alarm").is_null()) {
      const auto& a = doc.at("alarm");
      ServiceAlarm alarm;
      alarm.kind = parse_alarm_kind(a.at("kind").get<std::string>());
      if (a.contains("endpoints")) {
        const auto& ep = a.at("endpoints");
        if (!ep.is_array() || ep.size() != 2) fail(Errc::parse, "alarm endpoints must be a pair");
        alarm.endpoints = std::make_pair(ep[0].get<std::string>(), ep[1].get<std::string>());
      }
      if (a.contains("raised_at")) alarm.raised_at = a.at("raised_at").get<std::int64_t>();
      if (alarm.kind == AlarmKind::ServiceDegradation && !alarm.endpoints) {
        fail(Errc::parse, "service-degradation alarm needs endpoints");
      }
      file.alarm = alarm;
    }
    if (doc.contains("nic_states")) {
      for (const auto& [label, s] : doc.at("nic_states").items()) {
        file.observations.nic_states[label] = parse_state(s.get<std::string>());
      }
    }
    if (doc.contains("cpu_utilization")) {
      for (const auto& [label, u] : doc.at("cpu_utilization").items()) {
        file.observations.cpu_utilization[label] = u.get<double>();
      }
    }
  } catch (const ojson::exception& e) {
    fail(Errc::parse, std::string("invalid evidence JSON: ") + e.what());
  }
  return file;
}

std::string evidence_file_to_json(const EvidenceFile& file) {
  ojson doc;
  if (file.alarm) {
    auto& a = doc["alarm"];
    a["kind"] = alarm_kind_name(file.alarm->kind);
    if (file.alarm->endpoints) {
      a["endpoints"] = {file.alarm->endpoints->first, file.alarm->endpoints->second};
    }
    a["raised_at"] = file.alarm->raised_at;
  } else {
    doc["alarm"] = nullptr;
  }
  doc["nic_states"] = ojson::object();
  for (const auto& [label, s] : file.observations.nic_states) doc["nic_states"][label] = state_name(s);
  doc["cpu_utilization"] = ojson::object();
  for (const auto& [label, u] : file.observations.cpu_utilization) {
    doc["cpu_utilization"][label] = u;
  }
  return doc.dump(2) + "\n";
}

}  // namespace netdiag
