#include "netdiag/templates.hpp"

#include "netdiag/error.hpp"

namespace netdiag {

std::string_view layer_name(LayerTag layer) noexcept {
  switch (layer) {
    case LayerTag::Physical: return "physical";
    case LayerTag::LogicalInitiated: return "initiated";
    case LayerTag::LogicalConfigured: return "configured";
    case LayerTag::LogicalActivated: return "activated";
  }
  return "?";
}

LayerTag parse_layer(std::string_view name) {
  for (auto l : {LayerTag::Physical, LayerTag::LogicalInitiated, LayerTag::LogicalConfigured,
                 LayerTag::LogicalActivated}) {
    if (layer_name(l) == name) return l;
  }
  fail(Errc::parse, "unknown layer '" + std::string(name) + "'");
}

namespace {
constexpr VertexKind kAllKinds[] = {VertexKind::Cpu,       VertexKind::NetworkCard,
                                    VertexKind::VnfProcess, VertexKind::VnfConfig,
                                    VertexKind::VnfActive,  VertexKind::LinkState};
}

std::string_view kind_name(VertexKind kind) noexcept {
  switch (kind) {
    case VertexKind::Cpu: return "Cpu";
    case VertexKind::NetworkCard: return "NetworkCard";
    case VertexKind::VnfProcess: return "VnfProcess";
    case VertexKind::VnfConfig: return "VnfConfig";
    case VertexKind::VnfActive: return "VnfActive";
    case VertexKind::LinkState: return "LinkState";
  }
  return "?";
}

VertexKind parse_kind(std::string_view name) {
  for (auto k : kAllKinds) {
    if (kind_name(k) == name || kind_token(k) == name) return k;
  }
  fail(Errc::config, "unknown vertex kind '" + std::string(name) + "'");
}

std::string_view kind_token(VertexKind kind) noexcept {
  switch (kind) {
    case VertexKind::Cpu: return "CPU";
    case VertexKind::NetworkCard: return "NC";
    case VertexKind::VnfProcess: return "PROC";
    case VertexKind::VnfConfig: return "CONF";
    case VertexKind::VnfActive: return "ACT";
    case VertexKind::LinkState: return "LINK";
  }
  return "?";
}

LayerTag layer_of(VertexKind kind) noexcept {
  switch (kind) {
    case VertexKind::VnfProcess: return LayerTag::LogicalInitiated;
    case VertexKind::VnfConfig: return LayerTag::LogicalConfigured;
    case VertexKind::VnfActive: return LayerTag::LogicalActivated;
    default: return LayerTag::Physical;
  }
}

std::string_view profile_name(ProfileMode mode) noexcept {
  return mode == ProfileMode::TableCompat ? "table-compat" : "degree-adaptive";
}

ProfileMode parse_profile(std::string_view name) {
  if (name == "table-compat") return ProfileMode::TableCompat;
  if (name == "degree-adaptive") return ProfileMode::DegreeAdaptive;
  fail(Errc::config, "unknown template profile '" + std::string(name) + "'");
}

namespace {

VertexSpec spec(int index, VertexKind kind, int k) {
  return {index, kind, layer_of(kind), std::string(kind_token(kind)) + "_" + std::to_string(k)};
}

NodeTemplate node_template(ElementType type, int nics, bool shared) {
  NodeTemplate t;
  t.element_type = type;
  t.nic_count = nics;
  t.shared_nics = shared;
  int i = 0;
  t.vertices.push_back(spec(i++, VertexKind::Cpu, 1));
  for (int k = 1; k <= nics; ++k) {
    t.intra_edges.emplace_back(0, i);
    t.vertices.push_back(spec(i++, VertexKind::NetworkCard, k));
  }
  const int proc = i;
  t.vertices.push_back(spec(i++, VertexKind::VnfProcess, 1));
  t.vertices.push_back(spec(i++, VertexKind::VnfConfig, 1));
  t.vertices.push_back(spec(i++, VertexKind::VnfActive, 1));
  t.intra_edges.emplace_back(0, proc);
  t.intra_edges.emplace_back(proc, proc + 1);
  t.intra_edges.emplace_back(proc + 1, proc + 2);
  return t;
}

}  // namespace

Template template_for(ElementType type, const TemplateProfile& profile, int degree) {
  if (is_link(type)) return LinkTemplate{type, spec(0, VertexKind::LinkState, 1)};

  if (profile.mode == ProfileMode::DegreeAdaptive) {
    if (degree <= 0) {
      fail(Errc::isolated_node,
           std::string(type_name(type)) + " with no incident links has no network card");
    }
    return node_template(type, degree, false);
  }
  switch (type) {
    case ElementType::Controller: return node_template(type, profile.controller_nics, true);
    case ElementType::Host: return node_template(type, profile.host_nics, false);
    case ElementType::MasterSwitch:
    case ElementType::SlaveSwitch: return node_template(type, profile.switch_nics, false);
    default: break;
  }
  fail(Errc::template_missing, "no template for " + std::string(type_name(type)));
}

std::size_t vertex_count(const Template& t) noexcept {
  return std::visit(
      [](const auto& tpl) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(tpl)>, NodeTemplate>) {
          return tpl.vertices.size();
        } else {
          return 1;
        }
      },
      t);
}

GraphFragment instantiate(const Element& element, const Template& t) {
  GraphFragment f;
  f.owner_element = element.element_id;
  f.owner_type = element.type;
  const auto add = [&](const VertexSpec& v) {
    f.vertices.push_back({element.element_id + "." + v.label_pattern, v.kind, v.layer, v.local_index});
  };
  if (const auto* node = std::get_if<NodeTemplate>(&t)) {
    for (const auto& v : node->vertices) add(v);
    f.edges = node->intra_edges;
    f.shared_nics = node->shared_nics;
  } else {
    add(std::get<LinkTemplate>(t).vertex);
  }
  return f;
}

std::vector<GraphFragment> instantiate_all(const Topology& topology, const TemplateProfile& profile) {
  std::vector<GraphFragment> out;
  out.reserve(topology.network.elements.size());
  for (const auto& e : topology.network.elements) {
    const int degree = is_link(e.type) ? 0 : static_cast<int>(topology.links.degree(e.element_id));
    out.push_back(instantiate(e, template_for(e.type, profile, degree)));
  }
  return out;
}

std::size_t expected_vertex_count(const TopologyKind& kind, int n_hosts) {
  if (n_hosts < 1) fail(Errc::domain, "n_hosts must be >= 1");
  long long switches = 0;
  switch (kind.shape) {
    case Shape::Linear:
      switches = n_hosts;
      break;
    case Shape::Tree: {
      if (kind.fanout < 2 || kind.depth < 1) fail(Errc::domain, "invalid tree parameters");
      long long leaves = 1;
      switches = 1;
      for (int level = 1; level < kind.depth; ++level) {
        leaves *= kind.fanout;
        switches += leaves;
      }
      if (n_hosts % leaves != 0) {
        fail(Errc::domain, std::to_string(n_hosts) + " hosts do not fit the tree's leaves");
      }
      break;
    }
    default:
      fail(Errc::domain, "closed form covers linear and tree topologies only, not " +
                             std::string(shape_name(kind.shape)));
  }
  return static_cast<std::size_t>(4 + 10 * switches + 7LL * n_hosts);
}

}  // namespace netdiag
