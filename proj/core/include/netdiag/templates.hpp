#pragma once

// Per-element dependency templates and their instantiation into graph fragments.

#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "netdiag/topology.hpp"

namespace netdiag {

enum class LayerTag { Physical = 0, LogicalInitiated = 1, LogicalConfigured = 2, LogicalActivated = 3 };

enum class VertexKind { Cpu, NetworkCard, VnfProcess, VnfConfig, VnfActive, LinkState };

std::string_view layer_name(LayerTag layer) noexcept;
LayerTag parse_layer(std::string_view name);
/// Kind name used in configuration files, e.g. "NetworkCard".
std::string_view kind_name(VertexKind kind) noexcept;
VertexKind parse_kind(std::string_view name);
/// Short label token, e.g. "NC" in "MS_1.NC_2".
std::string_view kind_token(VertexKind kind) noexcept;
LayerTag layer_of(VertexKind kind) noexcept;

struct VertexSpec {
  int local_index = 0;
  VertexKind kind = VertexKind::Cpu;
  LayerTag layer = LayerTag::Physical;
  std::string label_pattern;  // "<kind token>_<k>", prefixed with the owner on instantiation

  bool operator==(const VertexSpec&) const = default;
};

struct NodeTemplate {
  ElementType element_type = ElementType::Host;
  std::vector<VertexSpec> vertices;
  std::vector<std::pair<int, int>> intra_edges;
  int nic_count = 1;
  /// When every card is taken, further links share the least-used card
  /// instead of failing with a capacity error.
  bool shared_nics = false;

  bool operator==(const NodeTemplate&) const = default;
};

struct LinkTemplate {
  ElementType element_type = ElementType::AccessLink;
  VertexSpec vertex;

  bool operator==(const LinkTemplate&) const = default;
};

using Template = std::variant<NodeTemplate, LinkTemplate>;

enum class ProfileMode { TableCompat, DegreeAdaptive };

std::string_view profile_name(ProfileMode mode) noexcept;
ProfileMode parse_profile(std::string_view name);

struct TemplateProfile {
  ProfileMode mode = ProfileMode::TableCompat;
  // Card counts used by TableCompat; DegreeAdaptive ignores them.
  int host_nics = 2;
  int switch_nics = 4;
  int controller_nics = 1;

  static TemplateProfile table_compat() { return {}; }
  static TemplateProfile degree_adaptive() { return {ProfileMode::DegreeAdaptive}; }
};

/// `degree` is the number of links incident to the concrete element; it is
/// only consulted by DegreeAdaptive.
Template template_for(ElementType type, const TemplateProfile& profile, int degree = 0);

std::size_t vertex_count(const Template& t) noexcept;

struct FragmentVertex {
  std::string label;
  VertexKind kind = VertexKind::Cpu;
  LayerTag layer = LayerTag::Physical;
  int local_index = 0;
};

struct GraphFragment {
  std::string owner_element;
  ElementType owner_type = ElementType::Host;
  std::vector<FragmentVertex> vertices;
  std::vector<std::pair<int, int>> edges;  // E_INSIDE, local indices
  bool shared_nics = false;
};

GraphFragment instantiate(const Element& element, const Template& t);

/// One fragment per element, in descriptor order.
std::vector<GraphFragment> instantiate_all(const Topology& topology, const TemplateProfile& profile);

/// Closed-form TableCompat vertex count, 4 + 10 * switches + 7 * hosts, for
/// out-of-band linear and tree topologies.
std::size_t expected_vertex_count(const TopologyKind& kind, int n_hosts);

}  // namespace netdiag
