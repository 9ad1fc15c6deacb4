#pragma once

// Global dependency graph: fragment assembly, topological indexing and
// link-to-card edge addition.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "netdiag/templates.hpp"
#include "netdiag/topology.hpp"

namespace netdiag {

enum class EdgeClass { Inside, Inter };

struct Vertex {
  std::string label;
  VertexKind kind = VertexKind::Cpu;
  LayerTag layer = LayerTag::Physical;
  std::string owner;
  ElementType owner_type = ElementType::Host;
  int fragment = 0;     // instantiation order of the owning fragment
  int local_index = 0;  // index inside the owning template

  bool operator==(const Vertex&) const = default;
};

struct Edge {
  std::size_t from = 0;
  std::size_t to = 0;
  EdgeClass cls = EdgeClass::Inside;

  bool operator==(const Edge&) const = default;
  auto operator<=>(const Edge&) const = default;
};

/// Vertex position is the global index. Edges are kept sorted by (from, to).
class DependencyGraph {
 public:
  std::size_t size() const noexcept { return vertices_.size(); }
  const std::vector<Vertex>& vertices() const noexcept { return vertices_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Vertex& vertex(std::size_t i) const { return vertices_.at(i); }
  bool sorted() const noexcept { return sorted_; }
  const std::set<std::string>& shared_nic_owners() const noexcept { return shared_nic_owners_; }

  std::optional<std::size_t> find(std::string_view label) const;
  std::vector<std::size_t> parents(std::size_t v) const;
  std::vector<std::size_t> children(std::size_t v) const;
  std::size_t count(EdgeClass cls) const noexcept;
  /// Vertices owned by one element, in index order.
  std::vector<std::size_t> owned_by(std::string_view element_id) const;

  /// Builder used by assembly and import; validates indices and labels.
  static DependencyGraph from_parts(std::vector<Vertex> vertices, std::vector<Edge> edges,
                                    bool sorted, std::set<std::string> shared_nic_owners = {});

  bool operator==(const DependencyGraph& other) const {
    return vertices_ == other.vertices_ && edges_ == other.edges_ && sorted_ == other.sorted_ &&
           shared_nic_owners_ == other.shared_nic_owners_;
  }

 private:
  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  bool sorted_ = false;
  std::set<std::string> shared_nic_owners_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Disjoint union of fragments; throws label-collision on duplicate labels.
DependencyGraph assemble(const std::vector<GraphFragment>& fragments);

/// Reassigns indices so every edge runs low to high. Fragments are ordered
/// by their inter-fragment dependencies (ties by instantiation order), and
/// vertices within a fragment by layer then template index. Throws cycle.
DependencyGraph topological_sort(const DependencyGraph& g);

/// Two link-to-card edges per link entry. Cards are taken lowest-free-first,
/// control links before inter-switch links before access links.
DependencyGraph add_inter_edges(const DependencyGraph& g, const LinkDescriptor& links);

DependencyGraph build_model(const Topology& topology, const TemplateProfile& profile);

/// Recovers the element and link descriptors from a built model: element
/// types come from vertex owners, link endpoints from the link-to-card edges.
Topology topology_of(const DependencyGraph& g);

enum class ExportFormat { Dot, Json };

std::string export_graph(const DependencyGraph& g, ExportFormat format);
DependencyGraph import_graph_json(std::string_view document);

}  // namespace netdiag
