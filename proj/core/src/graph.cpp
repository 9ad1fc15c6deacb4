#include "netdiag/graph.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <tuple>

#include "netdiag/error.hpp"

namespace netdiag {

std::optional<std::size_t> DependencyGraph::find(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::size_t> DependencyGraph::parents(std::size_t v) const {
  std::vector<std::size_t> out;
  for (const auto& e : edges_) {
    if (e.to == v) out.push_back(e.from);
  }
  return out;
}

std::vector<std::size_t> DependencyGraph::children(std::size_t v) const {
  std::vector<std::size_t> out;
  auto it = std::lower_bound(edges_.begin(), edges_.end(), v,
                             [](const Edge& e, std::size_t x) { return e.from < x; });
  for (; it != edges_.end() && it->from == v; ++it) out.push_back(it->to);
  return out;
}

std::size_t DependencyGraph::count(EdgeClass cls) const noexcept {
  return static_cast<std::size_t>(
      std::count_if(edges_.begin(), edges_.end(), [cls](const Edge& e) { return e.cls == cls; }));
}

std::vector<std::size_t> DependencyGraph::owned_by(std::string_view element_id) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (vertices_[i].owner == element_id) out.push_back(i);
  }
  return out;
}

DependencyGraph DependencyGraph::from_parts(std::vector<Vertex> vertices, std::vector<Edge> edges,
                                            bool sorted, std::set<std::string> shared_nic_owners) {
  DependencyGraph g;
  g.index_.reserve(vertices.size());
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (!g.index_.emplace(vertices[i].label, i).second) {
      fail(Errc::label_collision, "vertex label '" + vertices[i].label + "' appears twice");
    }
  }
  for (const auto& e : edges) {
    if (e.from >= vertices.size() || e.to >= vertices.size()) {
      fail(Errc::referential, "edge " + std::to_string(e.from) + "->" + std::to_string(e.to) +
                                  " references a missing vertex");
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](const Edge& a, const Edge& b) { return a.from == b.from && a.to == b.to; }),
              edges.end());
  if (sorted) {
    sorted = std::all_of(edges.begin(), edges.end(), [](const Edge& e) { return e.from < e.to; });
  }
  g.vertices_ = std::move(vertices);
  g.edges_ = std::move(edges);
  g.sorted_ = sorted;
  g.shared_nic_owners_ = std::move(shared_nic_owners);
  return g;
}

DependencyGraph assemble(const std::vector<GraphFragment>& fragments) {
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  std::set<std::string> shared;
  for (std::size_t f = 0; f < fragments.size(); ++f) {
    const auto& frag = fragments[f];
    const std::size_t base = vertices.size();
    for (const auto& v : frag.vertices) {
      vertices.push_back({v.label, v.kind, v.layer, frag.owner_element, frag.owner_type,
                          static_cast<int>(f), v.local_index});
    }
    for (auto [a, b] : frag.edges) {
      edges.push_back({base + static_cast<std::size_t>(a), base + static_cast<std::size_t>(b),
                       EdgeClass::Inside});
    }
    if (frag.shared_nics) shared.insert(frag.owner_element);
  }
  return DependencyGraph::from_parts(std::move(vertices), std::move(edges), false, std::move(shared));
}

namespace {

[[noreturn]] void report_cycle(const DependencyGraph& g, const std::vector<bool>& emitted) {
  // Every unemitted vertex has an unemitted parent; walk parents until one repeats.
  std::size_t v = 0;
  while (emitted[v]) ++v;
  std::vector<std::size_t> path;
  std::map<std::size_t, std::size_t> seen;
  while (!seen.contains(v)) {
    seen[v] = path.size();
    path.push_back(v);
    for (auto p : g.parents(v)) {
      if (!emitted[p]) {
        v = p;
        break;
      }
    }
  }
  std::string msg;
  for (std::size_t i = path.size(); i-- > seen[v];) {
    msg += g.vertex(path[i]).label + " -> ";
  }
  msg += g.vertex(v).label;
  fail(Errc::cycle, "dependency cycle: " + msg);
}

// Kahn's algorithm over `n` items; returns the emission order or nullopt on a cycle.
template <typename Key>
std::optional<std::vector<std::size_t>> kahn(std::size_t n,
                                              const std::vector<std::vector<std::size_t>>& out,
                                              Key key) {
  std::vector<std::size_t> indegree(n, 0);
  for (const auto& targets : out) {
    for (auto t : targets) ++indegree[t];
  }
  using Item = std::pair<decltype(key(0)), std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.push({key(i), i});
  }
  std::vector<std::size_t> order;
  order.reserve(n);
  while (!ready.empty()) {
    auto [k, i] = ready.top();
    ready.pop();
    order.push_back(i);
    for (auto t : out[i]) {
      if (--indegree[t] == 0) ready.push({key(t), t});
    }
  }
  if (order.size() != n) return std::nullopt;
  return order;
}

}  // namespace

DependencyGraph topological_sort(const DependencyGraph& g) {
  const auto& vs = g.vertices();
  const std::size_t n = vs.size();

  std::vector<std::vector<std::size_t>> out(n);
  for (const auto& e : g.edges()) out[e.from].push_back(e.to);

  // Fragment-level order first so each fragment stays contiguous.
  int n_fragments = 0;
  for (const auto& v : vs) n_fragments = std::max(n_fragments, v.fragment + 1);
  std::vector<std::set<std::size_t>> frag_out_sets(static_cast<std::size_t>(n_fragments));
  for (const auto& e : g.edges()) {
    const auto a = static_cast<std::size_t>(vs[e.from].fragment);
    const auto b = static_cast<std::size_t>(vs[e.to].fragment);
    if (a != b) frag_out_sets[a].insert(b);
  }
  std::vector<std::vector<std::size_t>> frag_out;
  for (auto& s : frag_out_sets) frag_out.emplace_back(s.begin(), s.end());
  std::vector<std::size_t> rank(static_cast<std::size_t>(n_fragments));
  if (auto order = kahn(frag_out.size(), frag_out, [](std::size_t f) { return f; })) {
    for (std::size_t r = 0; r < order->size(); ++r) rank[(*order)[r]] = r;
  } else {
    for (std::size_t f = 0; f < rank.size(); ++f) rank[f] = f;
  }

  auto order = kahn(n, out, [&](std::size_t i) {
    return std::make_tuple(rank[static_cast<std::size_t>(vs[i].fragment)],
                           static_cast<int>(vs[i].layer), vs[i].local_index, vs[i].label);
  });
  if (!order) {
    std::vector<bool> emitted(n, false);
    // Re-run plain Kahn to find which vertices are stuck.
    std::vector<std::size_t> indegree(n, 0);
    for (const auto& e : g.edges()) ++indegree[e.to];
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < n; ++i) {
      if (indegree[i] == 0) stack.push_back(i);
    }
    while (!stack.empty()) {
      auto i = stack.back();
      stack.pop_back();
      emitted[i] = true;
      for (auto t : out[i]) {
        if (--indegree[t] == 0) stack.push_back(t);
      }
    }
    report_cycle(g, emitted);
  }

  std::vector<std::size_t> new_index(n);
  std::vector<Vertex> vertices;
  vertices.reserve(n);
  for (std::size_t pos = 0; pos < n; ++pos) {
    new_index[(*order)[pos]] = pos;
    vertices.push_back(vs[(*order)[pos]]);
  }
  std::vector<Edge> edges;
  edges.reserve(g.edges().size());
  for (const auto& e : g.edges()) edges.push_back({new_index[e.from], new_index[e.to], e.cls});
  return DependencyGraph::from_parts(std::move(vertices), std::move(edges), true,
                                     g.shared_nic_owners());
}

DependencyGraph add_inter_edges(const DependencyGraph& input, const LinkDescriptor& links) {
  const DependencyGraph sorted_input = input.sorted() ? DependencyGraph{} : topological_sort(input);
  const DependencyGraph& g = input.sorted() ? input : sorted_input;
  if (links.entries.empty()) return g;

  std::unordered_map<std::string, std::size_t> link_vertex;
  std::unordered_map<std::string, std::vector<std::size_t>> cards;
  std::unordered_map<std::string, ElementType> owner_type;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& v = g.vertex(i);
    owner_type[v.owner] = v.owner_type;
    if (v.kind == VertexKind::LinkState) link_vertex[v.owner] = i;
    if (v.kind == VertexKind::NetworkCard) cards[v.owner].push_back(i);
  }
  for (auto& [owner, list] : cards) {
    std::sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
      return g.vertex(a).local_index < g.vertex(b).local_index;
    });
  }

  std::vector<const LinkEntry*> ordered;
  for (auto type : {ElementType::ControlLink, ElementType::InterSwitchLink, ElementType::AccessLink}) {
    for (const auto& l : links.entries) {
      auto t = owner_type.find(l.link_id);
      if (t == owner_type.end()) {
        fail(Errc::referential, "link '" + l.link_id + "' has no LinkState vertex in the graph");
      }
      if (t->second == type) ordered.push_back(&l);
    }
  }

  std::unordered_map<std::size_t, int> used;
  std::vector<Edge> edges = g.edges();
  for (const auto* l : ordered) {
    const auto lv = link_vertex.find(l->link_id);
    if (lv == link_vertex.end()) {
      fail(Errc::referential, "link '" + l->link_id + "' has no LinkState vertex in the graph");
    }
    for (const auto* endpoint : {&l->endpoint_a, &l->endpoint_b}) {
      auto c = cards.find(*endpoint);
      if (c == cards.end() || c->second.empty()) {
        fail(Errc::capacity, "endpoint '" + *endpoint + "' of link '" + l->link_id +
                                 "' has no network card");
      }
      std::optional<std::size_t> pick;
      for (auto card : c->second) {
        if (used[card] == 0) {
          pick = card;
          break;
        }
      }
      if (!pick) {
        if (!g.shared_nic_owners().contains(*endpoint)) {
          fail(Errc::capacity, "no free network card on '" + *endpoint + "' for link '" +
                                   l->link_id + "'");
        }
        pick = *std::min_element(c->second.begin(), c->second.end(),
                                 [&](std::size_t a, std::size_t b) { return used[a] < used[b]; });
      }
      ++used[*pick];
      edges.push_back({lv->second, *pick, EdgeClass::Inter});
    }
  }

  const bool still_sorted =
      std::all_of(edges.begin(), edges.end(), [](const Edge& e) { return e.from < e.to; });
  auto out = DependencyGraph::from_parts(g.vertices(), std::move(edges), still_sorted,
                                         g.shared_nic_owners());
  return still_sorted ? out : topological_sort(out);
}

DependencyGraph build_model(const Topology& topology, const TemplateProfile& profile) {
  return add_inter_edges(topological_sort(assemble(instantiate_all(topology, profile))),
                         topology.links);
}

Topology topology_of(const DependencyGraph& g) {
  std::map<std::tuple<int, int, std::string>, Element> ordered;
  for (const auto& v : g.vertices()) {
    const auto us = v.owner.rfind('_');
    const int k = us == std::string::npos ? 0 : std::atoi(v.owner.c_str() + us + 1);
    ordered.try_emplace({static_cast<int>(v.owner_type), k, v.owner},
                        Element{v.owner, v.owner, v.owner_type});
  }
  Topology t;
  for (auto& [key, e] : ordered) t.network.elements.push_back(std::move(e));

  for (const auto& e : t.network.elements) {
    if (!is_link(e.type)) continue;
    std::vector<std::string> ends;
    for (auto v : g.owned_by(e.element_id)) {
      for (auto c : g.children(v)) ends.push_back(g.vertex(c).owner);
    }
    if (ends.size() != 2) {
      fail(Errc::referential, "link '" + e.element_id + "' drives " + std::to_string(ends.size()) +
                                  " cards instead of 2");
    }
    t.links.entries.push_back({e.element_id, ends[0], ends[1]});
  }
  detect_control_mode(t.network, t.links);
  return t;
}

}  // namespace netdiag
