#include "netdiag/topology.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <deque>
#include <map>
#include <set>
#include <unordered_map>

#include "netdiag/error.hpp"

namespace netdiag {

namespace {

constexpr std::array kAllTypes = {
    ElementType::Controller,  ElementType::MasterSwitch, ElementType::SlaveSwitch,
    ElementType::Host,        ElementType::ControlLink,  ElementType::AccessLink,
    ElementType::InterSwitchLink,
};

enum class NodeRole { Controller, Switch, Host };

std::string padded(char prefix, int k) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%c%04d", prefix, k);
  return buf;
}

}  // namespace

std::string_view type_prefix(ElementType type) noexcept {
  switch (type) {
    case ElementType::Controller: return "C";
    case ElementType::MasterSwitch: return "MS";
    case ElementType::SlaveSwitch: return "SS";
    case ElementType::Host: return "H";
    case ElementType::ControlLink: return "CL";
    case ElementType::AccessLink: return "AL";
    case ElementType::InterSwitchLink: return "IL";
  }
  return "?";
}

std::string_view type_name(ElementType type) noexcept {
  switch (type) {
    case ElementType::Controller: return "controller";
    case ElementType::MasterSwitch: return "master-switch";
    case ElementType::SlaveSwitch: return "slave-switch";
    case ElementType::Host: return "host";
    case ElementType::ControlLink: return "control-link";
    case ElementType::AccessLink: return "access-link";
    case ElementType::InterSwitchLink: return "inter-switch-link";
  }
  return "?";
}

ElementType parse_element_type(std::string_view name) {
  for (auto t : kAllTypes) {
    if (name == type_name(t) || name == type_prefix(t)) return t;
  }
  fail(Errc::parse, "unknown element type '" + std::string(name) + "'");
}

std::string_view dialect_name(Dialect d) noexcept {
  switch (d) {
    case Dialect::Native: return "native";
    case Dialect::Floodlight: return "floodlight";
    case Dialect::OpenDaylight: return "opendaylight";
  }
  return "?";
}

std::optional<Dialect> parse_dialect_name(std::string_view name) noexcept {
  if (name == "native") return Dialect::Native;
  if (name == "floodlight" || name == "floodlight-style") return Dialect::Floodlight;
  if (name == "opendaylight" || name == "opendaylight-style") return Dialect::OpenDaylight;
  return std::nullopt;
}

std::string_view control_mode_name(ControlMode m) noexcept {
  return m == ControlMode::OutOfBand ? "out-of-band" : "in-band";
}

ControlMode parse_control_mode(std::string_view name) {
  if (name == "out-of-band") return ControlMode::OutOfBand;
  if (name == "in-band") return ControlMode::InBand;
  fail(Errc::parse, "unknown control mode '" + std::string(name) + "'");
}

std::string_view shape_name(Shape s) noexcept {
  switch (s) {
    case Shape::Linear: return "linear";
    case Shape::Tree: return "tree";
    case Shape::Ring: return "ring";
    case Shape::Star: return "star";
  }
  return "?";
}

Shape parse_shape(std::string_view name) {
  if (name == "linear") return Shape::Linear;
  if (name == "tree") return Shape::Tree;
  if (name == "ring") return Shape::Ring;
  if (name == "star") return Shape::Star;
  fail(Errc::shape, "unknown topology kind '" + std::string(name) + "'");
}

TopologyKind TopologyKind::tree(int fanout, int depth) {
  if (fanout < 2 || depth < 1) {
    fail(Errc::shape, "tree needs fanout >= 2 and depth >= 1, got fanout " +
                          std::to_string(fanout) + " depth " + std::to_string(depth));
  }
  return {Shape::Tree, fanout, depth};
}

TopologyKind TopologyKind::tree_for_hosts(int n_hosts, int fanout) {
  if (fanout < 2) fail(Errc::shape, "tree fanout must be >= 2");
  int depth = 0;
  long long capacity = 1;
  while (capacity < n_hosts) {
    capacity *= fanout;
    ++depth;
  }
  if (depth < 1 || capacity != n_hosts) {
    fail(Errc::shape, std::to_string(n_hosts) + " hosts is not a power of fanout " +
                          std::to_string(fanout));
  }
  return tree(fanout, depth);
}

const Element* NetworkDescriptor::find(std::string_view element_id) const noexcept {
  for (const auto& e : elements) {
    if (e.element_id == element_id) return &e;
  }
  return nullptr;
}

std::size_t NetworkDescriptor::count(ElementType type) const noexcept {
  return static_cast<std::size_t>(std::count_if(
      elements.begin(), elements.end(), [type](const Element& e) { return e.type == type; }));
}

const LinkEntry* LinkDescriptor::find(std::string_view link_id) const noexcept {
  for (const auto& e : entries) {
    if (e.link_id == link_id) return &e;
  }
  return nullptr;
}

std::size_t LinkDescriptor::degree(std::string_view element_id) const noexcept {
  std::size_t n = 0;
  for (const auto& e : entries) {
    if (e.endpoint_a == element_id) ++n;
    if (e.endpoint_b == element_id) ++n;
  }
  return n;
}

void validate(const RawTopology& raw) {
  std::set<std::string_view> node_ids;
  for (const auto& n : raw.nodes) {
    if (!node_ids.insert(n.raw_id).second) {
      fail(Errc::referential, "duplicate node id '" + n.raw_id + "'");
    }
  }
  std::set<std::string_view> link_ids;
  for (const auto& l : raw.links) {
    if (!link_ids.insert(l.raw_id).second) {
      fail(Errc::referential, "duplicate link id '" + l.raw_id + "'");
    }
    for (const auto* endpoint : {&l.endpoint_a, &l.endpoint_b}) {
      if (!node_ids.contains(*endpoint)) {
        fail(Errc::referential,
             "link '" + l.raw_id + "' references undeclared node '" + *endpoint + "'");
      }
    }
  }
}

Topology classify(const RawTopology& raw, std::uint64_t snapshot_instant) {
  validate(raw);

  std::unordered_map<std::string_view, std::size_t> node_index;
  for (std::size_t i = 0; i < raw.nodes.size(); ++i) node_index[raw.nodes[i].raw_id] = i;

  auto ctl = node_index.find(raw.controller_id);
  if (raw.controller_id.empty() || ctl == node_index.end()) {
    fail(Errc::referential, "controller id '" + raw.controller_id + "' names no declared node");
  }
  const std::size_t controller = ctl->second;
  for (std::size_t i = 0; i < raw.nodes.size(); ++i) {
    if (i != controller && raw.nodes[i].kind_hint == "controller") {
      fail(Errc::unsupported_topology, "multiple controllers: '" + raw.controller_id +
                                           "' and '" + raw.nodes[i].raw_id + "'");
    }
  }

  std::vector<std::vector<std::size_t>> neighbours(raw.nodes.size());
  for (const auto& l : raw.links) {
    const auto a = node_index.at(l.endpoint_a);
    const auto b = node_index.at(l.endpoint_b);
    if (a == b) fail(Errc::classification, "link '" + l.raw_id + "' is a self-loop");
    neighbours[a].push_back(b);
    neighbours[b].push_back(a);
  }

  std::vector<NodeRole> role(raw.nodes.size(), NodeRole::Switch);
  for (std::size_t i = 0; i < raw.nodes.size(); ++i) {
    const auto& node = raw.nodes[i];
    if (i == controller) {
      role[i] = NodeRole::Controller;
      continue;
    }
    if (neighbours[i].empty()) {
      fail(Errc::isolation, "node '" + node.raw_id + "' is adjacent to nothing");
    }
    if (node.kind_hint == "host") {
      role[i] = NodeRole::Host;
    } else if (node.kind_hint == "switch") {
      role[i] = NodeRole::Switch;
    } else if (node.kind_hint) {
      fail(Errc::classification,
           "node '" + node.raw_id + "' has unknown kind '" + *node.kind_hint + "'");
    } else if (neighbours[i].size() == 1) {
      // Leaf hanging off a switch: a host unless its neighbour is itself a leaf.
      const auto peer = neighbours[i].front();
      const auto& hint = raw.nodes[peer].kind_hint;
      const bool peer_is_switch =
          peer != controller && (hint == "switch" || (!hint && neighbours[peer].size() > 1));
      role[i] = peer_is_switch ? NodeRole::Host : NodeRole::Switch;
    }
  }

  std::vector<bool> master(raw.nodes.size(), false);
  for (auto n : neighbours[controller]) {
    if (role[n] == NodeRole::Switch) master[n] = true;
  }

  std::map<ElementType, std::vector<std::string_view>> raw_by_type;
  std::unordered_map<std::string_view, ElementType> node_type;
  for (std::size_t i = 0; i < raw.nodes.size(); ++i) {
    ElementType t = ElementType::Host;
    switch (role[i]) {
      case NodeRole::Controller: t = ElementType::Controller; break;
      case NodeRole::Host: t = ElementType::Host; break;
      case NodeRole::Switch:
        t = master[i] ? ElementType::MasterSwitch : ElementType::SlaveSwitch;
        break;
    }
    node_type[raw.nodes[i].raw_id] = t;
    raw_by_type[t].push_back(raw.nodes[i].raw_id);
  }

  std::unordered_map<std::string_view, ElementType> link_type;
  for (const auto& l : raw.links) {
    const auto ra = role[node_index.at(l.endpoint_a)];
    const auto rb = role[node_index.at(l.endpoint_b)];
    ElementType t;
    if (ra == NodeRole::Controller || rb == NodeRole::Controller) {
      const auto other = ra == NodeRole::Controller ? rb : ra;
      if (other != NodeRole::Switch) {
        fail(Errc::classification, "link '" + l.raw_id + "' joins the controller to a host");
      }
      t = ElementType::ControlLink;
    } else if (ra == NodeRole::Host || rb == NodeRole::Host) {
      if (ra == NodeRole::Host && rb == NodeRole::Host) {
        fail(Errc::classification, "link '" + l.raw_id + "' joins two hosts");
      }
      t = ElementType::AccessLink;
    } else {
      t = ElementType::InterSwitchLink;
    }
    link_type[l.raw_id] = t;
    raw_by_type[t].push_back(l.raw_id);
  }

  Topology out;
  out.network.snapshot_instant = snapshot_instant;
  std::unordered_map<std::string_view, std::string> normalized;
  for (auto t : kAllTypes) {
    auto& ids = raw_by_type[t];
    std::sort(ids.begin(), ids.end());
    for (std::size_t k = 0; k < ids.size(); ++k) {
      Element e{std::string(type_prefix(t)) + "_" + std::to_string(k + 1), std::string(ids[k]), t};
      normalized[ids[k]] = e.element_id;
      out.network.elements.push_back(std::move(e));
    }
  }

  for (auto t : {ElementType::ControlLink, ElementType::AccessLink, ElementType::InterSwitchLink}) {
    for (auto raw_id : raw_by_type[t]) {
      const auto& l = *std::find_if(raw.links.begin(), raw.links.end(),
                                    [&](const RawLink& r) { return r.raw_id == raw_id; });
      out.links.entries.push_back(
          {normalized.at(raw_id), normalized.at(l.endpoint_a), normalized.at(l.endpoint_b)});
    }
  }

  detect_control_mode(out.network, out.links);
  return out;
}

ControlMode detect_control_mode(NetworkDescriptor& network, const LinkDescriptor& links) {
  std::vector<std::string_view> switches;
  const Element* controller = nullptr;
  for (const auto& e : network.elements) {
    if (is_switch(e.type)) switches.push_back(e.element_id);
    if (e.type == ElementType::Controller) controller = &e;
  }
  if (switches.empty()) {
    network.control_mode = ControlMode::OutOfBand;
    return network.control_mode;
  }

  std::set<std::string_view> controlled;
  std::map<std::string_view, std::vector<std::string_view>> fabric;
  for (const auto& l : links.entries) {
    const auto* a = network.find(l.endpoint_a);
    const auto* b = network.find(l.endpoint_b);
    if (!a || !b) fail(Errc::referential, "link '" + l.link_id + "' has an unknown endpoint");
    if (controller && (a == controller || b == controller)) {
      const auto* sw = a == controller ? b : a;
      if (is_switch(sw->type)) controlled.insert(sw->element_id);
    } else if (is_switch(a->type) && is_switch(b->type)) {
      fabric[a->element_id].push_back(b->element_id);
      fabric[b->element_id].push_back(a->element_id);
    }
  }

  if (controlled.empty()) fail(Errc::no_control_path, "no switch has a control link");
  if (controlled.size() == switches.size()) {
    network.control_mode = ControlMode::OutOfBand;
    return network.control_mode;
  }

  std::set<std::string_view> reached(controlled.begin(), controlled.end());
  std::deque<std::string_view> queue(controlled.begin(), controlled.end());
  while (!queue.empty()) {
    auto s = queue.front();
    queue.pop_front();
    for (auto n : fabric[s]) {
      if (reached.insert(n).second) queue.push_back(n);
    }
  }
  for (auto s : switches) {
    if (!reached.contains(s)) {
      fail(Errc::partitioned_control,
           "switch '" + std::string(s) + "' cannot reach the controller");
    }
  }
  if (controlled.size() != 1) {
    fail(Errc::unsupported_topology,
         std::to_string(controlled.size()) + " of " + std::to_string(switches.size()) +
             " switches have control links; in-band control needs exactly one master");
  }
  network.control_mode = ControlMode::InBand;
  return network.control_mode;
}

RawTopology generate_raw_topology(const TopologyKind& kind, int n_hosts, ControlMode mode) {
  if (n_hosts < 1) fail(Errc::shape, "n_hosts must be >= 1");

  RawTopology raw;
  raw.source_dialect = Dialect::Native;
  raw.controller_id = "c0";
  raw.nodes.push_back({"c0", "controller"});

  int n_switches = 0;
  std::vector<int> host_switch(static_cast<std::size_t>(n_hosts));
  std::vector<std::pair<int, int>> fabric;

  switch (kind.shape) {
    case Shape::Linear:
    case Shape::Ring:
      n_switches = n_hosts;
      for (int i = 0; i < n_hosts; ++i) host_switch[i] = i + 1;
      for (int s = 1; s < n_switches; ++s) fabric.emplace_back(s, s + 1);
      if (kind.shape == Shape::Ring && n_switches >= 3) fabric.emplace_back(1, n_switches);
      break;
    case Shape::Star:
      n_switches = 1;
      for (int i = 0; i < n_hosts; ++i) host_switch[i] = 1;
      break;
    case Shape::Tree: {
      const auto checked = TopologyKind::tree(kind.fanout, kind.depth);
      long long leaves = 1;
      long long total = 1;
      for (int level = 1; level < checked.depth; ++level) {
        leaves *= checked.fanout;
        total += leaves;
      }
      if (total > 100000 || n_hosts % leaves != 0) {
        fail(Errc::shape, std::to_string(n_hosts) + " hosts cannot be spread evenly over " +
                              std::to_string(leaves) + " leaf switches");
      }
      n_switches = static_cast<int>(total);
      // Switches are numbered breadth-first; children of k are f(k-1)+2 .. f(k-1)+f+1.
      for (int k = 1; k <= n_switches; ++k) {
        for (int c = 0; c < checked.fanout; ++c) {
          const int child = checked.fanout * (k - 1) + 2 + c;
          if (child <= n_switches) fabric.emplace_back(k, child);
        }
      }
      const int first_leaf = n_switches - static_cast<int>(leaves) + 1;
      const int per_leaf = n_hosts / static_cast<int>(leaves);
      for (int i = 0; i < n_hosts; ++i) host_switch[i] = first_leaf + i / per_leaf;
      break;
    }
  }

  for (int s = 1; s <= n_switches; ++s) raw.nodes.push_back({padded('s', s), "switch"});
  for (int h = 1; h <= n_hosts; ++h) raw.nodes.push_back({padded('h', h), "host"});

  for (int s = 1; s <= n_switches; ++s) {
    if (mode == ControlMode::OutOfBand || s == 1) {
      raw.links.push_back({"cl-" + padded('s', s), "c0", padded('s', s)});
    }
  }
  for (int h = 1; h <= n_hosts; ++h) {
    raw.links.push_back(
        {"al-" + padded('h', h), padded('s', host_switch[h - 1]), padded('h', h)});
  }
  for (auto [a, b] : fabric) {
    raw.links.push_back(
        {"il-" + padded('s', a) + "-" + padded('s', b), padded('s', a), padded('s', b)});
  }
  return raw;
}

Topology generate_topology(const TopologyKind& kind, int n_hosts, ControlMode mode) {
  return classify(generate_raw_topology(kind, n_hosts, mode));
}

RawTopology to_raw(const Topology& topology) {
  RawTopology raw;
  std::unordered_map<std::string_view, std::string_view> raw_of;
  for (const auto& e : topology.network.elements) {
    raw_of[e.element_id] = e.raw_id;
    if (is_link(e.type)) continue;
    std::optional<std::string> hint;
    if (e.type == ElementType::Controller) {
      hint = "controller";
      raw.controller_id = e.raw_id;
    } else if (e.type == ElementType::Host) {
      hint = "host";
    } else {
      hint = "switch";
    }
    raw.nodes.push_back({e.raw_id, hint});
  }
  for (const auto& l : topology.links.entries) {
    raw.links.push_back({std::string(raw_of.at(l.link_id)), std::string(raw_of.at(l.endpoint_a)),
                         std::string(raw_of.at(l.endpoint_b))});
  }
  return raw;
}

}  // namespace netdiag
