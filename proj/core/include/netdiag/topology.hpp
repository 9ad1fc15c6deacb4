#pragma once

// Topology interpretation: raw controller dumps in, classified network and
// link descriptors out.

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace netdiag {

enum class ElementType {
  Controller,
  MasterSwitch,
  SlaveSwitch,
  Host,
  ControlLink,
  AccessLink,
  InterSwitchLink,
};

/// "C", "MS", "SS", "H", "CL", "AL", "IL".
std::string_view type_prefix(ElementType type) noexcept;
std::string_view type_name(ElementType type) noexcept;
ElementType parse_element_type(std::string_view name);

constexpr bool is_link(ElementType t) noexcept {
  return t == ElementType::ControlLink || t == ElementType::AccessLink ||
         t == ElementType::InterSwitchLink;
}
constexpr bool is_node(ElementType t) noexcept { return !is_link(t); }
constexpr bool is_switch(ElementType t) noexcept {
  return t == ElementType::MasterSwitch || t == ElementType::SlaveSwitch;
}

enum class Dialect { Native, Floodlight, OpenDaylight };

std::string_view dialect_name(Dialect d) noexcept;
std::optional<Dialect> parse_dialect_name(std::string_view name) noexcept;

struct RawNode {
  std::string raw_id;
  std::optional<std::string> kind_hint;  // "switch", "host" or "controller"

  bool operator==(const RawNode&) const = default;
};

struct RawLink {
  std::string raw_id;
  std::string endpoint_a;
  std::string endpoint_b;

  bool operator==(const RawLink&) const = default;
};

struct RawTopology {
  std::vector<RawNode> nodes;
  std::vector<RawLink> links;
  Dialect source_dialect = Dialect::Native;
  std::string controller_id;

  bool operator==(const RawTopology&) const = default;
};

enum class ControlMode { OutOfBand, InBand };

std::string_view control_mode_name(ControlMode m) noexcept;
ControlMode parse_control_mode(std::string_view name);

struct Element {
  std::string element_id;  // e.g. "MS_1"
  std::string raw_id;
  ElementType type = ElementType::Host;

  bool operator==(const Element&) const = default;
};

struct NetworkDescriptor {
  std::vector<Element> elements;
  /// Caller-supplied monotonic snapshot counter; 0 when unspecified.
  std::uint64_t snapshot_instant = 0;
  ControlMode control_mode = ControlMode::OutOfBand;

  const Element* find(std::string_view element_id) const noexcept;
  std::size_t count(ElementType type) const noexcept;

  bool operator==(const NetworkDescriptor&) const = default;
};

struct LinkEntry {
  std::string link_id;
  std::string endpoint_a;
  std::string endpoint_b;

  bool operator==(const LinkEntry&) const = default;
};

struct LinkDescriptor {
  std::vector<LinkEntry> entries;

  const LinkEntry* find(std::string_view link_id) const noexcept;
  /// Number of links incident to a node element.
  std::size_t degree(std::string_view element_id) const noexcept;

  bool operator==(const LinkDescriptor&) const = default;
};

struct Topology {
  NetworkDescriptor network;
  LinkDescriptor links;
};

enum class Shape { Linear, Tree, Ring, Star };

std::string_view shape_name(Shape s) noexcept;
Shape parse_shape(std::string_view name);

struct TopologyKind {
  Shape shape = Shape::Linear;
  int fanout = 2;  // Tree only
  int depth = 1;   // Tree only

  static TopologyKind linear() { return {Shape::Linear, 2, 1}; }
  static TopologyKind ring() { return {Shape::Ring, 2, 1}; }
  static TopologyKind star() { return {Shape::Star, 2, 1}; }
  /// Throws shape error unless fanout >= 2 and depth >= 1.
  static TopologyKind tree(int fanout, int depth);
  /// Mininet-style tree where every leaf switch carries `fanout` hosts, so
  /// n_hosts must be a power of fanout.
  static TopologyKind tree_for_hosts(int n_hosts, int fanout = 2);

  bool operator==(const TopologyKind&) const = default;
};

/// Reads one of the documented fixture layouts. Throws parse, dialect or
/// referential errors. A non-empty `controller_override` replaces whatever
/// controller id the document declares.
RawTopology parse_dialect(std::string_view document, Dialect dialect,
                          std::string_view controller_override = {});

/// Checks RawTopology invariants (unique ids, no dangling endpoints).
void validate(const RawTopology& raw);

/// Assigns one of the seven element types to every node and link, numbers
/// them per type in lexicographic raw-id order and detects the control mode.
Topology classify(const RawTopology& raw, std::uint64_t snapshot_instant = 0);

/// Writes the detected mode into `network.control_mode` and returns it.
ControlMode detect_control_mode(NetworkDescriptor& network, const LinkDescriptor& links);

/// Synthetic topology with zero-padded raw ids, before classification.
RawTopology generate_raw_topology(const TopologyKind& kind, int n_hosts, ControlMode mode);

Topology generate_topology(const TopologyKind& kind, int n_hosts, ControlMode mode);

/// Inverse of classify for round-trip checks: raw ids, link endpoints by raw id.
RawTopology to_raw(const Topology& topology);

/// Fetches a fixture over plain HTTP ("http://host[:port]/path").
std::string fetch_document(const std::string& url, std::chrono::milliseconds timeout);

/// Native-dialect document for a raw topology; parse_dialect(..., Native) reads it back.
std::string raw_to_native_json(const RawTopology& raw);

std::string descriptor_to_json(const Topology& topology);
Topology descriptor_from_json(std::string_view document);

}  // namespace netdiag
