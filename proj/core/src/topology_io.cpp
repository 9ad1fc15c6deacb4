#include <set>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "netdiag/error.hpp"
#include "netdiag/topology.hpp"

namespace netdiag {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

json parse_json(std::string_view document) {
  try {
    return json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    fail(Errc::parse, "malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

// Walks a document, naming the first missing or mistyped field.
const json& field(const json& parent, const char* key, const std::string& path) {
  if (!parent.is_object() || !parent.contains(key)) {
    fail(Errc::dialect, "missing field '" + path + key + "'");
  }
  return parent.at(key);
}

const json& array_field(const json& parent, const char* key, const std::string& path) {
  const auto& v = field(parent, key, path);
  if (!v.is_array()) fail(Errc::dialect, "field '" + path + key + "' must be an array");
  return v;
}

std::string string_field(const json& parent, const char* key, const std::string& path) {
  const auto& v = field(parent, key, path);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  fail(Errc::dialect, "field '" + path + key + "' must be a string");
}

RawTopology parse_native(const json& doc) {
  RawTopology raw;
  raw.source_dialect = Dialect::Native;
  raw.controller_id = string_field(doc, "controller", "");
  for (const auto& n : array_field(doc, "nodes", "")) {
    RawNode node{string_field(n, "id", "nodes[]."), std::nullopt};
    if (n.contains("kind")) node.kind_hint = string_field(n, "kind", "nodes[].");
    raw.nodes.push_back(std::move(node));
  }
  for (const auto& l : array_field(doc, "links", "")) {
    raw.links.push_back({string_field(l, "id", "links[]."), string_field(l, "a", "links[]."),
                         string_field(l, "b", "links[].")});
  }
  return raw;
}

RawTopology parse_floodlight(const json& doc) {
  RawTopology raw;
  raw.source_dialect = Dialect::Floodlight;
  const auto& controller = field(doc, "controller", "");
  const auto& switches = array_field(doc, "switches", "");
  const auto& hosts = array_field(doc, "hosts", "");
  const auto& links = array_field(doc, "links", "");

  raw.controller_id = string_field(controller, "id", "controller.");
  raw.nodes.push_back({raw.controller_id, "controller"});
  for (const auto& s : switches) {
    raw.nodes.push_back({string_field(s, "switchDPID", "switches[]."), "switch"});
  }
  for (const auto& dpid : array_field(controller, "connected", "controller.")) {
    if (!dpid.is_string()) fail(Errc::dialect, "field 'controller.connected[]' must be a string");
    const auto id = dpid.get<std::string>();
    raw.links.push_back({"ctl-" + id, raw.controller_id, id});
  }
  for (const auto& h : hosts) {
    const auto& macs = array_field(h, "mac", "hosts[].");
    if (macs.empty() || !macs.front().is_string()) {
      fail(Errc::dialect, "field 'hosts[].mac' must hold at least one address");
    }
    const auto mac = macs.front().get<std::string>();
    raw.nodes.push_back({mac, "host"});
    for (const auto& ap : array_field(h, "attachmentPoint", "hosts[].")) {
      const auto dpid = string_field(ap, "switchDPID", "hosts[].attachmentPoint[].");
      const auto port = string_field(ap, "port", "hosts[].attachmentPoint[].");
      raw.links.push_back({mac + "@" + dpid + ":" + port, dpid, mac});
    }
  }
  for (const auto& l : links) {
    const auto src = string_field(l, "src-switch", "links[].");
    const auto src_port = string_field(l, "src-port", "links[].");
    const auto dst = string_field(l, "dst-switch", "links[].");
    const auto dst_port = string_field(l, "dst-port", "links[].");
    raw.links.push_back({src + ":" + src_port + "-" + dst + ":" + dst_port, src, dst});
  }
  return raw;
}

RawTopology parse_opendaylight(const json& doc) {
  RawTopology raw;
  raw.source_dialect = Dialect::OpenDaylight;
  const auto& topologies = array_field(field(doc, "network-topology", ""), "topology",
                                       "network-topology.");
  if (topologies.empty()) fail(Errc::dialect, "missing field 'network-topology.topology[0]'");
  const auto& topo = topologies.front();
  const std::string path = "network-topology.topology[].";
  const auto& nodes = array_field(topo, "node", path);
  const auto& links = array_field(topo, "link", path);

  for (const auto& n : nodes) {
    RawNode node{string_field(n, "node-id", path + "node[]."), std::nullopt};
    const auto& id = node.raw_id;
    if (id.rfind("openflow:", 0) == 0) {
      node.kind_hint = "switch";
    } else if (id.rfind("host:", 0) == 0) {
      node.kind_hint = "host";
    } else if (id.rfind("controller:", 0) == 0) {
      node.kind_hint = "controller";
      if (raw.controller_id.empty()) raw.controller_id = id;
    }
    raw.nodes.push_back(std::move(node));
  }
  // The controller reports every link once per direction; keep the first.
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& l : links) {
    const auto id = string_field(l, "link-id", path + "link[].");
    const auto src = string_field(field(l, "source", path + "link[]."), "source-node",
                                  path + "link[].source.");
    const auto dst = string_field(field(l, "destination", path + "link[]."), "dest-node",
                                  path + "link[].destination.");
    if (seen.contains({dst, src})) continue;
    seen.insert({src, dst});
    raw.links.push_back({id, src, dst});
  }
  return raw;
}

}  // namespace

RawTopology parse_dialect(std::string_view document, Dialect dialect,
                          std::string_view controller_override) {
  const auto doc = parse_json(document);
  if (!doc.is_object()) fail(Errc::dialect, "top-level value must be an object");
  RawTopology raw;
  switch (dialect) {
    case Dialect::Native: raw = parse_native(doc); break;
    case Dialect::Floodlight: raw = parse_floodlight(doc); break;
    case Dialect::OpenDaylight: raw = parse_opendaylight(doc); break;
  }
  if (!controller_override.empty()) raw.controller_id = std::string(controller_override);
  validate(raw);
  return raw;
}

std::string raw_to_native_json(const RawTopology& raw) {
  ojson doc;
  doc["controller"] = raw.controller_id;
  auto& nodes = doc["nodes"] = ojson::array();
  for (const auto& n : raw.nodes) {
    ojson item;
    item["id"] = n.raw_id;
    if (n.kind_hint) item["kind"] = *n.kind_hint;
    nodes.push_back(std::move(item));
  }
  auto& links = doc["links"] = ojson::array();
  for (const auto& l : raw.links) links.push_back({{"id", l.raw_id}, {"a", l.endpoint_a}, {"b", l.endpoint_b}});
  return doc.dump(2) + "\n";
}

std::string descriptor_to_json(const Topology& topology) {
  ojson doc;
  doc["schema_version"] = 1;
  doc["snapshot_instant"] = topology.network.snapshot_instant;
  doc["control_mode"] = control_mode_name(topology.network.control_mode);
  auto& elements = doc["elements"] = ojson::array();
  for (const auto& e : topology.network.elements) {
    ojson item;
    item["id"] = e.element_id;
    item["raw_id"] = e.raw_id;
    item["type"] = type_name(e.type);
    elements.push_back(std::move(item));
  }
  auto& links = doc["links"] = ojson::array();
  for (const auto& l : topology.links.entries) {
    ojson item;
    item["id"] = l.link_id;
    item["a"] = l.endpoint_a;
    item["b"] = l.endpoint_b;
    links.push_back(std::move(item));
  }
  return doc.dump(2) + "\n";
}

Topology descriptor_from_json(std::string_view document) {
  const auto doc = parse_json(document);
  Topology t;
  if (doc.contains("snapshot_instant")) {
    t.network.snapshot_instant = doc.at("snapshot_instant").get<std::uint64_t>();
  }
  t.network.control_mode = parse_control_mode(string_field(doc, "control_mode", ""));
  for (const auto& e : array_field(doc, "elements", "")) {
    t.network.elements.push_back({string_field(e, "id", "elements[]."),
                                  string_field(e, "raw_id", "elements[]."),
                                  parse_element_type(string_field(e, "type", "elements[]."))});
  }
  for (const auto& l : array_field(doc, "links", "")) {
    t.links.entries.push_back({string_field(l, "id", "links[]."), string_field(l, "a", "links[]."),
                               string_field(l, "b", "links[].")});
  }
  for (const auto& l : t.links.entries) {
    for (const auto* id : {&l.link_id, &l.endpoint_a, &l.endpoint_b}) {
      if (!t.network.find(*id)) {
        fail(Errc::referential, "link '" + l.link_id + "' references unknown element '" + *id + "'");
      }
    }
  }
  return t;
}

std::string fetch_document(const std::string& url, std::chrono::milliseconds timeout) {
  constexpr std::string_view scheme = "http://";
  if (url.rfind(scheme, 0) != 0) fail(Errc::io, "only http:// URLs are supported: " + url);
  const auto rest = url.substr(scheme.size());
  const auto slash = rest.find('/');
  const auto authority = rest.substr(0, slash);
  const auto path = slash == std::string::npos ? std::string("/") : rest.substr(slash);

  httplib::Client client("http://" + authority);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  auto res = client.Get(path);
  if (!res) fail(Errc::io, "GET " + url + " failed: " + httplib::to_string(res.error()));
  if (res->status != 200) {
    fail(Errc::io, "GET " + url + " returned HTTP " + std::to_string(res->status));
  }
  return res->body;
}

}  // namespace netdiag
