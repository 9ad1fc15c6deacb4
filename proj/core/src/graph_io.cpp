#include <sstream>

#include <json.hpp>

#include "netdiag/error.hpp"
#include "netdiag/graph.hpp"

namespace netdiag {

namespace {

using ojson = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string to_dot(const DependencyGraph& g) {
  std::ostringstream os;
  os << "digraph dependency_graph {\n";
  os << "  node [shape=box];\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& v = g.vertex(i);
    os << "  v" << i << " [label=\"" << dot_escape(v.label) << "\", layer=\"" << layer_name(v.layer)
       << "\"];\n";
  }
  for (const auto& e : g.edges()) {
    os << "  v" << e.from << " -> v" << e.to << " [style="
       << (e.cls == EdgeClass::Inside ? "dashed" : "solid") << "];\n";
  }
  os << "}\n";
  return os.str();
}

std::string to_json(const DependencyGraph& g) {
  ojson doc;
  doc["schema_version"] = kSchemaVersion;
  doc["sorted"] = g.sorted();
  doc["shared_nic_owners"] = g.shared_nic_owners();
  auto& vertices = doc["vertices"] = ojson::array();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& v = g.vertex(i);
    ojson item;
    item["index"] = i;
    item["label"] = v.label;
    item["kind"] = kind_name(v.kind);
    item["layer"] = layer_name(v.layer);
    item["owner"] = v.owner;
    item["owner_type"] = type_name(v.owner_type);
    item["fragment"] = v.fragment;
    item["local_index"] = v.local_index;
    vertices.push_back(std::move(item));
  }
  auto& edges = doc["edges"] = ojson::array();
  for (const auto& e : g.edges()) {
    ojson item;
    item["from"] = e.from;
    item["to"] = e.to;
    item["class"] = e.cls == EdgeClass::Inside ? "inside" : "inter";
    edges.push_back(std::move(item));
  }
  return doc.dump(2) + "\n";
}

}  // namespace

std::string export_graph(const DependencyGraph& g, ExportFormat format) {
  return format == ExportFormat::Dot ? to_dot(g) : to_json(g);
}

DependencyGraph import_graph_json(std::string_view document) {
  ojson doc;
  try {
    doc = ojson::parse(document.begin(), document.end());
  } catch (const ojson::parse_error& e) {
    fail(Errc::parse, "malformed model JSON at byte " + std::to_string(e.byte));
  }
  try {
    const int version = doc.at("schema_version").get<int>();
    if (version != kSchemaVersion) {
      fail(Errc::parse, "unsupported model schema_version " + std::to_string(version));
    }
    std::vector<Vertex> vertices;
    for (const auto& item : doc.at("vertices")) {
      if (item.at("index").get<std::size_t>() != vertices.size()) {
        fail(Errc::parse, "vertex indices must be listed in order 0..V-1");
      }
      vertices.push_back({item.at("label").get<std::string>(),
                          parse_kind(item.at("kind").get<std::string>()),
                          parse_layer(item.at("layer").get<std::string>()),
                          item.at("owner").get<std::string>(),
                          parse_element_type(item.at("owner_type").get<std::string>()),
                          item.at("fragment").get<int>(), item.at("local_index").get<int>()});
    }
    std::vector<Edge> edges;
    for (const auto& item : doc.at("edges")) {
      const auto cls = item.at("class").get<std::string>();
      if (cls != "inside" && cls != "inter") fail(Errc::parse, "unknown edge class '" + cls + "'");
      edges.push_back({item.at("from").get<std::size_t>(), item.at("to").get<std::size_t>(),
                       cls == "inside" ? EdgeClass::Inside : EdgeClass::Inter});
    }
    std::set<std::string> shared;
    if (doc.contains("shared_nic_owners")) {
      shared = doc.at("shared_nic_owners").get<std::set<std::string>>();
    }
    return DependencyGraph::from_parts(std::move(vertices), std::move(edges),
                                       doc.at("sorted").get<bool>(), std::move(shared));
  } catch (const ojson::exception& e) {
    fail(Errc::parse, std::string("invalid model JSON: ") + e.what());
  }
}

}  // namespace netdiag
