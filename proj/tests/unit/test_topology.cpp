#include <gtest/gtest.h>

#include <thread>

#include <httplib.h>

#include "support.hpp"

using namespace netdiag;
using testutil::error_of;
using testutil::fixture;

namespace {

std::map<ElementType, std::size_t> census(const Topology& t) {
  std::map<ElementType, std::size_t> out;
  for (auto type : {ElementType::Controller, ElementType::MasterSwitch, ElementType::SlaveSwitch,
                    ElementType::Host, ElementType::ControlLink, ElementType::AccessLink,
                    ElementType::InterSwitchLink}) {
    out[type] = t.network.count(type);
  }
  return out;
}

using C = std::map<ElementType, std::size_t>;

C make_census(std::size_t c, std::size_t ms, std::size_t ss, std::size_t h, std::size_t cl,
              std::size_t al, std::size_t il) {
  return {{ElementType::Controller, c},  {ElementType::MasterSwitch, ms}, {ElementType::SlaveSwitch, ss},
          {ElementType::Host, h},        {ElementType::ControlLink, cl},  {ElementType::AccessLink, al},
          {ElementType::InterSwitchLink, il}};
}

}  // namespace

TEST(Classify, OutOfBandTwoSwitches) {
  const auto t = testutil::fig5a();
  EXPECT_EQ(census(t), make_census(1, 2, 0, 2, 2, 2, 1));
  EXPECT_EQ(t.network.control_mode, ControlMode::OutOfBand);
}

TEST(Classify, InBandSingleControlLink) {
  const auto t = testutil::fig5b();
  EXPECT_EQ(census(t), make_census(1, 1, 1, 2, 1, 2, 1));
  EXPECT_EQ(t.network.control_mode, ControlMode::InBand);
}

TEST(Classify, NumbersByRawIdWithinType) {
  const auto t = testutil::fig5a();
  ASSERT_NE(t.network.find("MS_1"), nullptr);
  EXPECT_EQ(t.network.find("MS_1")->raw_id, "s1");
  EXPECT_EQ(t.network.find("CL_2")->raw_id, "cl2");
  EXPECT_EQ(t.network.find("H_2")->raw_id, "h2");
  // Descriptor order: C, MS, SS, H, CL, AL, IL.
  std::vector<std::string> ids;
  for (const auto& e : t.network.elements) ids.push_back(e.element_id);
  EXPECT_EQ(ids, (std::vector<std::string>{"C_1", "MS_1", "MS_2", "H_1", "H_2", "CL_1", "CL_2", "AL_1",
                                           "AL_2", "IL_1"}));
}

TEST(Classify, HostsInferredWithoutHints) {
  const auto hinted = testutil::fig5a();
  const auto bare = classify(parse_dialect(fixture("fig5a_unhinted.json"), Dialect::Native));
  EXPECT_EQ(census(bare), census(hinted));
  EXPECT_EQ(bare.links, hinted.links);
}

TEST(Classify, DialectsAgreeOnStructure) {
  const auto native = testutil::fig5a();
  const auto fl = classify(parse_dialect(fixture("fig5a_floodlight.json"), Dialect::Floodlight));
  const auto odl = classify(parse_dialect(fixture("fig5a_opendaylight.json"), Dialect::OpenDaylight));
  for (const auto* t : {&fl, &odl}) {
    EXPECT_EQ(census(*t), census(native));
    EXPECT_EQ(t->network.control_mode, ControlMode::OutOfBand);
    EXPECT_EQ(t->links.degree("MS_1"), 3u);
    EXPECT_EQ(t->links.degree("H_2"), 1u);
  }
}

TEST(Classify, ControllerOverride) {
  const auto raw = parse_dialect(fixture("fig5a_unhinted.json"), Dialect::Native, "c1");
  EXPECT_EQ(raw.controller_id, "c1");
}

TEST(Classify, Errors) {
  EXPECT_EQ(error_of([] { parse_dialect("{\"nodes\": [", Dialect::Native); }), Errc::parse);
  EXPECT_EQ(error_of([] { parse_dialect(R"({"controller": "c", "links": []})", Dialect::Native); }),
            Errc::dialect);
  EXPECT_EQ(error_of([] {
              parse_dialect(R"({"controller": "c", "nodes": [{"id": "c"}],
                               "links": [{"id": "l", "a": "c", "b": "ghost"}]})",
                            Dialect::Native);
            }),
            Errc::referential);

  RawTopology raw;
  raw.controller_id = "c";
  raw.nodes = {{"c", "controller"}, {"s", "switch"}, {"h1", "host"}, {"h2", "host"}};
  raw.links = {{"cl", "c", "s"}, {"a1", "s", "h1"}, {"hh", "h1", "h2"}};
  EXPECT_EQ(error_of([&] { classify(raw); }), Errc::classification);

  raw.links = {{"cl", "c", "s"}, {"a1", "s", "h1"}};
  EXPECT_EQ(error_of([&] { classify(raw); }), Errc::isolation);

  raw.nodes = {{"c", "controller"}, {"s", "switch"}, {"h1", "host"}};
  raw.links = {{"cl", "c", "s"}, {"a1", "s", "h1"}, {"x", "c2", "s"}};
  raw.nodes.push_back({"c2", "controller"});
  EXPECT_EQ(error_of([&] { classify(raw); }), Errc::unsupported_topology);

  raw.nodes = {{"c", "controller"}, {"s", "switch"}, {"h1", "host"}};
  raw.links = {{"a1", "s", "h1"}, {"ch", "c", "h1"}};
  EXPECT_EQ(error_of([&] { classify(raw); }), Errc::classification);
}

TEST(ControlMode, NoControlPathAndPartition) {
  RawTopology raw;
  raw.controller_id = "c";
  raw.nodes = {{"c", "controller"}, {"s1", "switch"}, {"s2", "switch"}, {"h1", "host"}, {"h2", "host"}};
  raw.links = {{"a1", "s1", "h1"}, {"a2", "s2", "h2"}, {"i", "s1", "s2"}};
  EXPECT_EQ(error_of([&] { classify(raw); }), Errc::no_control_path);

  RawTopology part;
  part.controller_id = "c";
  part.nodes = {{"c", "controller"}, {"s1", "switch"}, {"s2", "switch"}, {"s3", "switch"},
                {"h1", "host"},      {"h2", "host"},    {"h3", "host"}};
  part.links = {{"cl", "c", "s1"}, {"a1", "s1", "h1"}, {"a2", "s2", "h2"}, {"a3", "s3", "h3"},
                {"i", "s2", "s3"}};
  EXPECT_EQ(error_of([&] { classify(part); }), Errc::partitioned_control);
}

TEST(Generate, ShapesAndCounts) {
  for (int n : {1, 3, 7}) {
    const auto t = generate_topology(TopologyKind::linear(), n, ControlMode::OutOfBand);
    const auto switches = t.network.count(ElementType::MasterSwitch) + t.network.count(ElementType::SlaveSwitch);
    EXPECT_EQ(switches, static_cast<std::size_t>(n));
    EXPECT_EQ(t.network.elements.size(), 3 * switches + 2 * static_cast<std::size_t>(n));
  }
  const auto star = generate_topology(TopologyKind::star(), 1, ControlMode::OutOfBand);
  EXPECT_EQ(census(star), make_census(1, 1, 0, 1, 1, 1, 0));

  const auto tree = generate_topology(TopologyKind::tree_for_hosts(8), 8, ControlMode::OutOfBand);
  EXPECT_EQ(tree.network.count(ElementType::MasterSwitch), 7u);
  EXPECT_EQ(tree.network.count(ElementType::Host), 8u);

  const auto ring = generate_topology(TopologyKind::ring(), 4, ControlMode::InBand);
  EXPECT_EQ(ring.network.count(ElementType::InterSwitchLink), 4u);
  EXPECT_EQ(ring.network.count(ElementType::ControlLink), 1u);
  EXPECT_EQ(ring.network.control_mode, ControlMode::InBand);

  EXPECT_EQ(error_of([] { TopologyKind::tree(1, 2); }), Errc::shape);
  EXPECT_EQ(error_of([] { generate_topology(TopologyKind::tree(2, 3), 6, ControlMode::OutOfBand); }),
            Errc::shape);
}

TEST(Generate, RawRoundTrip) {
  const auto t = generate_topology(TopologyKind::tree_for_hosts(4), 4, ControlMode::InBand);
  const auto again = classify(to_raw(t));
  EXPECT_EQ(again.network, t.network);
  EXPECT_EQ(again.links, t.links);
  const auto native = parse_dialect(raw_to_native_json(to_raw(t)), Dialect::Native);
  EXPECT_EQ(classify(native).network, t.network);
}

TEST(Descriptor, JsonRoundTrip) {
  auto t = testutil::fig5b();
  t.network.snapshot_instant = 42;
  const auto text = descriptor_to_json(t);
  const auto back = descriptor_from_json(text);
  EXPECT_EQ(back.network, t.network);
  EXPECT_EQ(back.links, t.links);
  EXPECT_EQ(descriptor_to_json(back), text);
}

TEST(Fetch, UrlMatchesFile) {
  const auto body = fixture("fig5a.json");
  httplib::Server server;
  server.Get("/topology", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content(body, "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  const auto url = "http://127.0.0.1:" + std::to_string(port) + "/topology";
  const auto fetched = fetch_document(url, std::chrono::seconds(2));
  EXPECT_EQ(fetched, body);
  EXPECT_EQ(error_of([&] { fetch_document(url + "-missing", std::chrono::seconds(2)); }), Errc::io);
  EXPECT_EQ(error_of([] { fetch_document("ftp://example/x", std::chrono::seconds(1)); }), Errc::io);

  server.stop();
  worker.join();
}
