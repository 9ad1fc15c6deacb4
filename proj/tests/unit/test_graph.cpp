#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <regex>

#include "support.hpp"

using namespace netdiag;
using testutil::error_of;

namespace {

DependencyGraph fig5a_model(ProfileMode mode = ProfileMode::TableCompat) {
  return build_model(testutil::fig5a(), {mode});
}

}  // namespace

TEST(Graph, AssembleFig5a) {
  const auto g = assemble(instantiate_all(testutil::fig5a(), TemplateProfile::table_compat()));
  EXPECT_EQ(g.size(), 38u);
  EXPECT_EQ(g.count(EdgeClass::Inter), 0u);
  EXPECT_EQ(error_of([] {
              auto frags = instantiate_all(testutil::fig5a(), TemplateProfile::table_compat());
              frags.push_back(frags.front());
              assemble(frags);
            }),
            Errc::label_collision);
}

TEST(Graph, BuildModelFig5a) {
  const auto g = fig5a_model();
  EXPECT_EQ(g.size(), 38u);
  EXPECT_EQ(g.count(EdgeClass::Inter), 10u);
  EXPECT_TRUE(g.sorted());
  for (const auto& e : g.edges()) EXPECT_LT(e.from, e.to);

  const auto cl = *g.find("CL_1.LINK_1");
  std::vector<std::string> cards;
  for (auto c : g.children(cl)) cards.push_back(g.vertex(c).label);
  std::sort(cards.begin(), cards.end());
  EXPECT_EQ(cards, (std::vector<std::string>{"C_1.NC_1", "MS_1.NC_1"}));
  // The single controller card carries both control links.
  EXPECT_EQ(g.parents(*g.find("C_1.NC_1")).size(), 3u);
  EXPECT_TRUE(g.shared_nic_owners().contains("C_1"));
}

TEST(Graph, InBandHasOneControlLinkVertex) {
  const auto g = build_model(testutil::fig5b(), TemplateProfile::table_compat());
  const auto n = std::count_if(g.vertices().begin(), g.vertices().end(), [](const Vertex& v) {
    return v.owner_type == ElementType::ControlLink;
  });
  EXPECT_EQ(n, 1);
}

TEST(Graph, CapacityError) {
  TemplateProfile tight;
  tight.host_nics = 1;
  tight.switch_nics = 2;
  EXPECT_EQ(error_of([&] { build_model(testutil::fig5a(), tight); }), Errc::capacity);
}

TEST(Graph, TopologicalSortIsIdempotentAndStable) {
  const auto g = fig5a_model(ProfileMode::DegreeAdaptive);
  EXPECT_EQ(topological_sort(g), g);

  // Shuffle vertex indices, then sort again.
  std::vector<std::size_t> perm(g.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::mt19937_64 rng(7);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Vertex> vs(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) vs[perm[i]] = g.vertex(i);
  std::vector<Edge> es;
  for (const auto& e : g.edges()) es.push_back({perm[e.from], perm[e.to], e.cls});
  const auto shuffled = DependencyGraph::from_parts(vs, es, false, g.shared_nic_owners());
  EXPECT_FALSE(shuffled.sorted());
  EXPECT_EQ(topological_sort(shuffled), g);
}

TEST(Graph, CycleIsReported) {
  std::vector<Vertex> vs{{"a.CPU_1", VertexKind::Cpu, LayerTag::Physical, "a", ElementType::Host, 0, 0},
                         {"a.PROC_1", VertexKind::VnfProcess, LayerTag::LogicalInitiated, "a", ElementType::Host, 0, 1}};
  const auto g = DependencyGraph::from_parts(vs, {{0, 1, EdgeClass::Inside}, {1, 0, EdgeClass::Inside}}, false);
  try {
    topological_sort(g);
    FAIL() << "expected a cycle error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::cycle);
    EXPECT_NE(std::string(e.what()).find("a.CPU_1"), std::string::npos);
  }
}

TEST(Graph, RecoversTopology) {
  const auto t = testutil::fig5a();
  for (auto mode : {ProfileMode::TableCompat, ProfileMode::DegreeAdaptive}) {
    const auto back = topology_of(build_model(t, {mode}));
    EXPECT_EQ(back.network.control_mode, ControlMode::OutOfBand);
    EXPECT_EQ(back.network.elements.size(), t.network.elements.size());
    for (const auto& l : t.links.entries) {
      const auto* got = back.links.find(l.link_id);
      ASSERT_NE(got, nullptr);
      auto want = std::minmax(l.endpoint_a, l.endpoint_b);
      EXPECT_EQ(std::minmax(got->endpoint_a, got->endpoint_b), want);
    }
  }
}

TEST(Export, DotShape) {
  const auto dot = export_graph(fig5a_model(), ExportFormat::Dot);
  const std::regex node_stmt(R"(^\s*v\d+ \[label=)");
  std::size_t nodes = 0, dashed = 0, solid = 0;
  std::istringstream in(dot);
  for (std::string line; std::getline(in, line);) {
    if (std::regex_search(line, node_stmt)) ++nodes;
    if (line.find("->") != std::string::npos) {
      (line.find("dashed") != std::string::npos ? dashed : solid) += 1;
    }
  }
  EXPECT_EQ(nodes, 38u);
  EXPECT_EQ(solid, 10u);
  EXPECT_EQ(dashed, fig5a_model().count(EdgeClass::Inside));
}

TEST(Export, JsonRoundTrip) {
  const auto g = fig5a_model(ProfileMode::DegreeAdaptive);
  const auto text = export_graph(g, ExportFormat::Json);
  const auto back = import_graph_json(text);
  EXPECT_EQ(back, g);
  EXPECT_EQ(export_graph(back, ExportFormat::Json), text);
  EXPECT_EQ(error_of([] { import_graph_json("[1, 2"); }), Errc::parse);
}
