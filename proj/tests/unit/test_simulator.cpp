#include <gtest/gtest.h>

#include <algorithm>

#include "support.hpp"

using namespace netdiag;
using testutil::error_of;

namespace {

DependencyGraph fig5a_graph() { return build_model(testutil::fig5a(), TemplateProfile::degree_adaptive()); }

std::vector<std::string> down_labels(const GroundTruth& t) {
  std::vector<std::string> out;
  for (const auto& [label, s] : t.vertex_states) {
    if (s == State::Down) out.push_back(label);
  }
  return out;
}

}  // namespace

TEST(Inject, ControllerShutdown) {
  const auto g = fig5a_graph();
  const auto t = inject(g, {{{"C_1", FaultMode::NodeShutdown}}, 0});
  EXPECT_EQ(down_labels(t), (std::vector<std::string>{"C_1.ACT_1", "C_1.CONF_1", "C_1.CPU_1", "C_1.NC_1",
                                                      "C_1.NC_2", "C_1.PROC_1"}));
  EXPECT_EQ(t.vertex_states.at("CL_1.LINK_1"), State::Up);
}

TEST(Inject, ThreeLinkCut) {
  const auto g = fig5a_graph();
  const auto t = inject(g, {{{"CL_1", FaultMode::LinkCut}, {"AL_1", FaultMode::LinkCut}, {"AL_2", FaultMode::LinkCut}}, 0});
  const auto down = down_labels(t);
  EXPECT_EQ(down.size(), 9u);
  const auto nics = std::count_if(down.begin(), down.end(), [](const std::string& l) {
    return l.find(".NC_") != std::string::npos;
  });
  EXPECT_EQ(nics, 6);
  const auto obs = synthesize_observations(t, g);
  EXPECT_EQ(std::count_if(obs.nic_states.begin(), obs.nic_states.end(),
                          [](const auto& kv) { return kv.second == State::Down; }),
            6);
}

TEST(Inject, SoundPropagation) {
  // Replaying the rule: a vertex is down iff forced or a parent is down.
  const auto g = fig5a_graph();
  const auto t = inject(g, {{{"MS_1", FaultMode::NodeShutdown}, {"IL_1", FaultMode::LinkCut}}, 0});
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& v = g.vertex(i);
    const bool forced = v.owner == "MS_1" || v.owner == "IL_1";
    const auto parents = g.parents(i);
    const bool parent_down = std::any_of(parents.begin(), parents.end(), [&](std::size_t p) {
      return t.vertex_states.at(g.vertex(p).label) == State::Down;
    });
    EXPECT_EQ(t.vertex_states.at(v.label) == State::Down, forced || parent_down) << v.label;
  }
}

TEST(Inject, CpuLoadAndErrors) {
  const auto g = fig5a_graph();
  const auto t = inject(g, {{{"C_1", FaultMode::CpuLoad, 0.95}}, 0});
  EXPECT_TRUE(down_labels(t).empty());
  EXPECT_EQ(t.cpu_loads.at("C_1.CPU_1"), 0.95);
  EXPECT_TRUE(down_labels(inject(g, {})).empty());
  EXPECT_EQ(error_of([&] { inject(g, {{{"X_9", FaultMode::NodeShutdown}}, 0}); }), Errc::scenario);
  EXPECT_EQ(error_of([&] { inject(g, {{{"CL_1", FaultMode::NodeShutdown}}, 0}); }), Errc::scenario);
  EXPECT_EQ(error_of([&] { inject(g, {{{"C_1", FaultMode::LinkCut}}, 0}); }), Errc::scenario);
  EXPECT_EQ(error_of([&] { inject(g, {{{"C_1", FaultMode::CpuLoad, 1.5}}, 0}); }), Errc::scenario);
  EXPECT_EQ(error_of([&] {
              inject(g, {{{"C_1", FaultMode::CpuLoad, 0.5}, {"C_1", FaultMode::NodeShutdown}}, 0});
            }),
            Errc::scenario);
}

TEST(Observe, SampledLimits) {
  const auto g = fig5a_graph();
  const auto t = inject(g, {{{"AL_1", FaultMode::LinkCut}}, 0});
  EXPECT_TRUE(synthesize_observations(t, g, Visibility::sampled(0.0, 3)).nic_states.empty());
  EXPECT_EQ(synthesize_observations(t, g, Visibility::sampled(1.0, 3)), synthesize_observations(t, g));
  const auto half = synthesize_observations(t, g, Visibility::sampled(0.5, 3));
  EXPECT_EQ(half, synthesize_observations(t, g, Visibility::sampled(0.5, 3)));
}

TEST(Random, DeterministicDraws) {
  std::uint64_t a = 99, b = 99;
  for (int i = 0; i < 100; ++i) {
    const auto x = uniform_below(a, 7);
    EXPECT_EQ(x, uniform_below(b, 7));
    EXPECT_LT(x, 7u);
    const double u = uniform_unit(a);
    EXPECT_EQ(u, uniform_unit(b));
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(CpuLoad, FixedAndDrawn) {
  const auto g = fig5a_graph();
  const auto obs = cpu_load_observations(g, {{"H_2", 0.95}}, 5);
  EXPECT_EQ(obs.cpu_utilization.size(), 5u);
  EXPECT_EQ(obs.cpu_utilization.at("H_2.CPU_1"), 0.95);
  for (const auto& [label, u] : obs.cpu_utilization) {
    EXPECT_GE(u, 0.05);
    EXPECT_LE(u, 0.95);
  }
  EXPECT_EQ(obs, cpu_load_observations(g, {{"H_2", 0.95}}, 5));
}

TEST(Campaign, EmptyAndReproducible) {
  const auto empty = run_campaign(CampaignConfig::from_json(testutil::fixture("campaign_empty.json")));
  EXPECT_EQ(empty.trials, 0u);
  EXPECT_FALSE(empty.top1_accuracy.has_value());
  EXPECT_NE(campaign_report_to_json(empty).find("\"top1_accuracy\": null"), std::string::npos);

  CampaignConfig c;
  c.shapes = {TopologyKind::linear(), TopologyKind::ring()};
  c.n_hosts = {4, 8};
  c.trials_per_cell = 6;
  c.seed = 11;
  c.threads = 1;
  const auto one = campaign_report_to_json(run_campaign(c));
  c.threads = 3;
  EXPECT_EQ(campaign_report_to_json(run_campaign(c)), one);
  const auto r = run_campaign(c);
  EXPECT_EQ(r.trials, 24u);
  std::size_t sum = 0;
  for (const auto& cell : r.breakdown) sum += cell.trials;
  EXPECT_EQ(sum, r.trials);
  EXPECT_GE(*r.top1_accuracy, 0.95);
  c.seed = 12;
  EXPECT_NE(campaign_report_to_json(run_campaign(c)), one);
}

TEST(Campaign, ConfigErrors) {
  EXPECT_EQ(error_of([] { CampaignConfig::from_json(R"({"shapes": ["blob"]})"); }), Errc::shape);
  EXPECT_EQ(error_of([] { CampaignConfig::from_json(R"({"fault_modes": ["cpu-load"]})"); }), Errc::config);
  EXPECT_EQ(error_of([] { CampaignConfig::from_json("{"); }), Errc::parse);
}

TEST(Bench, SingleRepetition) {
  BenchConfig c;
  c.repetitions = 1;
  c.max_elements = 60;
  const auto rows = benchmark_build(c);
  ASSERT_FALSE(rows.empty());
  EXPECT_EQ(rows.front().n_elements, 15);
  for (const auto& r : rows) {
    EXPECT_EQ(r.min_ms, r.max_ms);
    EXPECT_EQ(r.mean_ms, r.min_ms);
    EXPECT_LE(r.n_elements, 60);
  }
  EXPECT_TRUE(std::is_sorted(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
    return a.kind != b.kind ? a.kind < b.kind : a.n_elements < b.n_elements;
  }));
  const auto csv = bench_to_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "kind,n_hosts,n_switches,n_elements,vertices,repetitions,mean_ms,min_ms,max_ms");
}
