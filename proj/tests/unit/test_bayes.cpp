#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace netdiag;
using testutil::error_of;

namespace {

BayesianNetwork chain(double leak) {
  BayesianNetwork bn;
  bn.add_vertex({"A", {}, {leak, {}}, std::nullopt, "x"});
  bn.add_vertex({"B", {0}, {leak, {0.0}}, std::nullopt, "x"});
  bn.add_vertex({"C", {1}, {leak, {0.0}}, std::nullopt, "x"});
  return bn;
}

}  // namespace

TEST(Cpt, NoisyOr) {
  const NoisyOrCpt cpt{0.1, {0.5, 0.2}};
  const std::vector<State> up{State::Up, State::Up}, one{State::Down, State::Up}, both{State::Down, State::Down};
  EXPECT_DOUBLE_EQ(cpt_probability(cpt, up), 0.1);
  EXPECT_DOUBLE_EQ(cpt_probability(cpt, one), 1.0 - 0.9 * 0.5);
  EXPECT_DOUBLE_EQ(cpt_probability(cpt, both), 1.0 - 0.9 * 0.5 * 0.2);
  EXPECT_EQ(error_of([&] { cpt_probability(cpt, std::vector<State>{State::Up}); }), Errc::arity);
}

TEST(Parameters, DefaultsOnFig5a) {
  const auto bn = attach_parameters(build_model(testutil::fig5a(), {}), PriorConfig::defaults());
  ASSERT_EQ(bn.size(), 38u);
  for (const auto& v : bn.vertices()) {
    for (double q : v.cpt.inhibition) EXPECT_EQ(q, 0.0);
    EXPECT_EQ(v.cpt.leak, PriorConfig::defaults().by_kind.at(*v.kind));
  }
}

TEST(Parameters, LabelOverride) {
  const auto g = build_model(testutil::fig5a(), {});
  const auto base = attach_parameters(g, PriorConfig::defaults());
  auto priors = PriorConfig::from_json(R"({"labels": {"C_1.CPU_1": 0.5}})");
  const auto bn = attach_parameters(g, priors);
  std::size_t differing = 0;
  for (std::size_t i = 0; i < bn.size(); ++i) {
    if (!(bn.vertex(i).cpt == base.vertex(i).cpt)) {
      ++differing;
      EXPECT_EQ(bn.vertex(i).label, "C_1.CPU_1");
      EXPECT_EQ(bn.vertex(i).cpt.leak, 0.5);
    }
  }
  EXPECT_EQ(differing, 1u);
  priors.by_label["ghost"] = 0.1;
  EXPECT_EQ(error_of([&] { attach_parameters(g, priors); }), Errc::config);
  EXPECT_EQ(error_of([] { PriorConfig::from_json(R"({"kinds": {"Cpu": 1.5}})"); }), Errc::config);
}

TEST(Inference, HandComputedChain) {
  const auto bn = chain(0.1);
  Evidence ev;
  ev.set_hard("C", State::Down);
  // P(C down) = 1 - 0.9^3 = 0.271; P(A down, C down) = 0.1.
  const double want = 0.1 / 0.271;
  EXPECT_NEAR(enumerate_joint(bn, ev, {"A"}).at("A"), want, 1e-12);
  EXPECT_NEAR(eliminate_variables(bn, ev, {"A"}).at("A"), want, 1e-12);
  EXPECT_NEAR(std::exp(log_evidence_probability(bn, ev)), 0.271, 1e-12);
}

TEST(Inference, SoftEvidenceLimits) {
  const auto bn = chain(0.2);
  Evidence soft, hard;
  soft.set_soft("B", {1.0, 0.0});
  hard.set_hard("B", State::Up);
  EXPECT_NEAR(eliminate_variables(bn, soft, {"A", "C"}).at("A"), eliminate_variables(bn, hard, {"A"}).at("A"),
              1e-12);
  Evidence mixed;
  mixed.set_soft("B", {0.3, 0.7});
  const auto ve = eliminate_variables(bn, mixed, {"A", "B", "C"});
  const auto en = enumerate_joint(bn, mixed, {"A", "B", "C"});
  for (const auto& [k, v] : en) EXPECT_NEAR(ve.at(k), v, 1e-12);
}

TEST(Inference, Contradiction) {
  auto bn = chain(0.0);
  Evidence ev;
  ev.set_hard("C", State::Down);
  EXPECT_EQ(error_of([&] { eliminate_variables(bn, ev, {"A"}); }), Errc::contradiction);
  EXPECT_EQ(error_of([&] { enumerate_joint(bn, ev, {"A"}); }), Errc::contradiction);
}

TEST(Inference, EvidenceConflicts) {
  Evidence ev;
  ev.set_hard("A", State::Down);
  EXPECT_EQ(error_of([&] { ev.set_hard("A", State::Up); }), Errc::config);
  EXPECT_EQ(error_of([&] { ev.set_soft("A", {0.5, 0.5}); }), Errc::config);
  EXPECT_EQ(error_of([&] { ev.set_soft("B", {0.0, 0.0}); }), Errc::config);
  EXPECT_EQ(error_of([&] { eliminate_variables(chain(0.1), ev, {"missing"}); }), Errc::mapping);
}

TEST(Inference, EnumerationCap) {
  BayesianNetwork bn;
  for (int i = 0; i < 21; ++i) bn.add_vertex({"v" + std::to_string(i), {}, {0.1, {}}, std::nullopt, "x"});
  EXPECT_EQ(error_of([&] { enumerate_joint(bn, {}, {"v0"}); }), Errc::size);
  EXPECT_NEAR(eliminate_variables(bn, {}, {"v20"}).at("v20"), 0.1, 1e-15);
}

TEST(Inference, WideParentsAndDisjunction) {
  // One child with nine parents exercises the parent decomposition.
  BayesianNetwork bn;
  std::vector<std::size_t> parents;
  for (int i = 0; i < 9; ++i) parents.push_back(bn.add_vertex({"p" + std::to_string(i), {}, {0.05 + 0.01 * i, {}}, std::nullopt, "x"}));
  std::vector<double> inhibition;
  for (int i = 0; i < 9; ++i) inhibition.push_back(0.1 * i);
  bn.add_vertex({"child", parents, {0.02, inhibition}, std::nullopt, "y"});
  Evidence ev;
  ev.set_hard("child", State::Down);
  std::vector<std::string> q;
  for (int i = 0; i < 9; ++i) q.push_back("p" + std::to_string(i));
  const auto ve = eliminate_variables(bn, ev, q);
  const auto en = enumerate_joint(bn, ev, q);
  for (const auto& [k, v] : en) EXPECT_NEAR(ve.at(k), v, 1e-12);

  BayesianNetwork aug = bn;
  BnVertex any{"any", {0, 1, 2}, {0.0, {0.0, 0.0, 0.0}}, std::nullopt, ""};
  aug.add_vertex(any);
  EXPECT_NEAR(posterior_disjunction(bn, ev, {"p0", "p1", "p2"}), enumerate_joint(aug, ev, {"any"}).at("any"), 1e-12);
}

TEST(Inference, OriginPosteriorsAgreeWithEnumeration) {
  const auto bn = chain(0.1);
  Evidence ev;
  ev.set_hard("C", State::Down);
  const auto origins = origin_posteriors(bn, ev, {"A", "B", "C"});
  // Each vertex fails on its own with prob 0.1; given C down, P(own failure of X) = 0.1 / 0.271.
  for (const auto& [k, v] : origins) EXPECT_NEAR(v, 0.1 / 0.271, 1e-12) << k;
}
