#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "mecplan/error.h"
#include "mecplan/generator.h"
#include "mecplan/linkgraph.h"
#include "test_support.h"

namespace mecplan {
namespace {

using testing::MakeInstance;

TEST(LinkGraph, RateAtReferenceDistance) {
  Instance inst = MakeInstance({{0, 0, 1, 0, false}, {50, 0, 1, 0, true}}, {});
  const LinkGraph g = BuildLinkGraph(inst);
  EXPECT_DOUBLE_EQ(g.rate(0, 1), inst.link_model.rate_at_reference);
  EXPECT_TRUE(g.delta(0, 1));
  EXPECT_TRUE(g.delta(1, 0));
  EXPECT_FALSE(g.delta(0, 0));
}

TEST(LinkGraph, PowerLawBeyondReferenceAndCapBelow) {
  const LinkModelConfig cfg;
  EXPECT_DOUBLE_EQ(ModeledRate(cfg, 100.0),
                   cfg.rate_at_reference * std::pow(50.0 / 100.0, 2.0));
  EXPECT_DOUBLE_EQ(ModeledRate(cfg, 10.0), cfg.rate_at_reference);
}

TEST(LinkGraph, OutOfRangePairHasNoLinks) {
  Instance inst = MakeInstance({{0, 0, 2, 0, false}, {500, 0, 2, 0, true}}, {});
  const LinkGraph g = BuildLinkGraph(inst);
  EXPECT_FALSE(g.delta(0, 1));
  EXPECT_TRUE(g.candidate_links().empty());
}

TEST(LinkGraph, CandidateCountForThreeMutualStations) {
  Instance inst = MakeInstance(
      {{0, 0, 2, 0, false}, {60, 0, 2, 0, false}, {30, 50, 2, 0, true}}, {});
  const LinkGraph g = BuildLinkGraph(inst);
  EXPECT_EQ(g.candidate_links().size(), 24u);
  // Same count by listing every interface pair directly.
  std::set<Link> listed;
  for (int n = 0; n < 3; ++n)
    for (int m = 0; m < 3; ++m)
      if (n != m)
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) listed.insert(Link{n, i, m, j});
  EXPECT_EQ(std::set<Link>(g.candidate_links().begin(), g.candidate_links().end()),
            listed);
}

TEST(LinkGraph, CandidateCountMatchesInterfaceProducts) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    GeneratorConfig cfg;
    cfg.seed = seed;
    cfg.num_tasks = 0;
    cfg.num_bs = 5;
    cfg.interfaces = 1 + static_cast<int>(seed % 3);
    const Instance inst = GenerateInstance(cfg);
    const LinkGraph g = BuildLinkGraph(inst);
    std::size_t expected = 0;
    for (int n = 0; n < g.num_bs(); ++n)
      for (int m = 0; m < g.num_bs(); ++m)
        if (g.delta(n, m)) expected += g.interfaces(n) * g.interfaces(m);
    EXPECT_EQ(g.candidate_links().size(), expected);
    for (const Link& l : g.candidate_links()) {
      EXPECT_TRUE(g.delta(l.from, l.to));
      EXPECT_GT(g.rate(l.from, l.to), 0.0);
    }
  }
}

TEST(LinkGraph, CoincidentStationsThrow) {
  Instance inst = MakeInstance({{5, 5, 1, 0, false}, {5, 5, 1, 0, true}}, {});
  try {
    BuildLinkGraph(inst);
    FAIL() << "expected CoincidentBS";
  } catch (const PlanningError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCoincidentBs);
  }
}

TEST(LinkGraph, LongerRangeNeverRemovesLinks) {
  for (int trial = 0; trial < 20; ++trial) {
    GeneratorConfig cfg;
    cfg.seed = 100 + trial;
    cfg.num_tasks = 0;
    Instance inst = GenerateInstance(cfg);
    const LinkGraph before = BuildLinkGraph(inst);
    inst.link_model.max_range_m *= 1.5;
    const LinkGraph after = BuildLinkGraph(inst);
    for (const Link& l : before.candidate_links()) EXPECT_TRUE(after.IsCandidate(l));
  }
}

TEST(LinkGraph, CloserStationsNeverSlower) {
  const LinkModelConfig cfg;
  double previous = 0.0;
  for (double d = 400.0; d > 1.0; d -= 7.5) {
    const double r = ModeledRate(cfg, d);
    EXPECT_GE(r, previous);
    previous = r;
  }
}

TEST(OverrideRates, IdenticalTableIsIdentity) {
  const Instance inst = GenerateInstance(GeneratorConfig{});
  const LinkGraph g = BuildLinkGraph(inst);
  EXPECT_EQ(OverrideRates(g, g.RateTable()), g);
}

TEST(OverrideRates, BelowFloorRemovesLink) {
  Instance inst = MakeInstance({{0, 0, 1, 0, false}, {50, 0, 1, 0, true}}, {});
  const LinkGraph g = BuildLinkGraph(inst);
  auto table = g.RateTable();
  table[0][1] = table[1][0] = 0.5 * g.rate_floor();
  const LinkGraph h = OverrideRates(g, table);
  EXPECT_FALSE(h.delta(0, 1));
  EXPECT_TRUE(h.candidate_links().empty());
}

TEST(OverrideRates, PinnedRateReproducesOneHopLatency) {
  // xi R chosen so that 1.28 GB crosses the link in 1.27 s.
  Instance inst = MakeInstance({{0, 0, 1, 0, false}, {50, 0, 1, 0, true}}, {});
  const double xi = inst.saturation;
  const double target = 1.28 * kBytesPerGigabyte / 1.27 / xi;
  auto table = BuildLinkGraph(inst).RateTable();
  table[0][1] = table[1][0] = target;
  const LinkGraph h = OverrideRates(BuildLinkGraph(inst), table);
  EXPECT_NEAR(1.28 * kBytesPerGigabyte / (xi * h.rate(0, 1)), 1.27, 1e-12);
}

TEST(OverrideRates, RejectsBadShapes) {
  const Instance inst = GenerateInstance(GeneratorConfig{});
  const LinkGraph g = BuildLinkGraph(inst);
  auto expect_shape_error = [&](const std::vector<std::vector<double>>& t) {
    try {
      OverrideRates(g, t);
      ADD_FAILURE() << "expected ShapeMismatch";
    } catch (const PlanningError& e) {
      EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
    }
  };
  auto table = g.RateTable();
  table.pop_back();
  expect_shape_error(table);
  table = g.RateTable();
  table[0][1] *= 1.01;
  expect_shape_error(table);
  table = g.RateTable();
  table[0][1] = table[1][0] = -1.0;
  expect_shape_error(table);
}

TEST(BuildInstanceGraph, AppliesOverrides) {
  const Instance inst = testing::SixStationInstance();
  const LinkGraph g = BuildInstanceGraph(inst);
  int feasible_pairs = 0;
  for (int n = 0; n < 6; ++n)
    for (int m = n + 1; m < 6; ++m) feasible_pairs += g.delta(n, m) ? 1 : 0;
  EXPECT_EQ(feasible_pairs, 5);
  EXPECT_TRUE(g.delta(1, 2));
  EXPECT_NEAR(inst.saturation * g.rate(1, 2) / kBytesPerGigabyte, 1.007874, 1e-9);
}

}  // namespace
}  // namespace mecplan
