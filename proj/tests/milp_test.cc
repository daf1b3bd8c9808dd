#include <gtest/gtest.h>

#include <cmath>

#include "mecplan/brute_force.h"
#include "mecplan/generator.h"
#include "mecplan/linkgraph.h"
#include "mecplan/lp_format.h"
#include "mecplan/milp.h"
#include "mecplan/pipeline.h"
#include "test_support.h"

namespace mecplan {
namespace {

using testing::MakeInstance;
using testing::TinyConfig;

double RelDiff(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

TEST(BuildP1, VariableCountsForTwoStations) {
  const Instance inst = MakeInstance({{0, 0, 1, 1.0, false}, {80, 0, 1, 0, true}},
                                     {{0.5, 1}});
  const MilpModel model = BuildP1(inst, BuildInstanceGraph(inst));
  EXPECT_EQ(model.CountFamily(VarFamily::kX), 2);
  EXPECT_EQ(model.CountFamily(VarFamily::kXb), 2);
  EXPECT_EQ(model.CountFamily(VarFamily::kY), 3);
  EXPECT_EQ(model.CountFamily(VarFamily::kW), 1);
  EXPECT_EQ(model.CountFamily(VarFamily::kZ), 2);
  EXPECT_EQ(model.CountFamily(VarFamily::kU), 2);
  EXPECT_EQ(model.CountRows(row_tag::kPairLink), 2);  // one per direction
  EXPECT_EQ(model.CountRows(row_tag::kProcessAll), 1);
}

TEST(SolveP1, NoTasksCostsNothing) {
  const Instance inst = MakeInstance({{0, 0, 2, 1.0, false}, {80, 0, 2, 0, true}}, {});
  const SolveOutcome out = SolveP1(BuildP1(inst, BuildInstanceGraph(inst)));
  ASSERT_EQ(out.status, SolveStatus::kOptimal);
  EXPECT_EQ(out.objective_value, 0.0);
  ASSERT_TRUE(out.plan);
  EXPECT_TRUE(out.plan->links.empty());
}

TEST(SolveP1, LocalServerNeedsNoLinks) {
  const Instance inst = MakeInstance({{0, 0, 2, 5.0, true}, {80, 0, 2, 0, false}},
                                     {{1.0, 0}, {0.4, 0}});
  const SolveOutcome out = SolveP1(BuildP1(inst, BuildInstanceGraph(inst)));
  ASSERT_EQ(out.status, SolveStatus::kOptimal);
  EXPECT_NEAR(out.objective_value, 0.0, 1e-12);
  ASSERT_TRUE(out.plan);
  EXPECT_TRUE(out.plan->links.empty());
  for (const TaskRoute& r : out.plan->routes) EXPECT_EQ(r.site, ServingSite::AtBs(0));
}

TEST(SolveP1, MatchesBruteForceOnTinyInstances) {
  int compared = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Instance inst = GenerateInstance(TinyConfig(seed));
    const LinkGraph graph = BuildInstanceGraph(inst);
    const SolveOutcome brute = BruteForcePlan(inst, graph);
    const SolveOutcome milp = SolveP1(BuildP1(inst, graph));
    ASSERT_EQ(milp.status, SolveStatus::kOptimal) << "seed " << seed;
    ASSERT_TRUE(milp.plan);
    EXPECT_LE(RelDiff(milp.objective_value, brute.objective_value), 1e-9)
        << "seed " << seed;
    EXPECT_TRUE(ValidatePlan(inst, graph, *milp.plan).empty()) << "seed " << seed;
    ++compared;
  }
  EXPECT_EQ(compared, 40);
}

TEST(SolveP1, EncodedOptimumSatisfiesEveryRow) {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const Instance inst = GenerateInstance(TinyConfig(seed));
    const LinkGraph graph = BuildInstanceGraph(inst);
    const MilpModel model = BuildP1(inst, graph);
    const SolveOutcome out = SolveP1(model);
    ASSERT_TRUE(out.plan);
    const auto point = EncodePlan(model, *out.plan);
    ASSERT_TRUE(point) << "seed " << seed;
    EXPECT_TRUE(ViolatedRows(model, *point).empty()) << "seed " << seed;
    EXPECT_LE(RelDiff(ObjectiveValue(model, *point), out.objective_value), 1e-9);
    const auto decoded = DecodePlan(model, *point);
    ASSERT_TRUE(decoded);
    EXPECT_EQ(decoded->links, out.plan->links);
    // The Step-1 objective is the equal-share latency of the plan.
    EXPECT_LE(RelDiff(ComputeTotals(*out.plan, inst, graph).step1_objective,
                      out.objective_value),
              1e-9);
  }
}

TEST(SolveLpRelaxation, RootBoundsTheOptimum) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Instance inst = GenerateInstance(TinyConfig(seed));
    const MilpModel model = BuildP1(inst, BuildInstanceGraph(inst));
    const LpRelaxation root = SolveLpRelaxation(model, {});
    ASSERT_TRUE(root.feasible);
    const SolveOutcome out = SolveP1(model);
    EXPECT_LE(root.value, out.objective_value * (1 + 1e-9) + 1e-12) << "seed " << seed;
  }
}

TEST(SolveLpRelaxation, FixingEveryBranchVariableGivesPlanLatency) {
  for (std::uint64_t seed = 3; seed <= 12; ++seed) {
    const Instance inst = GenerateInstance(TinyConfig(seed));
    const MilpModel model = BuildP1(inst, BuildInstanceGraph(inst));
    const SolveOutcome out = SolveP1(model);
    const auto point = EncodePlan(model, *out.plan);
    ASSERT_TRUE(point);
    std::vector<Fixing> fixings;
    for (int v = 0; v < model.num_variables(); ++v) {
      if (model.variables()[v].binary) fixings.push_back({v, (*point)[v]});
    }
    const LpRelaxation lp = SolveLpRelaxation(model, fixings);
    ASSERT_TRUE(lp.feasible);
    EXPECT_LE(RelDiff(lp.value, out.objective_value), 1e-9) << "seed " << seed;
  }
}

TEST(SolveLpRelaxation, ContradictoryFixingIsInfeasible) {
  const Instance inst = MakeInstance({{0, 0, 1, 0, false}, {80, 0, 1, 0, true}},
                                     {{0.5, 0}});
  const MilpModel model = BuildP1(inst, BuildInstanceGraph(inst));
  // The task travels on link 0 while that link is not established.
  const std::vector<Fixing> fixings = {{model.x(0), 0.0}, {model.xb(0, 0), 1.0}};
  EXPECT_FALSE(SolveLpRelaxation(model, fixings).feasible);
}

TEST(SolveP1, DeterministicAcrossRuns) {
  const Instance inst = GenerateInstance(testing::SmallConfig(5));
  const MilpModel model = BuildP1(inst, BuildInstanceGraph(inst));
  const SolveOutcome a = SolveP1(model);
  const SolveOutcome b = SolveP1(model);
  ASSERT_TRUE(a.plan && b.plan);
  EXPECT_EQ(a.plan->links, b.plan->links);
  EXPECT_EQ(a.nodes_explored, b.nodes_explored);
  EXPECT_EQ(a.objective_value, b.objective_value);
}

TEST(SolveP1, ChildBoundsNeverDropBelowParents) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Instance inst = GenerateInstance(testing::SmallConfig(seed));
    const SolveOutcome out = SolveP1(BuildP1(inst, BuildInstanceGraph(inst)));
    EXPECT_LE(out.worst_bound_drop, 1e-7) << "seed " << seed;
  }
}

TEST(SolveP1, NodeLimitReportsGap) {
  const Instance inst = GenerateInstance(GeneratorConfig{});
  SolveLimits limits;
  limits.node_limit = 1;
  const SolveOutcome out = SolveP1(BuildP1(inst, BuildInstanceGraph(inst)), limits);
  if (out.status == SolveStatus::kOptimal) {
    EXPECT_EQ(out.gap, 0.0);
  } else {
    ASSERT_EQ(out.status, SolveStatus::kTimeLimitWithGap);
    EXPECT_GT(out.gap, 0.0);
  }
  EXPECT_LE(out.nodes_explored, 2);
}

TEST(WriteLpFormat, StableAndComplete) {
  const Instance inst = GenerateInstance(TinyConfig(7));
  const MilpModel model = BuildP1(inst, BuildInstanceGraph(inst));
  const std::string a = WriteLpFormat(model);
  EXPECT_EQ(a, WriteLpFormat(BuildP1(inst, BuildInstanceGraph(inst))));
  for (const char* section : {"Minimize", "Subject To", "Bounds", "Binaries", "End"}) {
    EXPECT_NE(a.find(section), std::string::npos) << section;
  }
}

}  // namespace
}  // namespace mecplan
