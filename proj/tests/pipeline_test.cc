#include <gtest/gtest.h>

#include <cmath>

#include "mecplan/bwalloc.h"
#include "mecplan/error.h"
#include "mecplan/linkgraph.h"
#include "mecplan/pipeline.h"
#include "test_support.h"

namespace mecplan {
namespace {

using testing::MakeInstance;

TEST(Metrics, TwoHopStoreAndForwardVersusBottleneck) {
  // One task over a link of rate r and then one of rate 2r, full shares.
  Instance inst = MakeInstance({{0, 0, 1, 0, false}, {100, 0, 2, 0, false},
                                {200, 0, 1, 0, true}},
                               {{1.0, 0}});
  const double r = 2.0 * kBytesPerSecondPerGbps;
  inst.rate_overrides = {{0, 1, r, ""}, {1, 2, 2 * r, ""}, {0, 2, 0.0, ""}};
  const LinkGraph graph = BuildInstanceGraph(inst);
  Plan plan;
  plan.links = {Link{0, 0, 1, 0}, Link{1, 1, 2, 0}};
  TaskRoute route;
  route.path = plan.links;
  route.cloud_entry = 2;
  plan.routes = {route};

  const LatencyReport report = EvaluatePlan(plan, inst, graph, EqualShare(plan, inst, graph, 1.0));
  const double size = inst.tasks[0].size;
  EXPECT_NEAR(report.tasks[0].latency_hbh, size / r + size / (2 * r) + 0.2, 1e-12);
  EXPECT_NEAR(report.tasks[0].latency_minr, 2 * size / r + 0.2, 1e-12);
  EXPECT_EQ(report.tasks[0].hops, 2);
}

TEST(Metrics, MissingShareIsReported) {
  Instance inst = MakeInstance({{0, 0, 1, 0, false}, {100, 0, 1, 0, true}}, {{1.0, 0}});
  const LinkGraph graph = BuildInstanceGraph(inst);
  Plan plan;
  plan.links = {Link{0, 0, 1, 0}};
  TaskRoute route;
  route.path = plan.links;
  route.cloud_entry = 1;
  plan.routes = {route};
  try {
    EvaluatePlan(plan, inst, graph, Allocation{});
    FAIL() << "expected MissingAllocation";
  } catch (const PlanningError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingAllocation);
  }
}

TEST(RunTwoStep, OptimizedNeverWorseThanFixed) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const Instance inst = GenerateInstance(testing::SmallConfig(seed));
    const TwoStepResult res = RunTwoStep(inst, Metric::kMinR);
    const PolicyTotals& t = res.totals;
    EXPECT_LE(t.hbh_optimized, t.hbh_fixed * (1 + 1e-9)) << "seed " << seed;
    EXPECT_LE(t.minr_optimized, t.minr_fixed * (1 + 1e-9)) << "seed " << seed;
    // Store-and-forward never loses to the bottleneck model for equal shares.
    const LatencyReport fixed = EvaluatePlan(
        res.plan, inst, BuildInstanceGraph(inst),
        EqualShare(res.plan, inst, BuildInstanceGraph(inst), inst.saturation));
    for (const TaskLatency& tl : fixed.tasks) {
      EXPECT_LE(tl.latency_hbh, tl.latency_minr * (1 + 1e-12)) << "seed " << seed;
    }
    for (const TaskLatency& tl : res.report.tasks) {
      EXPECT_LE(tl.latency_hbh, tl.latency_minr * (1 + 1e-12)) << "seed " << seed;
    }
    EXPECT_NEAR(res.report.total_minr, t.minr_optimized, 1e-9 * t.minr_optimized);
  }
}

TEST(RunTwoStep, PolicyChoosesStepTwoProblem) {
  const Instance inst = GenerateInstance(testing::SmallConfig(3));
  const TwoStepResult hbh = RunTwoStep(inst, Metric::kHbh);
  const TwoStepResult minr = RunTwoStep(inst, Metric::kMinR);
  EXPECT_FALSE(hbh.allocation.psi.has_value());
  EXPECT_TRUE(minr.allocation.psi.has_value());
  EXPECT_NEAR(hbh.report.total_hbh, hbh.totals.hbh_optimized, 1e-9 * hbh.totals.hbh_optimized);
}

TEST(RunTwoStep, InvalidInstanceRejected) {
  Instance inst = GenerateInstance(testing::SmallConfig(1));
  inst.saturation = 0.0;
  try {
    RunTwoStep(inst, Metric::kHbh);
    FAIL() << "expected InvalidInstance";
  } catch (const PlanningError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidInstance);
  }
}

TEST(SweepTaskSize, OneRowPerScaleAndDominance) {
  const Instance inst = GenerateInstance(testing::SmallConfig(4));
  const auto rows = SweepTaskSize(inst, {60, 100, 160}, Metric::kHbh);
  ASSERT_EQ(rows.size(), 3u);
  for (const SizeSweepRow& row : rows) {
    EXPECT_LE(row.optimized_total, row.fixed_total * (1 + 1e-9));
  }
  EXPECT_THROW(SweepTaskSize(inst, {0}, Metric::kHbh), PlanningError);
}

TEST(SweepInfrastructure, NoCapacitySendsEverythingToCloud) {
  const Instance inst = GenerateInstance(testing::SmallConfig(2));
  const auto rows = SweepInfrastructure(inst, {2}, {1.0, 0.0});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].capacity_factor, 0.0);
  EXPECT_EQ(rows[1].cloud_tasks, rows[1].num_tasks);
  EXPECT_LE(rows[0].totals.step1_objective, rows[1].totals.step1_objective * (1 + 1e-9));
}

TEST(SweepInfrastructure, MoreInterfacesNeverHurtStepOne) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const Instance inst = GenerateInstance(testing::TinyConfig(seed));
    const auto rows = SweepInfrastructure(inst, {2, 3}, {1.0});
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_LE(rows[1].totals.step1_objective, rows[0].totals.step1_objective * (1 + 1e-9))
        << "seed " << seed;
  }
}

TEST(DeriveInfrastructure, AppliesInterfacesAndCapacity) {
  const Instance inst = GenerateInstance(GeneratorConfig{});
  const Instance half = DeriveInfrastructure(inst, 3, 0.5);
  for (int n = 0; n < inst.num_bs(); ++n) {
    EXPECT_EQ(half.base_stations[n].interfaces, 3);
    EXPECT_DOUBLE_EQ(half.base_stations[n].EffectiveCapacity(),
                     0.5 * inst.base_stations[n].EffectiveCapacity());
  }
  const Instance none = DeriveInfrastructure(inst, 2, 0.0);
  for (const BaseStation& bs : none.base_stations) EXPECT_FALSE(bs.has_server);
}

TEST(SixStation, ReproducesReferenceLatencies) {
  const Instance inst = testing::SixStationInstance();
  const TwoStepResult res = RunTwoStep(inst, Metric::kHbh);
  const double expected[] = {1.27, 0, 0, 0, 1.34, 0.43, 1.86, 0.61, 0.20, 1.95};
  ASSERT_EQ(res.report.tasks.size(), 10u);
  int local = 0, cloud = 0;
  for (int b = 0; b < 10; ++b) {
    const TaskLatency& t = res.report.tasks[b];
    EXPECT_NEAR(t.latency_hbh, expected[b], 0.01) << "task " << b + 1;
    if (t.site.is_cloud()) ++cloud;
    if (!t.site.is_cloud() && t.hops == 0) ++local;
  }
  EXPECT_EQ(local, 3);
  EXPECT_EQ(cloud, 4);
  EXPECT_NEAR(res.report.tasks[8].latency_hbh, 0.20, 1e-6);
}

}  // namespace
}  // namespace mecplan
