#include <gtest/gtest.h>

#include <algorithm>
#include <functional>

#include "mecplan/error.h"
#include "mecplan/io.h"
#include "mecplan/linkgraph.h"
#include "mecplan/pipeline.h"
#include "test_support.h"

namespace mecplan {
namespace {

void ExpectFormatError(const std::function<void()>& fn) {
  try {
    fn();
    ADD_FAILURE() << "expected a format error";
  } catch (const PlanningError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormat);
  }
}

TEST(InstanceJson, RoundTripPreservesEverything) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    GeneratorConfig cfg;
    cfg.seed = seed;
    const Instance inst = GenerateInstance(cfg);
    const std::string text = SerializeInstance(inst);
    const Instance back = ParseInstance(text);
    EXPECT_EQ(SerializeInstance(back), text);
    ASSERT_EQ(back.num_tasks(), inst.num_tasks());
    for (int b = 0; b < inst.num_tasks(); ++b) {
      EXPECT_DOUBLE_EQ(back.tasks[b].size, inst.tasks[b].size);
      EXPECT_EQ(back.tasks[b].origin, inst.tasks[b].origin);
    }
  }
}

TEST(InstanceJson, FixtureRoundTrip) {
  const Instance inst = testing::SixStationInstance();
  EXPECT_EQ(inst.num_bs(), 6);
  EXPECT_EQ(inst.rate_overrides.size(), 15u);
  EXPECT_EQ(SerializeInstance(ParseInstance(SerializeInstance(inst))),
            SerializeInstance(inst));
}

TEST(InstanceJson, RejectsMalformedInput) {
  const std::string good = SerializeInstance(GenerateInstance(GeneratorConfig{}));
  ExpectFormatError([] { ParseInstance("{not json"); });
  ExpectFormatError([] { ParseInstance("[]"); });
  std::string unknown = good;
  unknown.insert(1, "\"colour\": \"blue\",");
  ExpectFormatError([&] { ParseInstance(unknown); });
  std::string wrong_version = good;
  const auto pos = wrong_version.find("\"schema_version\": 1");
  ASSERT_NE(pos, std::string::npos);
  wrong_version.replace(pos, 19, "\"schema_version\": 9");
  ExpectFormatError([&] { ParseInstance(wrong_version); });
}

TEST(PlanJson, RoundTrip) {
  const Instance inst = testing::SixStationInstance();
  const TwoStepResult res = RunTwoStep(inst, Metric::kHbh);
  const std::string text = SerializePlan(res.plan, &res.step1);
  const Plan back = ParsePlan(text);
  EXPECT_EQ(back.links, res.plan.links);
  ASSERT_EQ(back.routes.size(), res.plan.routes.size());
  for (std::size_t b = 0; b < back.routes.size(); ++b) {
    EXPECT_EQ(back.routes[b].path, res.plan.routes[b].path);
    EXPECT_EQ(back.routes[b].site, res.plan.routes[b].site);
    EXPECT_EQ(back.routes[b].cloud_entry, res.plan.routes[b].cloud_entry);
  }
  EXPECT_EQ(SerializePlan(back), SerializePlan(res.plan));
}

TEST(ReportCsv, FixtureRows) {
  const Instance inst = testing::SixStationInstance();
  const TwoStepResult res = RunTwoStep(inst, Metric::kHbh);
  const std::string csv = ReportCsv(res.report, Metric::kHbh);
  EXPECT_EQ(csv.rfind("task, size_gb, origin, path, latency_s", 0), 0u);
  EXPECT_NE(csv.find("\n9, 0.90, 6, 6(3)→Cloud, 0.20, cloud, 0, "), std::string::npos)
      << csv;
  EXPECT_EQ(csv, ReportCsv(RunTwoStep(inst, Metric::kHbh).report, Metric::kHbh));
}

TEST(ReportCsv, EmptyReportHasHeaderOnly) {
  const std::string csv = ReportCsv(LatencyReport{}, Metric::kMinR);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1);
}

TEST(ReportJson, TotalsRoundTrip) {
  const Instance inst = GenerateInstance(testing::SmallConfig(2));
  const TwoStepResult res = RunTwoStep(inst, Metric::kMinR);
  const ParsedReport parsed = ParseReportJson(ReportJson(res));
  EXPECT_EQ(parsed.policy, "minR");
  EXPECT_DOUBLE_EQ(parsed.totals.hbh_fixed, res.totals.hbh_fixed);
  EXPECT_DOUBLE_EQ(parsed.totals.minr_optimized, res.totals.minr_optimized);
  EXPECT_DOUBLE_EQ(parsed.total_minr, res.report.total_minr);
}

TEST(ExportDot, ShowsLinksAndNodeKinds) {
  const Instance inst = testing::SixStationInstance();
  const TwoStepResult res = RunTwoStep(inst, Metric::kHbh);
  const std::string dot = ExportDot(res.plan, inst);
  EXPECT_EQ(dot.rfind("digraph", 0), 0u);
  EXPECT_NE(dot.find("circle"), std::string::npos);
  EXPECT_NE(dot.find("peripheries=2"), std::string::npos);
  for (const Link& l : res.plan.links) {
    EXPECT_NE(dot.find(FormatLink(l)), std::string::npos) << FormatLink(l);
  }
  EXPECT_EQ(dot, ExportDot(res.plan, inst));
}

TEST(SweepCsv, OneLinePerRow) {
  const Instance inst = GenerateInstance(testing::TinyConfig(3));
  const auto rows = SweepTaskSize(inst, {80, 120}, Metric::kHbh);
  const std::string csv = SizeSweepCsv(rows);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

}  // namespace
}  // namespace mecplan
