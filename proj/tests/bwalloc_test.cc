#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "mecplan/bwalloc.h"
#include "mecplan/error.h"
#include "mecplan/linkgraph.h"
#include "mecplan/milp.h"
#include "mecplan/pipeline.h"
#include "oracles/oracles.h"
#include "test_support.h"

namespace mecplan {
namespace {

using testing::MakeTwoLinkCase;
using testing::TwoLinkCase;

TEST(LinkShares, ClosedFormMatchesBisection) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> weight(1e-4, 5.0);
  std::uniform_real_distribution<double> xi_draw(0.5, 1.0);
  std::uniform_int_distribution<int> users(1, 8);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> w(users(rng));
    for (double& v : w) v = weight(rng);
    const double xi = xi_draw(rng);
    const auto closed = SolveLinkClosedForm(w, xi);
    const auto bisect = SolveLinkBisection(w, xi);
    const double a = LinkObjective(w, closed);
    const double b = LinkObjective(w, bisect);
    EXPECT_LE(std::abs(a - b) / b, 1e-9) << "trial " << trial;
    double sum = 0.0;
    for (double r : closed) sum += r;
    EXPECT_LE(sum, xi * (1 + 1e-12));
  }
}

TEST(LinkShares, SquareRootSplit) {
  const auto rho = SolveLinkClosedForm({1.0, 4.0}, 0.9);
  EXPECT_NEAR(rho[0], 0.3, 1e-15);
  EXPECT_NEAR(rho[1], 0.6, 1e-15);
}

TEST(LinkShares, NoGridPointBeatsClosedForm) {
  const double w1 = 0.37, w2 = 1.9, xi = 0.95;
  const auto rho = SolveLinkClosedForm({w1, w2}, xi);
  const double closed = LinkObjective({w1, w2}, rho);
  EXPECT_LE(closed, oracle::P2aGridBest(w1, w2, xi, 10000) * (1 + 1e-12));
  EXPECT_LE(oracle::P2aGridBest(w1, w2, xi, 10000), closed * (1 + 1e-6));
}

double MinRObjective(const TwoLinkCase& c, double psi_a, double psi_b) {
  const auto& t = c.inst.tasks;
  return t[0].weight * t[0].size * 2 / psi_a + t[1].weight * t[1].size / psi_b;
}

TEST(MinRate, MatchesTwoDimensionalGrid) {
  for (const auto& [r1, r2] : std::vector<std::pair<double, double>>{
           {4.0, 4.0}, {1.0, 6.0}, {8.0, 2.0}, {0.6, 0.9}}) {
    const TwoLinkCase c = MakeTwoLinkCase(r1, r2, 0.8, 0.5);
    const Allocation alloc = AllocateP2B(c.plan, c.inst, c.graph);
    ASSERT_TRUE(alloc.psi);
    const double got = MinRObjective(c, alloc.psi->at(0), alloc.psi->at(1));
    const double xi = c.inst.saturation;
    const auto& t = c.inst.tasks;
    const auto grid = oracle::P2bGridBest(
        t[0].weight * t[0].size * 2, t[1].weight * t[1].size,
        xi * c.graph.rate(0, 1), xi * c.graph.rate(1, 2), 2000);
    EXPECT_LE(got, grid.value * (1 + 1e-9)) << r1 << "," << r2;
    EXPECT_GE(got, grid.value * (1 - 1e-2)) << r1 << "," << r2;
    EXPECT_LE(VerifyKkt(c.plan, c.inst, c.graph, alloc).Max(), 1e-7);
  }
}

TEST(MinRate, SlowFirstHopCapsPathRate) {
  const TwoLinkCase c = MakeTwoLinkCase(0.6, 10.0, 1.0, 1.0);
  const Allocation alloc = AllocateP2B(c.plan, c.inst, c.graph);
  ASSERT_TRUE(alloc.psi);
  EXPECT_NEAR(alloc.psi->at(0), c.inst.saturation * c.graph.rate(0, 1),
              1e-7 * c.graph.rate(0, 1));
  // Task B takes what is left of the second link.
  EXPECT_NEAR(alloc.psi->at(0) + alloc.psi->at(1),
              c.inst.saturation * c.graph.rate(1, 2), 1e-7 * c.graph.rate(1, 2));
}

TEST(MinRate, SharesRespectSaturationOnEveryLink) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Instance inst = GenerateInstance(testing::SmallConfig(seed));
    const LinkGraph graph = BuildInstanceGraph(inst);
    const SolveOutcome out = SolveP1(BuildP1(inst, graph));
    ASSERT_TRUE(out.plan);
    for (const Allocation& alloc : {AllocateP2A(*out.plan, inst, graph),
                                    AllocateP2B(*out.plan, inst, graph)}) {
      std::map<Link, double> sum;
      for (const auto& [key, rho] : alloc.rho) {
        EXPECT_GT(rho, 0.0);
        sum[key.link] += rho;
      }
      for (const auto& [link, s] : sum) {
        EXPECT_LE(s, inst.saturation) << "seed " << seed << " " << FormatLink(link);
      }
      EXPECT_LE(VerifyKkt(*out.plan, inst, graph, alloc).Max(), 1e-7) << "seed " << seed;
    }
  }
}

TEST(Kkt, DetectsPerturbedShares) {
  const TwoLinkCase c = MakeTwoLinkCase(3.0, 3.0, 0.8, 0.5);
  Allocation p2a = AllocateP2A(c.plan, c.inst, c.graph);
  ASSERT_LE(VerifyKkt(c.plan, c.inst, c.graph, p2a).Max(), 1e-9);
  p2a.rho.begin()->second *= 0.9;
  EXPECT_GT(VerifyKkt(c.plan, c.inst, c.graph, p2a).Max(), 1e-3);

  Allocation p2b = AllocateP2B(c.plan, c.inst, c.graph);
  (*p2b.psi)[1] *= 0.8;
  EXPECT_GT(VerifyKkt(c.plan, c.inst, c.graph, p2b).Max(), 1e-3);
}

TEST(HopByHop, SharesInvariantUnderSizeScaling) {
  TwoLinkCase small = MakeTwoLinkCase(3.0, 5.0, 0.4, 0.3);
  TwoLinkCase large = MakeTwoLinkCase(3.0, 5.0, 0.8, 0.6);
  const Allocation a = AllocateP2A(small.plan, small.inst, small.graph);
  const Allocation b = AllocateP2A(large.plan, large.inst, large.graph);
  for (const auto& [key, rho] : a.rho) EXPECT_NEAR(b.rho.at(key), rho, 1e-12);
}

TEST(EqualShare, SplitsEvenly) {
  const TwoLinkCase c = MakeTwoLinkCase(3.0, 3.0, 0.8, 0.5);
  const Allocation eq = EqualShare(c.plan, c.inst, c.graph, 0.95);
  EXPECT_DOUBLE_EQ(eq.rho.at({c.l1, 0}), 0.95);
  EXPECT_DOUBLE_EQ(eq.rho.at({c.l2, 0}), 0.475);
  EXPECT_DOUBLE_EQ(eq.rho.at({c.l2, 1}), 0.475);
}

TEST(CollectLinkLoads, EmptyLinkRejected) {
  TwoLinkCase c = MakeTwoLinkCase(3.0, 3.0, 0.8, 0.5);
  c.plan.links.push_back(Link{2, 0, 1, 1});
  try {
    CollectLinkLoads(c.plan, c.inst, c.graph);
    FAIL() << "expected EmptyLink";
  } catch (const PlanningError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyLink);
  }
}

}  // namespace
}  // namespace mecplan
