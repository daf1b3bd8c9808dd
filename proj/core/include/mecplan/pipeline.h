#ifndef MECPLAN_PIPELINE_H_
#define MECPLAN_PIPELINE_H_

#include <optional>
#include <string>
#include <vector>

#include "mecplan/bwalloc.h"
#include "mecplan/linkgraph.h"
#include "mecplan/milp.h"
#include "mecplan/model.h"

namespace mecplan {

enum class Metric { kHbh, kMinR };

std::string_view MetricName(Metric metric);
std::optional<Metric> ParseMetric(std::string_view text);

struct TaskLatency {
  int task = 0;
  double size = 0.0;  // bytes
  int origin = 0;
  ServingSite site = ServingSite::Cloud();
  std::optional<int> cloud_entry;
  std::string path;  // "n(i)→m(j) ..." or "*"
  int hops = 0;
  double latency_hbh = 0.0;   // seconds, cloud term included
  double latency_minr = 0.0;  // seconds, cloud term included
};

struct LatencyReport {
  std::vector<TaskLatency> tasks;
  double total_hbh = 0.0;  // sum_b gamma_b latency_hbh
  double total_minr = 0.0;

  double Total(Metric metric) const {
    return metric == Metric::kHbh ? total_hbh : total_minr;
  }
};

// Latency of every task under both metrics for the given shares. The minR
// path rate is taken from alloc.psi when present, otherwise it is the path
// minimum of rho * R. Throws PlanningError(kMissingAllocation) when a hop of
// the plan has no share.
LatencyReport EvaluatePlan(const Plan& plan, const Instance& inst,
                           const LinkGraph& graph, const Allocation& alloc);

// Store-and-forward latencies: sum over hops of L_b / (rho R), plus theta.
LatencyReport EvaluateHbh(const Plan& plan, const Instance& inst,
                          const LinkGraph& graph, const Allocation& alloc);

// Bottleneck latencies: hops L_b / Psi_b, plus theta.
LatencyReport EvaluateMinR(const Plan& plan, const Instance& inst,
                           const LinkGraph& graph, const Allocation& alloc);

// Weighted totals of one plan under every policy/metric combination.
// "fixed" splits xi evenly among a link's users; "optimized" uses P2A for
// hbh and P2B for minR.
struct PolicyTotals {
  double step1_objective = 0.0;  // equal share of the full link, hbh
  double hbh_fixed = 0.0;
  double hbh_optimized = 0.0;
  double minr_fixed = 0.0;
  double minr_optimized = 0.0;

  double Fixed(Metric metric) const {
    return metric == Metric::kHbh ? hbh_fixed : minr_fixed;
  }
  double Optimized(Metric metric) const {
    return metric == Metric::kHbh ? hbh_optimized : minr_optimized;
  }
};

PolicyTotals ComputeTotals(const Plan& plan, const Instance& inst,
                           const LinkGraph& graph);

struct TwoStepResult {
  Metric policy = Metric::kHbh;
  SolveOutcome step1;
  Plan plan;
  Allocation allocation;  // Step-2 allocation for `policy`
  LatencyReport report;   // evaluated under `allocation`
  PolicyTotals totals;
};

// Step 1 (P1) followed by P2A or P2B. Throws PlanningError(kInvalidInstance)
// for an invalid instance and kInfeasible when Step 1 yields no plan.
TwoStepResult RunTwoStep(const Instance& inst, Metric policy,
                         const SolveLimits& limits = {});

// Step 2 alone on a given plan.
TwoStepResult AllocatePlan(const Instance& inst, const Plan& plan,
                           Metric policy);

struct SizeSweepRow {
  double scale_percent = 0.0;
  SolveStatus status = SolveStatus::kOptimal;
  double gap = 0.0;
  double fixed_total = 0.0;      // policy metric, fixed shares
  double optimized_total = 0.0;  // policy metric, optimized shares
  PolicyTotals totals;
  int cloud_tasks = 0;
};

// Scales every task size by scale/100 and re-runs both steps per point.
// Throws PlanningError(kBadParameter) for a nonpositive scale.
std::vector<SizeSweepRow> SweepTaskSize(const Instance& inst,
                                        const std::vector<double>& scales,
                                        Metric policy,
                                        const SolveLimits& limits = {});

struct InfraSweepRow {
  int interfaces = 0;
  double capacity_factor = 0.0;
  SolveStatus status = SolveStatus::kOptimal;
  double gap = 0.0;
  double fixed_total = 0.0;
  double optimized_total = 0.0;
  PolicyTotals totals;
  int cloud_tasks = 0;
  int num_tasks = 0;
};

// Instance with every station given `interfaces` antennas and every server
// capacity multiplied by `capacity_factor` (0 removes the servers).
Instance DeriveInfrastructure(const Instance& inst, int interfaces,
                              double capacity_factor);

std::vector<InfraSweepRow> SweepInfrastructure(
    const Instance& inst, const std::vector<int>& interface_counts,
    const std::vector<double>& capacity_factors, Metric policy = Metric::kMinR,
    const SolveLimits& limits = {});

}  // namespace mecplan

#endif  // MECPLAN_PIPELINE_H_
