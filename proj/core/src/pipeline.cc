#include "mecplan/pipeline.h"

#include <limits>

#include "mecplan/error.h"

namespace mecplan {

std::string_view MetricName(Metric metric) {
  return metric == Metric::kHbh ? "hbh" : "minR";
}

std::optional<Metric> ParseMetric(std::string_view text) {
  if (text == "hbh") return Metric::kHbh;
  if (text == "minR" || text == "minr") return Metric::kMinR;
  return std::nullopt;
}

LatencyReport EvaluatePlan(const Plan& plan, const Instance& inst,
                           const LinkGraph& graph, const Allocation& alloc) {
  if (static_cast<int>(plan.routes.size()) != inst.num_tasks()) {
    throw PlanningError(ErrorCode::kMissingAllocation,
                        "plan covers " + std::to_string(plan.routes.size()) +
                            " of " + std::to_string(inst.num_tasks()) +
                            " tasks");
  }
  LatencyReport report;
  for (int b = 0; b < inst.num_tasks(); ++b) {
    const Task& t = inst.tasks[b];
    const TaskRoute& route = plan.routes[b];
    TaskLatency row;
    row.task = b;
    row.size = t.size;
    row.origin = t.origin;
    row.site = route.site;
    row.cloud_entry = route.cloud_entry;
    row.path = FormatRoute(inst, route);
    row.hops = route.hops();

    double bottleneck = std::numeric_limits<double>::infinity();
    for (const Link& link : route.path) {
      auto it = alloc.rho.find(LinkTask{link, b});
      if (it == alloc.rho.end()) {
        throw PlanningError(ErrorCode::kMissingAllocation,
                            "no share for task " + std::to_string(b + 1) +
                                " on " + FormatLink(link));
      }
      const double granted = it->second * graph.LinkRate(link);
      row.latency_hbh += t.size / granted;
      bottleneck = std::min(bottleneck, granted);
    }
    if (row.hops > 0) {
      if (alloc.psi.has_value()) {
        auto it = alloc.psi->find(b);
        if (it == alloc.psi->end()) {
          throw PlanningError(ErrorCode::kMissingAllocation,
                              "no path rate for task " + std::to_string(b + 1));
        }
        bottleneck = it->second;
      }
      row.latency_minr = row.hops * t.size / bottleneck;
    }
    if (route.site.is_cloud()) {
      row.latency_hbh += inst.cloud_latency;
      row.latency_minr += inst.cloud_latency;
    }
    report.total_hbh += t.weight * row.latency_hbh;
    report.total_minr += t.weight * row.latency_minr;
    report.tasks.push_back(std::move(row));
  }
  return report;
}

LatencyReport EvaluateHbh(const Plan& plan, const Instance& inst,
                          const LinkGraph& graph, const Allocation& alloc) {
  return EvaluatePlan(plan, inst, graph, alloc);
}

LatencyReport EvaluateMinR(const Plan& plan, const Instance& inst,
                           const LinkGraph& graph, const Allocation& alloc) {
  return EvaluatePlan(plan, inst, graph, alloc);
}

PolicyTotals ComputeTotals(const Plan& plan, const Instance& inst,
                           const LinkGraph& graph) {
  PolicyTotals totals;
  totals.step1_objective =
      EvaluatePlan(plan, inst, graph, EqualShare(plan, inst, graph, 1.0))
          .total_hbh;
  const LatencyReport fixed = EvaluatePlan(
      plan, inst, graph, EqualShare(plan, inst, graph, inst.saturation));
  totals.hbh_fixed = fixed.total_hbh;
  totals.minr_fixed = fixed.total_minr;
  totals.hbh_optimized =
      EvaluatePlan(plan, inst, graph, AllocateP2A(plan, inst, graph)).total_hbh;
  totals.minr_optimized =
      EvaluatePlan(plan, inst, graph, AllocateP2B(plan, inst, graph))
          .total_minr;
  return totals;
}

TwoStepResult AllocatePlan(const Instance& inst, const Plan& plan,
                           Metric policy) {
  const LinkGraph graph = BuildInstanceGraph(inst);
  TwoStepResult result;
  result.policy = policy;
  result.plan = plan;
  result.allocation = policy == Metric::kHbh ? AllocateP2A(plan, inst, graph)
                                             : AllocateP2B(plan, inst, graph);
  result.report = EvaluatePlan(plan, inst, graph, result.allocation);
  result.totals = ComputeTotals(plan, inst, graph);
  result.step1.plan = plan;
  result.step1.objective_value = result.totals.step1_objective;
  result.step1.best_bound = result.step1.objective_value;
  result.step1.status = SolveStatus::kOptimal;
  return result;
}

namespace {

void RequireValid(const Instance& inst) {
  const std::vector<Violation> violations = ValidateInstance(inst);
  if (violations.empty()) return;
  std::string message;
  for (const Violation& v : violations) {
    if (!message.empty()) message += "; ";
    message += std::string(ViolationName(v.code)) + " " + v.detail;
  }
  throw PlanningError(ErrorCode::kInvalidInstance, message);
}

int CountCloud(const Plan& plan) {
  int n = 0;
  for (const TaskRoute& r : plan.routes) n += r.site.is_cloud() ? 1 : 0;
  return n;
}

}  // namespace

TwoStepResult RunTwoStep(const Instance& inst, Metric policy,
                         const SolveLimits& limits) {
  RequireValid(inst);
  const LinkGraph graph = BuildInstanceGraph(inst);
  const MilpModel model = BuildP1(inst, graph);
  SolveOutcome outcome = SolveP1(model, limits);
  if (!outcome.plan) {
    throw PlanningError(
        ErrorCode::kInfeasible,
        outcome.status == SolveStatus::kInfeasible
            ? "step one has no feasible plan"
            : "time limit reached before any feasible plan was found");
  }
  TwoStepResult result;
  result.policy = policy;
  result.plan = *outcome.plan;
  result.allocation = policy == Metric::kHbh
                          ? AllocateP2A(result.plan, inst, graph)
                          : AllocateP2B(result.plan, inst, graph);
  result.report = EvaluatePlan(result.plan, inst, graph, result.allocation);
  result.totals = ComputeTotals(result.plan, inst, graph);
  result.step1 = std::move(outcome);
  return result;
}

std::vector<SizeSweepRow> SweepTaskSize(const Instance& inst,
                                        const std::vector<double>& scales,
                                        Metric policy,
                                        const SolveLimits& limits) {
  for (double s : scales) {
    if (!(s > 0)) {
      throw PlanningError(ErrorCode::kBadParameter,
                          "size scale must be positive, got " +
                              std::to_string(s));
    }
  }
  std::vector<SizeSweepRow> rows;
  for (double s : scales) {
    Instance scaled = inst;
    for (Task& t : scaled.tasks) t.size *= s / 100.0;
    const TwoStepResult r = RunTwoStep(scaled, policy, limits);
    SizeSweepRow row;
    row.scale_percent = s;
    row.status = r.step1.status;
    row.gap = r.step1.gap;
    row.totals = r.totals;
    row.fixed_total = r.totals.Fixed(policy);
    row.optimized_total = r.totals.Optimized(policy);
    row.cloud_tasks = CountCloud(r.plan);
    rows.push_back(row);
  }
  return rows;
}

Instance DeriveInfrastructure(const Instance& inst, int interfaces,
                              double capacity_factor) {
  if (interfaces < 1 || !(capacity_factor >= 0)) {
    throw PlanningError(ErrorCode::kBadParameter,
                        "interfaces must be >= 1 and capacity factor >= 0");
  }
  Instance out = inst;
  for (BaseStation& bs : out.base_stations) {
    bs.interfaces = interfaces;
    if (!bs.has_server) continue;
    if (capacity_factor == 0.0) {
      bs.has_server = false;
      bs.storage_capacity = 0.0;
    } else {
      bs.storage_capacity *= capacity_factor;
    }
  }
  return out;
}

std::vector<InfraSweepRow> SweepInfrastructure(
    const Instance& inst, const std::vector<int>& interface_counts,
    const std::vector<double>& capacity_factors, Metric policy,
    const SolveLimits& limits) {
  std::vector<InfraSweepRow> rows;
  for (int interfaces : interface_counts) {
    for (double factor : capacity_factors) {
      const Instance derived = DeriveInfrastructure(inst, interfaces, factor);
      const TwoStepResult r = RunTwoStep(derived, policy, limits);
      InfraSweepRow row;
      row.interfaces = interfaces;
      row.capacity_factor = factor;
      row.status = r.step1.status;
      row.gap = r.step1.gap;
      row.totals = r.totals;
      row.fixed_total = r.totals.Fixed(policy);
      row.optimized_total = r.totals.Optimized(policy);
      row.cloud_tasks = CountCloud(r.plan);
      row.num_tasks = derived.num_tasks();
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace mecplan
