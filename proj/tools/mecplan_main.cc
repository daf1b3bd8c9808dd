// mecplan: command-line front end for instance generation, the two-step
// planner, sweeps and exports.
//
// Exit codes: 0 success, 1 usage, 2 invalid input, 3 time limit reached
// with a gap, 4 internal failure.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mecplan/error.h"
#include "mecplan/generator.h"
#include "mecplan/io.h"
#include "mecplan/linkgraph.h"
#include "mecplan/lp_format.h"
#include "mecplan/milp.h"
#include "mecplan/model.h"
#include "mecplan/pipeline.h"

namespace {

using namespace mecplan;

enum ExitCode {
  kExitOk = 0,
  kExitUsage = 1,
  kExitInvalid = 2,
  kExitGap = 3,
  kExitInternal = 4,
};

struct GlobalOptions {
  std::string policy = "hbh";
  std::optional<double> xi;
  std::string time_limit;
  std::int64_t node_limit = 0;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "csv";
  bool quiet = false;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// "90", "90s", "500ms", "2m", "1h".
double ParseDuration(const std::string& text) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr == begin || !(value >= 0.0)) {
    throw UsageError("--time-limit: cannot parse '" + text + "'");
  }
  const std::string unit(ptr, end);
  if (unit.empty() || unit == "s") return value;
  if (unit == "ms") return value / 1000.0;
  if (unit == "m" || unit == "min") return value * 60.0;
  if (unit == "h") return value * 3600.0;
  throw UsageError("--time-limit: unknown unit '" + unit + "'");
}

template <typename T>
std::vector<T> ParseList(const std::string& text, const char* flag) {
  std::vector<T> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    T v{};
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw UsageError(std::string(flag) + ": cannot parse '" + item + "'");
    }
    values.push_back(v);
  }
  if (values.empty()) throw UsageError(std::string(flag) + ": empty list");
  return values;
}

Metric PolicyOf(const GlobalOptions& g) {
  auto m = ParseMetric(g.policy);
  if (!m) throw UsageError("--policy: expected hbh or minR, got '" + g.policy + "'");
  return *m;
}

SolveLimits LimitsOf(const GlobalOptions& g) {
  SolveLimits limits;
  if (!g.time_limit.empty()) limits.time_limit_s = ParseDuration(g.time_limit);
  limits.node_limit = g.node_limit;
  if (!g.quiet) {
    limits.progress = [](const SolveProgress& p) {
      std::fprintf(stderr, "[%7.1fs] nodes %lld open %lld incumbent %s bound %.6g\n",
                   p.elapsed_s, static_cast<long long>(p.nodes),
                   static_cast<long long>(p.open_nodes),
                   p.incumbent ? std::to_string(*p.incumbent).c_str() : "-",
                   p.best_bound);
    };
  }
  return limits;
}

Instance LoadInstance(const std::string& path, const GlobalOptions& g) {
  Instance inst = ParseInstance(ReadFile(path));
  if (g.xi) inst.saturation = *g.xi;
  return inst;
}

void Emit(const GlobalOptions& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
  } else {
    WriteFile(g.out, text);
  }
}

void PrintViolations(const std::vector<Violation>& violations) {
  for (const Violation& v : violations) {
    std::cerr << ViolationName(v.code) << ": " << v.detail << "\n";
  }
}

void PrintStep1(const SolveOutcome& o) {
  std::fprintf(stderr, "step1: %s objective %.6g s, bound %.6g s, gap %s, nodes %lld\n",
               std::string(SolveStatusName(o.status)).c_str(), o.objective_value,
               o.best_bound,
               std::isfinite(o.gap) ? std::to_string(o.gap).c_str() : "inf",
               static_cast<long long>(o.nodes_explored));
}

int StatusExit(SolveStatus status) {
  return status == SolveStatus::kTimeLimitWithGap ? kExitGap : kExitOk;
}

std::string RenderReport(const GlobalOptions& g, const TwoStepResult& r) {
  if (g.format == "json") return ReportJson(r);
  return ReportCsv(r.report, r.policy);
}

int RunGenerate(const GlobalOptions& g, GeneratorConfig config,
                const std::string& servers, const std::string& cloud,
                double size_min_gb, double size_max_gb) {
  if (g.seed) config.seed = *g.seed;
  if (g.xi) config.saturation = *g.xi;
  config.size_min = size_min_gb * kBytesPerGigabyte;
  config.size_max = size_max_gb * kBytesPerGigabyte;
  if (!servers.empty()) {
    config.servers.clear();
    if (servers != "none") {
      std::stringstream in(servers);
      std::string item;
      while (std::getline(in, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) {
          throw UsageError("--servers: expected bs:capacity_gb, got '" + item + "'");
        }
        const auto bs = ParseList<int>(item.substr(0, colon), "--servers");
        const auto cap = ParseList<double>(item.substr(colon + 1), "--servers");
        config.servers.push_back({bs[0] - 1, cap[0] * kBytesPerGigabyte});
      }
    }
  }
  if (!cloud.empty()) {
    config.cloud_bs.clear();
    for (int id : ParseList<int>(cloud, "--cloud")) config.cloud_bs.push_back(id - 1);
  }
  Emit(g, SerializeInstance(GenerateInstance(config)));
  return kExitOk;
}

int RunPlan(const GlobalOptions& g, const std::string& instance_path) {
  const Instance inst = LoadInstance(instance_path, g);
  const auto violations = ValidateInstance(inst);
  if (!violations.empty()) {
    PrintViolations(violations);
    return kExitInvalid;
  }
  const LinkGraph graph = BuildInstanceGraph(inst);
  const MilpModel model = BuildP1(inst, graph);
  const SolveOutcome outcome = SolveP1(model, LimitsOf(g));
  PrintStep1(outcome);
  if (outcome.status == SolveStatus::kInfeasible) {
    std::cerr << "no feasible plan\n";
    return kExitInvalid;
  }
  if (outcome.plan) Emit(g, SerializePlan(*outcome.plan, &outcome));
  return StatusExit(outcome.status);
}

int RunAllocate(const GlobalOptions& g, const std::string& instance_path,
                const std::string& plan_path) {
  const Instance inst = LoadInstance(instance_path, g);
  const Plan plan = ParsePlan(ReadFile(plan_path));
  auto violations = ValidateInstance(inst);
  if (violations.empty()) {
    violations = ValidatePlan(inst, BuildInstanceGraph(inst), plan);
  }
  if (!violations.empty()) {
    PrintViolations(violations);
    return kExitInvalid;
  }
  Emit(g, RenderReport(g, AllocatePlan(inst, plan, PolicyOf(g))));
  return kExitOk;
}

int RunSolve(const GlobalOptions& g, const std::string& instance_path) {
  const Instance inst = LoadInstance(instance_path, g);
  const auto violations = ValidateInstance(inst);
  if (!violations.empty()) {
    PrintViolations(violations);
    return kExitInvalid;
  }
  const TwoStepResult r = RunTwoStep(inst, PolicyOf(g), LimitsOf(g));
  PrintStep1(r.step1);
  Emit(g, RenderReport(g, r));
  return StatusExit(r.step1.status);
}

int RunSweepSize(const GlobalOptions& g, const std::string& instance_path,
                 const std::string& scales) {
  const Instance inst = LoadInstance(instance_path, g);
  const auto rows = SweepTaskSize(inst, ParseList<double>(scales, "--scales"),
                                  PolicyOf(g), LimitsOf(g));
  Emit(g, SizeSweepCsv(rows));
  for (const auto& row : rows) {
    if (row.status == SolveStatus::kTimeLimitWithGap) return kExitGap;
  }
  return kExitOk;
}

int RunSweepInfra(const GlobalOptions& g, const std::string& instance_path,
                  const std::string& interfaces, const std::string& factors) {
  const Instance inst = LoadInstance(instance_path, g);
  const auto rows = SweepInfrastructure(
      inst, ParseList<int>(interfaces, "--interfaces"),
      ParseList<double>(factors, "--capacity"), PolicyOf(g), LimitsOf(g));
  Emit(g, InfraSweepCsv(rows));
  for (const auto& row : rows) {
    if (row.status == SolveStatus::kTimeLimitWithGap) return kExitGap;
  }
  return kExitOk;
}

int RunExportDot(const GlobalOptions& g, const std::string& instance_path,
                 const std::string& plan_path) {
  const Instance inst = LoadInstance(instance_path, g);
  const Plan plan = plan_path.empty() ? Plan{} : ParsePlan(ReadFile(plan_path));
  Emit(g, ExportDot(plan, inst));
  return kExitOk;
}

int RunExportLp(const GlobalOptions& g, const std::string& instance_path) {
  const Instance inst = LoadInstance(instance_path, g);
  const auto violations = ValidateInstance(inst);
  if (!violations.empty()) {
    PrintViolations(violations);
    return kExitInvalid;
  }
  Emit(g, WriteLpFormat(BuildP1(inst, BuildInstanceGraph(inst))));
  return kExitOk;
}

int RunValidate(const GlobalOptions& g, const std::string& instance_path,
                const std::string& plan_path) {
  const Instance inst = LoadInstance(instance_path, g);
  auto violations = ValidateInstance(inst);
  if (violations.empty() && !plan_path.empty()) {
    const Plan plan = ParsePlan(ReadFile(plan_path));
    violations = ValidatePlan(inst, BuildInstanceGraph(inst), plan);
  }
  if (!violations.empty()) {
    PrintViolations(violations);
    return kExitInvalid;
  }
  std::cerr << "ok\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Edge-computing offloading planner over an mmWave backhaul"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--policy", g.policy, "Step-2 metric: hbh or minR")
      ->capture_default_str();
  app.add_option("--xi", g.xi, "Usable fraction of every link (0, 1]");
  app.add_option("--time-limit", g.time_limit,
                 "Step-1 time budget, e.g. 90s, 500ms, 2m");
  app.add_option("--node-limit", g.node_limit, "Step-1 node budget (0: none)");
  app.add_option("--seed", g.seed, "Generator seed");
  app.add_option("--out", g.out, "Write the result here instead of stdout");
  app.add_option("--format", g.format, "Report format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_flag("--quiet", g.quiet, "No progress lines on stderr");

  std::string instance_path, plan_path;

  auto* generate = app.add_subcommand("generate", "Synthesize a random instance");
  GeneratorConfig gen;
  std::string servers, cloud;
  double size_min_gb = 0.1, size_max_gb = 1.0;
  generate->add_option("--bs", gen.num_bs, "Number of base stations")
      ->capture_default_str();
  generate->add_option("--interfaces", gen.interfaces, "Interfaces per station")
      ->capture_default_str();
  generate->add_option("--tasks", gen.num_tasks, "Number of tasks")
      ->capture_default_str();
  generate->add_option("--size-min", size_min_gb, "Smallest task, GB")
      ->capture_default_str();
  generate->add_option("--size-max", size_max_gb, "Largest task, GB")
      ->capture_default_str();
  generate->add_option("--servers", servers,
                       "Edge servers as bs:capacity_gb,... or 'none' "
                       "(default 1:3.2,3:3.6)");
  generate->add_option("--cloud", cloud, "Cloud-attached stations (default: last)");
  generate->add_option("--area", gen.area_width_m, "Side of the square area, m")
      ->capture_default_str();
  generate->add_option("--cloud-latency", gen.cloud_latency, "Cloud latency, s")
      ->capture_default_str();

  auto* plan = app.add_subcommand("plan", "Step 1: topology, routing, placement");
  plan->add_option("instance", instance_path)->required();

  auto* allocate = app.add_subcommand("allocate", "Step 2 on a saved plan");
  allocate->add_option("instance", instance_path)->required();
  allocate->add_option("plan", plan_path)->required();

  auto* solve = app.add_subcommand("solve", "Both steps and the latency report");
  solve->add_option("instance", instance_path)->required();

  auto* sweep_size = app.add_subcommand("sweep-size", "Re-solve across task-size scales");
  std::string scales = "60,80,100,120,140,160";
  sweep_size->add_option("instance", instance_path)->required();
  sweep_size->add_option("--scales", scales, "Percentages of the given sizes")
      ->capture_default_str();

  auto* sweep_infra =
      app.add_subcommand("sweep-infra", "Re-solve across interface counts and capacities");
  std::string interfaces = "2,3", factors = "1,0.5,0";
  sweep_infra->add_option("instance", instance_path)->required();
  sweep_infra->add_option("--interfaces", interfaces, "Interface counts")
      ->capture_default_str();
  sweep_infra->add_option("--capacity", factors, "Server capacity multipliers")
      ->capture_default_str();

  auto* export_dot = app.add_subcommand("export-dot", "Graphviz view of a plan");
  export_dot->add_option("instance", instance_path)->required();
  export_dot->add_option("plan", plan_path, "Plan file (omit for stations only)");

  auto* validate = app.add_subcommand("validate", "Check an instance and optionally a plan");
  validate->add_option("instance", instance_path)->required();
  validate->add_option("plan", plan_path);

  auto* export_lp = app.add_subcommand("export-lp", "Step-1 model in LP format");
  export_lp->add_option("instance", instance_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*generate) {
      return RunGenerate(g, gen, servers, cloud, size_min_gb, size_max_gb);
    }
    if (*plan) return RunPlan(g, instance_path);
    if (*allocate) return RunAllocate(g, instance_path, plan_path);
    if (*solve) return RunSolve(g, instance_path);
    if (*sweep_size) return RunSweepSize(g, instance_path, scales);
    if (*sweep_infra) return RunSweepInfra(g, instance_path, interfaces, factors);
    if (*export_dot) return RunExportDot(g, instance_path, plan_path);
    if (*validate) return RunValidate(g, instance_path, plan_path);
    if (*export_lp) return RunExportLp(g, instance_path);
  } catch (const UsageError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const PlanningError& e) {
    std::cerr << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::kFormat:
      case ErrorCode::kInvalidInstance:
      case ErrorCode::kInfeasible:
      case ErrorCode::kCoincidentBs:
      case ErrorCode::kShapeMismatch:
      case ErrorCode::kEmptyLink:
      case ErrorCode::kMissingAllocation:
        return kExitInvalid;
      case ErrorCode::kBadParameter:
        return kExitUsage;
      default:
        return kExitInternal;
    }
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
