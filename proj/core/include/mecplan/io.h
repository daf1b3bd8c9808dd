#ifndef MECPLAN_IO_H_
#define MECPLAN_IO_H_

// File formats. Instances, plans and reports are JSON documents carrying a
// schema_version; tables are comma-separated text; topologies are Graphviz
// DOT. Files use GB, Gbps, ms and m; conversion to internal units happens
// only here.

#include <string>
#include <string_view>
#include <vector>

#include "mecplan/milp.h"
#include "mecplan/model.h"
#include "mecplan/pipeline.h"

namespace mecplan {

inline constexpr int kSchemaVersion = 1;

// Throws PlanningError(kFormat) on malformed input or unknown fields.
Instance ParseInstance(std::string_view text);
std::string SerializeInstance(const Instance& inst);

Plan ParsePlan(std::string_view text);
// `step1` adds the solver outcome (status, objective, gap, nodes).
std::string SerializePlan(const Plan& plan, const SolveOutcome* step1 = nullptr);

// One row per task: display columns rounded to two decimals, then the
// full-precision columns at 6 significant digits.
std::string ReportCsv(const LatencyReport& report, Metric policy);
std::string ReportJson(const TwoStepResult& result);

struct ParsedReport {
  std::string policy;
  PolicyTotals totals;
  double total_hbh = 0.0;
  double total_minr = 0.0;
};
ParsedReport ParseReportJson(std::string_view text);

std::string SizeSweepCsv(const std::vector<SizeSweepRow>& rows);
std::string InfraSweepCsv(const std::vector<InfraSweepRow>& rows);

// Graphviz rendering of the established topology: servers as circles, other
// stations as boxes, cloud-attached stations drawn with a double outline.
std::string ExportDot(const Plan& plan, const Instance& inst);

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::string_view contents);

}  // namespace mecplan

#endif  // MECPLAN_IO_H_
