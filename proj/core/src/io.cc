#include "mecplan/io.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mecplan/error.h"

namespace mecplan {
namespace {

using Json = nlohmann::ordered_json;

constexpr double kMsToSeconds = 1e-3;

[[noreturn]] void Fail(const std::string& message) {
  throw PlanningError(ErrorCode::kFormat, message);
}

// File value v such that v * factor reproduces `internal` exactly, when one
// exists within a few ulps of the plain quotient.
double ToFileUnits(double internal, double factor) {
  const double v = internal / factor;
  if (v * factor == internal) return v;
  double up = v, down = v;
  for (int k = 0; k < 8; ++k) {
    up = std::nextafter(up, std::numeric_limits<double>::infinity());
    if (up * factor == internal) return up;
    down = std::nextafter(down, -std::numeric_limits<double>::infinity());
    if (down * factor == internal) return down;
  }
  return v;
}

void CheckKeys(const Json& obj, std::initializer_list<std::string_view> allowed,
               const std::string& where) {
  if (!obj.is_object()) Fail(where + ": expected an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (std::string_view key : allowed) known = known || item.key() == key;
    if (!known) Fail(where + ": unknown field '" + item.key() + "'");
  }
}

const Json& Require(const Json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) Fail(where + ": missing field '" + key + "'");
  return *it;
}

double Number(const Json& obj, const char* key, const std::string& where) {
  const Json& v = Require(obj, key, where);
  if (!v.is_number()) Fail(where + "." + key + ": expected a number");
  return v.get<double>();
}

int Integer(const Json& obj, const char* key, const std::string& where) {
  const Json& v = Require(obj, key, where);
  if (!v.is_number_integer()) Fail(where + "." + key + ": expected an integer");
  return v.get<int>();
}

bool Boolean(const Json& obj, const char* key, const std::string& where) {
  const Json& v = Require(obj, key, where);
  if (!v.is_boolean()) Fail(where + "." + key + ": expected a boolean");
  return v.get<bool>();
}

const Json& Array(const Json& obj, const char* key, const std::string& where) {
  const Json& v = Require(obj, key, where);
  if (!v.is_array()) Fail(where + "." + key + ": expected an array");
  return v;
}

Json ParseJson(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::exception& e) {
    Fail(std::string("invalid JSON: ") + e.what());
  }
}

void CheckSchema(const Json& doc) {
  const int version = Integer(doc, "schema_version", "document");
  if (version != kSchemaVersion) {
    Fail("unsupported schema_version " + std::to_string(version));
  }
}

Json UnitsJson() {
  return Json{{"size", "GB"}, {"rate", "Gbps"}, {"time", "ms"}, {"distance", "m"}};
}

std::string Fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string Sig6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

Json NumberOrNull(double v) {
  return std::isfinite(v) ? Json(v) : Json(nullptr);
}

Json LinkJson(const Link& l) {
  return Json::array({l.from + 1, l.from_iface + 1, l.to + 1, l.to_iface + 1});
}

Link ParseLink(const Json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 4) Fail(where + ": link must be [n, i, m, j]");
  for (const Json& x : v) {
    if (!x.is_number_integer()) Fail(where + ": link ids must be integers");
  }
  return Link{v[0].get<int>() - 1, v[1].get<int>() - 1, v[2].get<int>() - 1,
              v[3].get<int>() - 1};
}

Json SiteJson(const ServingSite& site) {
  return site.is_cloud() ? Json("cloud") : Json(site.bs() + 1);
}

}  // namespace

Instance ParseInstance(std::string_view text) {
  const Json doc = ParseJson(text);
  CheckKeys(doc,
            {"schema_version", "meta", "link_model", "base_stations", "tasks",
             "cloud_latency_ms", "saturation", "rate_overrides"},
            "instance");
  CheckSchema(doc);
  Instance inst;

  if (auto it = doc.find("meta"); it != doc.end()) {
    CheckKeys(*it, {"seed", "units", "description"}, "meta");
    if (auto s = it->find("seed"); s != it->end()) {
      if (!s->is_number_unsigned() && !s->is_number_integer()) {
        Fail("meta.seed: expected an integer");
      }
      inst.seed = s->get<std::uint64_t>();
    }
    if (auto u = it->find("units"); u != it->end() && *u != UnitsJson()) {
      Fail("meta.units: only " + UnitsJson().dump() + " is supported");
    }
  }

  const Json& lm = Require(doc, "link_model", "instance");
  CheckKeys(lm,
            {"max_range_m", "rate_at_reference_gbps", "reference_distance_m",
             "path_loss_exponent", "rate_floor_gbps"},
            "link_model");
  inst.link_model.max_range_m = Number(lm, "max_range_m", "link_model");
  inst.link_model.rate_at_reference =
      Number(lm, "rate_at_reference_gbps", "link_model") * kBytesPerSecondPerGbps;
  inst.link_model.reference_distance_m =
      Number(lm, "reference_distance_m", "link_model");
  inst.link_model.path_loss_exponent =
      Number(lm, "path_loss_exponent", "link_model");
  inst.link_model.rate_floor =
      Number(lm, "rate_floor_gbps", "link_model") * kBytesPerSecondPerGbps;

  const Json& stations = Array(doc, "base_stations", "instance");
  for (size_t k = 0; k < stations.size(); ++k) {
    const Json& s = stations[k];
    const std::string where = "base_stations[" + std::to_string(k) + "]";
    CheckKeys(s, {"id", "x_m", "y_m", "interfaces", "server", "cloud_attached"},
              where);
    if (Integer(s, "id", where) != static_cast<int>(k) + 1) {
      Fail(where + ": ids must be 1..N in order");
    }
    BaseStation bs;
    bs.x = Number(s, "x_m", where);
    bs.y = Number(s, "y_m", where);
    bs.interfaces = Integer(s, "interfaces", where);
    const Json& server = Require(s, "server", where);
    if (!server.is_null()) {
      CheckKeys(server, {"capacity_gb"}, where + ".server");
      bs.has_server = true;
      bs.storage_capacity =
          Number(server, "capacity_gb", where + ".server") * kBytesPerGigabyte;
    }
    bs.cloud_attached = Boolean(s, "cloud_attached", where);
    inst.base_stations.push_back(bs);
  }

  const Json& tasks = Array(doc, "tasks", "instance");
  int with_weight = 0;
  for (size_t k = 0; k < tasks.size(); ++k) {
    const Json& t = tasks[k];
    const std::string where = "tasks[" + std::to_string(k) + "]";
    CheckKeys(t, {"id", "size_gb", "origin", "weight"}, where);
    if (Integer(t, "id", where) != static_cast<int>(k) + 1) {
      Fail(where + ": ids must be 1..B in order");
    }
    Task task;
    task.size = Number(t, "size_gb", where) * kBytesPerGigabyte;
    task.origin = Integer(t, "origin", where) - 1;
    if (t.contains("weight")) {
      task.weight = Number(t, "weight", where);
      ++with_weight;
    }
    inst.tasks.push_back(task);
  }
  if (with_weight != 0 && with_weight != static_cast<int>(tasks.size())) {
    Fail("tasks: weights must be given for every task or for none");
  }
  NormalizeWeights(inst, with_weight > 0);

  inst.cloud_latency = Number(doc, "cloud_latency_ms", "instance") * kMsToSeconds;
  inst.saturation = Number(doc, "saturation", "instance");

  if (auto it = doc.find("rate_overrides"); it != doc.end()) {
    if (!it->is_array()) Fail("rate_overrides: expected an array");
    for (size_t k = 0; k < it->size(); ++k) {
      const Json& o = (*it)[k];
      const std::string where = "rate_overrides[" + std::to_string(k) + "]";
      CheckKeys(o, {"n", "m", "rate_gbps", "note"}, where);
      RateOverride r;
      r.n = Integer(o, "n", where) - 1;
      r.m = Integer(o, "m", where) - 1;
      r.rate = Number(o, "rate_gbps", where) * kBytesPerSecondPerGbps;
      if (auto note = o.find("note"); note != o.end()) {
        if (!note->is_string()) Fail(where + ".note: expected a string");
        r.note = note->get<std::string>();
      }
      inst.rate_overrides.push_back(std::move(r));
    }
  }
  return inst;
}

std::string SerializeInstance(const Instance& inst) {
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["meta"] = Json{{"seed", inst.seed}, {"units", UnitsJson()}};
  const LinkModelConfig& lm = inst.link_model;
  doc["link_model"] = Json{
      {"max_range_m", lm.max_range_m},
      {"rate_at_reference_gbps",
       ToFileUnits(lm.rate_at_reference, kBytesPerSecondPerGbps)},
      {"reference_distance_m", lm.reference_distance_m},
      {"path_loss_exponent", lm.path_loss_exponent},
      {"rate_floor_gbps", ToFileUnits(lm.rate_floor, kBytesPerSecondPerGbps)}};
  Json stations = Json::array();
  for (int n = 0; n < inst.num_bs(); ++n) {
    const BaseStation& bs = inst.base_stations[n];
    Json server = nullptr;
    if (bs.has_server) {
      server = Json{{"capacity_gb",
                     ToFileUnits(bs.storage_capacity, kBytesPerGigabyte)}};
    }
    stations.push_back(Json{{"id", n + 1},
                            {"x_m", bs.x},
                            {"y_m", bs.y},
                            {"interfaces", bs.interfaces},
                            {"server", server},
                            {"cloud_attached", bs.cloud_attached}});
  }
  doc["base_stations"] = std::move(stations);
  Json tasks = Json::array();
  for (int b = 0; b < inst.num_tasks(); ++b) {
    const Task& t = inst.tasks[b];
    tasks.push_back(Json{{"id", b + 1},
                         {"size_gb", ToFileUnits(t.size, kBytesPerGigabyte)},
                         {"origin", t.origin + 1},
                         {"weight", t.weight}});
  }
  doc["tasks"] = std::move(tasks);
  doc["cloud_latency_ms"] = ToFileUnits(inst.cloud_latency, kMsToSeconds);
  doc["saturation"] = inst.saturation;
  if (!inst.rate_overrides.empty()) {
    Json overrides = Json::array();
    for (const RateOverride& r : inst.rate_overrides) {
      Json o{{"n", r.n + 1},
             {"m", r.m + 1},
             {"rate_gbps", ToFileUnits(r.rate, kBytesPerSecondPerGbps)}};
      if (!r.note.empty()) o["note"] = r.note;
      overrides.push_back(std::move(o));
    }
    doc["rate_overrides"] = std::move(overrides);
  }
  return doc.dump(2) + "\n";
}

Plan ParsePlan(std::string_view text) {
  const Json doc = ParseJson(text);
  CheckKeys(doc, {"schema_version", "links", "routes", "step1"}, "plan");
  CheckSchema(doc);
  Plan plan;
  const Json& links = Array(doc, "links", "plan");
  for (size_t k = 0; k < links.size(); ++k) {
    plan.links.push_back(ParseLink(links[k], "links[" + std::to_string(k) + "]"));
  }
  const Json& routes = Array(doc, "routes", "plan");
  for (size_t k = 0; k < routes.size(); ++k) {
    const Json& r = routes[k];
    const std::string where = "routes[" + std::to_string(k) + "]";
    CheckKeys(r, {"task", "path", "site", "cloud_entry"}, where);
    if (Integer(r, "task", where) != static_cast<int>(k) + 1) {
      Fail(where + ": tasks must be 1..B in order");
    }
    TaskRoute route;
    const Json& path = Array(r, "path", where);
    for (size_t h = 0; h < path.size(); ++h) {
      route.path.push_back(
          ParseLink(path[h], where + ".path[" + std::to_string(h) + "]"));
    }
    const Json& site = Require(r, "site", where);
    if (site.is_string() && site.get<std::string>() == "cloud") {
      route.site = ServingSite::Cloud();
    } else if (site.is_number_integer()) {
      route.site = ServingSite::AtBs(site.get<int>() - 1);
    } else {
      Fail(where + ".site: expected a station id or \"cloud\"");
    }
    if (auto entry = r.find("cloud_entry"); entry != r.end() && !entry->is_null()) {
      if (!entry->is_number_integer()) {
        Fail(where + ".cloud_entry: expected a station id");
      }
      route.cloud_entry = entry->get<int>() - 1;
    }
    plan.routes.push_back(std::move(route));
  }
  return plan;
}

std::string SerializePlan(const Plan& plan, const SolveOutcome* step1) {
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  Json links = Json::array();
  for (const Link& l : plan.links) links.push_back(LinkJson(l));
  doc["links"] = std::move(links);
  Json routes = Json::array();
  for (size_t b = 0; b < plan.routes.size(); ++b) {
    const TaskRoute& r = plan.routes[b];
    Json path = Json::array();
    for (const Link& l : r.path) path.push_back(LinkJson(l));
    routes.push_back(Json{
        {"task", b + 1},
        {"path", std::move(path)},
        {"site", SiteJson(r.site)},
        {"cloud_entry", r.cloud_entry ? Json(*r.cloud_entry + 1) : Json(nullptr)}});
  }
  doc["routes"] = std::move(routes);
  if (step1 != nullptr) {
    doc["step1"] = Json{{"status", SolveStatusName(step1->status)},
                        {"objective_s", step1->objective_value},
                        {"best_bound_s", NumberOrNull(step1->best_bound)},
                        {"gap", NumberOrNull(step1->gap)},
                        {"nodes", step1->nodes_explored}};
  }
  return doc.dump(2) + "\n";
}

std::string ReportCsv(const LatencyReport& report, Metric policy) {
  std::string out =
      "task, size_gb, origin, path, latency_s, site, hops, latency_hbh_s, "
      "latency_minr_s\n";
  for (const TaskLatency& t : report.tasks) {
    const double latency =
        policy == Metric::kHbh ? t.latency_hbh : t.latency_minr;
    out += std::to_string(t.task + 1) + ", " +
           Fixed2(t.size / kBytesPerGigabyte) + ", " +
           std::to_string(t.origin + 1) + ", " + t.path + ", " +
           Fixed2(latency) + ", " +
           (t.site.is_cloud() ? std::string("cloud")
                              : std::to_string(t.site.bs() + 1)) +
           ", " + std::to_string(t.hops) + ", " + Sig6(t.latency_hbh) + ", " +
           Sig6(t.latency_minr) + "\n";
  }
  return out;
}

std::string ReportJson(const TwoStepResult& result) {
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["policy"] = MetricName(result.policy);
  doc["step1"] = Json{{"status", SolveStatusName(result.step1.status)},
                      {"objective_s", result.step1.objective_value},
                      {"best_bound_s", NumberOrNull(result.step1.best_bound)},
                      {"gap", NumberOrNull(result.step1.gap)},
                      {"nodes", result.step1.nodes_explored}};
  const PolicyTotals& t = result.totals;
  doc["totals"] = Json{{"step1_objective_s", t.step1_objective},
                       {"hbh_fixed_s", t.hbh_fixed},
                       {"hbh_optimized_s", t.hbh_optimized},
                       {"minr_fixed_s", t.minr_fixed},
                       {"minr_optimized_s", t.minr_optimized}};
  doc["total_hbh_s"] = result.report.total_hbh;
  doc["total_minr_s"] = result.report.total_minr;
  Json tasks = Json::array();
  for (const TaskLatency& row : result.report.tasks) {
    tasks.push_back(Json{
        {"id", row.task + 1},
        {"size_gb", row.size / kBytesPerGigabyte},
        {"origin", row.origin + 1},
        {"site", SiteJson(row.site)},
        {"cloud_entry",
         row.cloud_entry ? Json(*row.cloud_entry + 1) : Json(nullptr)},
        {"path", row.path},
        {"hops", row.hops},
        {"latency_hbh_s", row.latency_hbh},
        {"latency_minr_s", row.latency_minr}});
  }
  doc["tasks"] = std::move(tasks);
  return doc.dump(2) + "\n";
}

ParsedReport ParseReportJson(std::string_view text) {
  const Json doc = ParseJson(text);
  CheckSchema(doc);
  ParsedReport out;
  const Json& policy = Require(doc, "policy", "report");
  if (!policy.is_string()) Fail("report.policy: expected a string");
  out.policy = policy.get<std::string>();
  const Json& t = Require(doc, "totals", "report");
  out.totals.step1_objective = Number(t, "step1_objective_s", "totals");
  out.totals.hbh_fixed = Number(t, "hbh_fixed_s", "totals");
  out.totals.hbh_optimized = Number(t, "hbh_optimized_s", "totals");
  out.totals.minr_fixed = Number(t, "minr_fixed_s", "totals");
  out.totals.minr_optimized = Number(t, "minr_optimized_s", "totals");
  out.total_hbh = Number(doc, "total_hbh_s", "report");
  out.total_minr = Number(doc, "total_minr_s", "report");
  return out;
}

std::string SizeSweepCsv(const std::vector<SizeSweepRow>& rows) {
  std::string out =
      "scale_percent, status, gap, fixed_total_s, optimized_total_s, "
      "hbh_fixed_s, hbh_optimized_s, minr_fixed_s, minr_optimized_s, "
      "cloud_tasks\n";
  for (const SizeSweepRow& r : rows) {
    out += Sig6(r.scale_percent) + ", " + std::string(SolveStatusName(r.status)) +
           ", " + Sig6(r.gap) + ", " + Sig6(r.fixed_total) + ", " +
           Sig6(r.optimized_total) + ", " + Sig6(r.totals.hbh_fixed) + ", " +
           Sig6(r.totals.hbh_optimized) + ", " + Sig6(r.totals.minr_fixed) +
           ", " + Sig6(r.totals.minr_optimized) + ", " +
           std::to_string(r.cloud_tasks) + "\n";
  }
  return out;
}

std::string InfraSweepCsv(const std::vector<InfraSweepRow>& rows) {
  std::string out =
      "interfaces, capacity_factor, status, gap, fixed_total_s, "
      "optimized_total_s, cloud_tasks, tasks\n";
  for (const InfraSweepRow& r : rows) {
    out += std::to_string(r.interfaces) + ", " + Sig6(r.capacity_factor) +
           ", " + std::string(SolveStatusName(r.status)) + ", " + Sig6(r.gap) +
           ", " + Sig6(r.fixed_total) + ", " + Sig6(r.optimized_total) + ", " +
           std::to_string(r.cloud_tasks) + ", " + std::to_string(r.num_tasks) +
           "\n";
  }
  return out;
}

std::string ExportDot(const Plan& plan, const Instance& inst) {
  std::ostringstream out;
  out << "digraph backhaul {\n";
  out << "  node [fontname=\"Helvetica\"];\n";
  for (int n = 0; n < inst.num_bs(); ++n) {
    const BaseStation& bs = inst.base_stations[n];
    out << "  bs" << n + 1 << " [label=\"BS" << n + 1 << "\", shape="
        << (bs.has_server ? "circle" : "box");
    if (bs.cloud_attached) out << ", peripheries=2, xlabel=\"cloud\"";
    out << "];\n";
  }
  std::map<Link, int> count;
  for (const TaskRoute& r : plan.routes) {
    for (const Link& l : r.path) ++count[l];
  }
  for (const Link& l : plan.links) {
    const int tasks = count.count(l) ? count.at(l) : 0;
    out << "  bs" << l.from + 1 << " -> bs" << l.to + 1 << " [label=\""
        << FormatLink(l) << "\", xlabel=\"" << tasks
        << (tasks == 1 ? " task" : " tasks") << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteFile(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail("cannot write " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
}

}  // namespace mecplan
