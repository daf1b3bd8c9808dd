#include "mecplan/milp.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <memory>
#include <queue>
#include <set>
#include <string>
#include <utility>

#include "mecplan/error.h"

namespace mecplan {

std::string_view VarFamilyName(VarFamily family) {
  switch (family) {
    case VarFamily::kX: return "X";
    case VarFamily::kXb: return "Xb";
    case VarFamily::kY: return "Y";
    case VarFamily::kW: return "W";
    case VarFamily::kZ: return "Z";
    case VarFamily::kU: return "U";
  }
  return "?";
}

std::string_view SolveStatusName(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "Optimal";
    case SolveStatus::kTimeLimitWithGap: return "TimeLimitWithGap";
    case SolveStatus::kInfeasible: return "Infeasible";
  }
  return "?";
}

std::optional<int> MilpModel::LinkIndex(const Link& link) const {
  auto it = link_index_.find(link);
  if (it == link_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> MilpModel::CloudEntryIndex(int bs) const {
  auto it = std::find(cloud_bs_.begin(), cloud_bs_.end(), bs);
  if (it == cloud_bs_.end()) return std::nullopt;
  return static_cast<int>(it - cloud_bs_.begin());
}

int MilpModel::CountFamily(VarFamily family) const {
  return static_cast<int>(
      std::count_if(variables_.begin(), variables_.end(),
                    [family](const MilpVariable& v) { return v.family == family; }));
}

int MilpModel::CountRows(std::string_view tag) const {
  return static_cast<int>(std::count_if(
      rows_.begin(), rows_.end(),
      [tag](const MilpRow& r) { return r.tag == tag; }));
}

int MilpModel::AddVariable(VarFamily family, bool binary, double lower,
                           double upper, double cost, std::string name) {
  variables_.push_back(
      MilpVariable{family, binary, lower, upper, cost, std::move(name)});
  return num_variables() - 1;
}

void MilpModel::AddRow(std::string_view tag, std::string name,
                       std::vector<lp::Entry> entries, double lower,
                       double upper) {
  // Merge repeated variables so every row is a proper sparse vector.
  std::sort(entries.begin(), entries.end(),
            [](const lp::Entry& a, const lp::Entry& b) { return a.index < b.index; });
  std::vector<lp::Entry> merged;
  for (const lp::Entry& e : entries) {
    if (!merged.empty() && merged.back().index == e.index) {
      merged.back().value += e.value;
    } else {
      merged.push_back(e);
    }
  }
  std::erase_if(merged, [](const lp::Entry& e) { return e.value == 0.0; });
  rows_.push_back(MilpRow{std::string(tag), std::move(name), std::move(merged),
                          lower, upper});
}

namespace {

std::string Id(int zero_based) { return std::to_string(zero_based + 1); }

std::string LinkSuffix(const Link& l) {
  return Id(l.from) + "_" + Id(l.from_iface) + "_" + Id(l.to) + "_" +
         Id(l.to_iface);
}

}  // namespace

MilpModel BuildP1(const Instance& inst, const LinkGraph& graph) {
  MilpModel model;
  const int n_bs = inst.num_bs();
  const int n_tasks = inst.num_tasks();
  model.num_bs_ = n_bs;
  model.num_tasks_ = n_tasks;
  model.big_m_ = static_cast<double>(n_tasks);
  model.links_ = graph.candidate_links();
  model.cloud_bs_ = inst.CloudAttached();
  for (const Task& t : inst.tasks) model.origins_.push_back(t.origin);
  const int n_links = static_cast<int>(model.links_.size());
  for (int l = 0; l < n_links; ++l) model.link_index_[model.links_[l]] = l;
  const double big_m = model.big_m_;

  for (int l = 0; l < n_links; ++l) {
    model.x_.push_back(model.AddVariable(VarFamily::kX, true, 0, 1, 0,
                                         "X_" + LinkSuffix(model.links_[l])));
  }
  for (int l = 0; l < n_links; ++l) {
    for (int b = 0; b < n_tasks; ++b) {
      model.xb_.push_back(model.AddVariable(
          VarFamily::kXb, true, 0, 1, 0,
          "Xb_" + LinkSuffix(model.links_[l]) + "_" + Id(b)));
    }
  }
  for (int s = 0; s <= n_bs; ++s) {
    for (int b = 0; b < n_tasks; ++b) {
      const std::string site = s == n_bs ? "cloud" : Id(s);
      model.y_.push_back(model.AddVariable(VarFamily::kY, true, 0, 1, 0,
                                           "Y_" + site + "_" + Id(b)));
    }
  }
  for (int e = 0; e < static_cast<int>(model.cloud_bs_.size()); ++e) {
    for (int b = 0; b < n_tasks; ++b) {
      model.w_.push_back(model.AddVariable(
          VarFamily::kW, true, 0, 1, inst.tasks[b].weight * inst.cloud_latency,
          "W_" + Id(model.cloud_bs_[e]) + "_" + Id(b)));
    }
  }
  for (int l = 0; l < n_links; ++l) {
    model.z_.push_back(model.AddVariable(VarFamily::kZ, false, 0, big_m, 0,
                                         "Z_" + LinkSuffix(model.links_[l])));
  }
  for (int l = 0; l < n_links; ++l) {
    const double rate = graph.LinkRate(model.links_[l]);
    for (int b = 0; b < n_tasks; ++b) {
      const Task& t = inst.tasks[b];
      model.u_.push_back(model.AddVariable(
          VarFamily::kU, false, 0, big_m, t.weight * t.size / rate,
          "U_" + LinkSuffix(model.links_[l]) + "_" + Id(b)));
    }
  }
  for (int l = 0; l < n_links; ++l) {
    for (int b = 0; b < n_tasks; ++b) model.branch_vars_.push_back(model.xb(l, b));
  }
  for (int s = 0; s <= n_bs; ++s) {
    for (int b = 0; b < n_tasks; ++b) model.branch_vars_.push_back(model.y(s, b));
  }
  for (int e = 0; e < static_cast<int>(model.cloud_bs_.size()); ++e) {
    for (int b = 0; b < n_tasks; ++b) model.branch_vars_.push_back(model.w(e, b));
  }

  std::vector<std::vector<int>> out_links(n_bs), in_links(n_bs);
  for (int l = 0; l < n_links; ++l) {
    out_links[model.links_[l].from].push_back(l);
    in_links[model.links_[l].to].push_back(l);
  }

  // Interface connectivity: one link per ordered pair, one link per interface.
  for (int n = 0; n < n_bs; ++n) {
    for (int m = 0; m < n_bs; ++m) {
      if (n == m || !graph.delta(n, m)) continue;
      std::vector<lp::Entry> row;
      for (int l : out_links[n]) {
        if (model.links_[l].to == m) row.push_back({model.x(l), 1.0});
      }
      model.AddRow(row_tag::kPairLink, "pair_" + Id(n) + "_" + Id(m),
                   std::move(row), -lp::kInfinity, 1.0);
    }
  }
  for (int n = 0; n < n_bs; ++n) {
    for (int i = 0; i < graph.interfaces(n); ++i) {
      std::vector<lp::Entry> row;
      for (int l : out_links[n]) {
        if (model.links_[l].from_iface == i) row.push_back({model.x(l), 1.0});
      }
      for (int l : in_links[n]) {
        if (model.links_[l].to_iface == i) row.push_back({model.x(l), 1.0});
      }
      if (row.empty()) continue;
      model.AddRow(row_tag::kInterface, "iface_" + Id(n) + "_" + Id(i),
                   std::move(row), -lp::kInfinity, 1.0);
    }
  }

  // Task association to links.
  for (int l = 0; l < n_links; ++l) {
    for (int b = 0; b < n_tasks; ++b) {
      model.AddRow(row_tag::kTaskLink,
                   "tlink_" + LinkSuffix(model.links_[l]) + "_" + Id(b),
                   {{model.xb(l, b), 1.0}, {model.x(l), -1.0}}, -lp::kInfinity,
                   0.0);
    }
  }
  for (int l = 0; l < n_links; ++l) {
    std::vector<lp::Entry> row{{model.x(l), 1.0}};
    for (int b = 0; b < n_tasks; ++b) row.push_back({model.xb(l, b), -1.0});
    model.AddRow(row_tag::kRedundantLink, "used_" + LinkSuffix(model.links_[l]),
                 std::move(row), -lp::kInfinity, 0.0);
  }

  // Binary flow conservation:
  //   inflow + T = Y + outflow (+ W at cloud-attached stations).
  for (int n = 0; n < n_bs; ++n) {
    const std::optional<int> entry = model.CloudEntryIndex(n);
    for (int b = 0; b < n_tasks; ++b) {
      std::vector<lp::Entry> row;
      for (int l : in_links[n]) row.push_back({model.xb(l, b), 1.0});
      for (int l : out_links[n]) row.push_back({model.xb(l, b), -1.0});
      row.push_back({model.y(n, b), -1.0});
      if (entry) row.push_back({model.w(*entry, b), -1.0});
      const double t_nb = inst.tasks[b].origin == n ? 1.0 : 0.0;
      model.AddRow(row_tag::kFlow, "flow_" + Id(n) + "_" + Id(b),
                   std::move(row), -t_nb, -t_nb);
    }
  }

  // Server capacity.
  for (int n = 0; n < n_bs; ++n) {
    const double pi_n = inst.base_stations[n].has_server ? 1.0 : 0.0;
    for (int b = 0; b < n_tasks; ++b) {
      model.AddRow(row_tag::kServerColocation,
                   "coloc_" + Id(n) + "_" + Id(b), {{model.y(n, b), 1.0}},
                   -lp::kInfinity, pi_n);
    }
  }
  for (int n = 0; n < n_bs; ++n) {
    const BaseStation& bs = inst.base_stations[n];
    if (!bs.has_server || n_tasks == 0) continue;
    // Normalized by C_n to keep coefficients near one.
    std::vector<lp::Entry> row;
    for (int b = 0; b < n_tasks; ++b) {
      row.push_back({model.y(n, b), inst.tasks[b].size / bs.storage_capacity});
    }
    model.AddRow(row_tag::kServerCapacity, "cap_" + Id(n), std::move(row),
                 -lp::kInfinity, 1.0);
  }
  for (int n = 0; n < n_bs; ++n) {
    for (int b = 0; b < n_tasks; ++b) {
      std::vector<lp::Entry> row{{model.y(n, b), 1.0}};
      for (int l : in_links[n]) row.push_back({model.xb(l, b), -1.0});
      const double t_nb = inst.tasks[b].origin == n ? 1.0 : 0.0;
      model.AddRow(row_tag::kServerReception, "recv_" + Id(n) + "_" + Id(b),
                   std::move(row), -lp::kInfinity, t_nb);
    }
  }

  // Cloud constraints.
  for (int e = 0; e < static_cast<int>(model.cloud_bs_.size()); ++e) {
    const int p = model.cloud_bs_[e];
    for (int b = 0; b < n_tasks; ++b) {
      std::vector<lp::Entry> row{{model.w(e, b), 1.0}};
      for (int l : in_links[p]) row.push_back({model.xb(l, b), -1.0});
      const double t_pb = inst.tasks[b].origin == p ? 1.0 : 0.0;
      model.AddRow(row_tag::kCloudReach, "creach_" + Id(p) + "_" + Id(b),
                   std::move(row), -lp::kInfinity, t_pb);
    }
  }
  for (int b = 0; b < n_tasks; ++b) {
    std::vector<lp::Entry> row{{model.y(n_bs, b), 1.0}};
    for (int e = 0; e < static_cast<int>(model.cloud_bs_.size()); ++e) {
      row.push_back({model.w(e, b), -1.0});
    }
    model.AddRow(row_tag::kCloudServe, "cserve_" + Id(b), std::move(row),
                 -lp::kInfinity, 0.0);
  }

  // Every task processed exactly once, leaving its origin exactly once.
  for (int b = 0; b < n_tasks; ++b) {
    std::vector<lp::Entry> row;
    for (int s = 0; s <= n_bs; ++s) row.push_back({model.y(s, b), 1.0});
    model.AddRow(row_tag::kProcessAll, "process_" + Id(b), std::move(row), 1.0,
                 1.0);
  }
  for (int b = 0; b < n_tasks; ++b) {
    const int o = inst.tasks[b].origin;
    std::vector<lp::Entry> row;
    for (int l : out_links[o]) row.push_back({model.xb(l, b), 1.0});
    row.push_back({model.y(o, b), 1.0});
    if (auto entry = model.CloudEntryIndex(o)) {
      row.push_back({model.w(*entry, b), 1.0});
    }
    model.AddRow(row_tag::kOriginDeparture, "depart_" + Id(b), std::move(row),
                 1.0, 1.0);
  }

  // Equal-share linearization.
  for (int l = 0; l < n_links; ++l) {
    std::vector<lp::Entry> row{{model.z(l), 1.0}};
    for (int b = 0; b < n_tasks; ++b) row.push_back({model.xb(l, b), -1.0});
    model.AddRow(row_tag::kZDefinition, "zdef_" + LinkSuffix(model.links_[l]),
                 std::move(row), 0.0, 0.0);
  }
  for (int l = 0; l < n_links; ++l) {
    const std::string suffix = LinkSuffix(model.links_[l]);
    for (int b = 0; b < n_tasks; ++b) {
      const int u = model.u(l, b);
      const int xb = model.xb(l, b);
      const int z = model.z(l);
      const std::string s = suffix + "_" + Id(b);
      model.AddRow(row_tag::kULeBigM, "ubx_" + s, {{u, 1.0}, {xb, -big_m}},
                   -lp::kInfinity, 0.0);
      model.AddRow(row_tag::kULeZ, "uz_" + s, {{u, 1.0}, {z, -1.0}},
                   -lp::kInfinity, 0.0);
      model.AddRow(row_tag::kUGeZ, "ugz_" + s,
                   {{u, 1.0}, {z, -1.0}, {xb, -big_m}}, -big_m, lp::kInfinity);
      model.AddRow(row_tag::kUNonNegative, "upos_" + s, {{u, 1.0}}, 0.0,
                   lp::kInfinity);
    }
  }
  return model;
}

std::optional<std::vector<double>> EncodePlan(const MilpModel& model,
                                              const Plan& plan) {
  const int n_tasks = model.num_tasks();
  const int n_links = static_cast<int>(model.links().size());
  if (static_cast<int>(plan.routes.size()) != n_tasks) return std::nullopt;
  std::vector<double> point(model.num_variables(), 0.0);
  std::set<Link> seen;
  for (const Link& link : plan.links) {
    auto l = model.LinkIndex(link);
    if (!l || !seen.insert(link).second) return std::nullopt;
    point[model.x(*l)] = 1.0;
  }
  for (int b = 0; b < n_tasks; ++b) {
    const TaskRoute& route = plan.routes[b];
    for (const Link& link : route.path) {
      auto l = model.LinkIndex(link);
      // A hop taken twice has no 0/1 encoding.
      if (!l || point[model.xb(*l, b)] != 0.0) return std::nullopt;
      point[model.xb(*l, b)] = 1.0;
    }
    if (route.site.is_cloud()) {
      point[model.y(model.num_bs(), b)] = 1.0;
    } else {
      const int s = route.site.bs();
      if (s < 0 || s >= model.num_bs()) return std::nullopt;
      point[model.y(s, b)] = 1.0;
    }
    if (route.cloud_entry.has_value()) {
      auto e = model.CloudEntryIndex(*route.cloud_entry);
      if (!e) return std::nullopt;
      point[model.w(*e, b)] = 1.0;
    }
  }
  for (int l = 0; l < n_links; ++l) {
    double z = 0.0;
    for (int b = 0; b < n_tasks; ++b) z += point[model.xb(l, b)];
    point[model.z(l)] = z;
    for (int b = 0; b < n_tasks; ++b) {
      point[model.u(l, b)] = point[model.xb(l, b)] * z;
    }
  }
  return point;
}

std::vector<std::string> ViolatedRows(const MilpModel& model,
                                      std::span<const double> point,
                                      double tolerance) {
  std::vector<std::string> out;
  for (int j = 0; j < model.num_variables(); ++j) {
    const MilpVariable& v = model.variables()[j];
    const double x = point[j];
    if (x < v.lower - tolerance || x > v.upper + tolerance) {
      out.push_back("bound:" + v.name);
    } else if (v.binary && std::min(x, 1.0 - x) > tolerance &&
               std::abs(x) > tolerance) {
      out.push_back("integrality:" + v.name);
    }
  }
  for (const MilpRow& row : model.rows()) {
    double activity = 0.0;
    for (const lp::Entry& e : row.entries) activity += e.value * point[e.index];
    if (activity < row.lower - tolerance * (1.0 + std::abs(row.lower)) ||
        activity > row.upper + tolerance * (1.0 + std::abs(row.upper))) {
      out.push_back(row.tag + ":" + row.name);
    }
  }
  return out;
}

double ObjectiveValue(const MilpModel& model, std::span<const double> point) {
  double z = 0.0;
  for (int j = 0; j < model.num_variables(); ++j) {
    z += model.variables()[j].cost * point[j];
  }
  return z;
}

std::optional<Plan> DecodePlan(const MilpModel& model,
                               std::span<const double> point) {
  const int n_bs = model.num_bs();
  const int n_tasks = model.num_tasks();
  const int n_links = static_cast<int>(model.links().size());
  Plan plan;
  std::set<Link> used;
  for (int b = 0; b < n_tasks; ++b) {
    int site = -1;
    for (int s = 0; s <= n_bs; ++s) {
      if (point[model.y(s, b)] >= 0.5) {
        site = s;
        break;
      }
    }
    if (site < 0) return std::nullopt;
    TaskRoute route;
    int target = site;
    if (site == n_bs) {
      route.site = ServingSite::Cloud();
      int entry = -1;
      for (int e = 0; e < static_cast<int>(model.cloud_bs().size()); ++e) {
        if (point[model.w(e, b)] >= 0.5) {
          entry = e;
          break;
        }
      }
      if (entry < 0) return std::nullopt;
      target = model.cloud_bs()[entry];
      route.cloud_entry = target;
    } else {
      route.site = ServingSite::AtBs(site);
    }

    const int origin = model.task_origin(b);
    std::vector<int> via(n_bs, -1);
    std::vector<char> seen(n_bs, 0);
    std::deque<int> queue{origin};
    seen[origin] = 1;
    while (!queue.empty() && !seen[target]) {
      const int n = queue.front();
      queue.pop_front();
      for (int l = 0; l < n_links; ++l) {
        const Link& link = model.links()[l];
        if (link.from != n || seen[link.to] || point[model.xb(l, b)] < 0.5) {
          continue;
        }
        seen[link.to] = 1;
        via[link.to] = l;
        queue.push_back(link.to);
      }
    }
    if (!seen[target]) return std::nullopt;
    for (int n = target; n != origin; n = model.links()[via[n]].from) {
      route.path.push_back(model.links()[via[n]]);
    }
    std::reverse(route.path.begin(), route.path.end());
    used.insert(route.path.begin(), route.path.end());
    plan.routes.push_back(std::move(route));
  }
  plan.links.assign(used.begin(), used.end());
  return plan;
}

namespace {

// U carries a positive cost and is bounded below by u_ge_z and u_nonneg, so
// at any LP optimum U = max(0, Z - B (1 - X^b)), which already satisfies the
// two upper rows. Dropping them leaves every relaxation value unchanged.
bool RedundantInRelaxation(const MilpModel& model, const MilpRow& row) {
  if (row.tag != row_tag::kULeBigM && row.tag != row_tag::kULeZ) return false;
  for (const lp::Entry& e : row.entries) {
    const MilpVariable& v = model.variables()[e.index];
    if (v.family == VarFamily::kU && !(v.cost > 0.0)) return false;
  }
  return true;
}

// Strengthened LP view used inside SolveP1. Every integer point satisfies
//  - U_lb >= X^b_lb: a task on a link sees at least its own load, and
//  - a big-M of B - 1 in u_ge_z: without task b a link carries at most
//    B - 1 others.
// The first is imposed by substituting U = X^b + V with V >= 0, which keeps
// the row count of the plain relaxation. Column j of the LP holds V in place
// of U; Restore maps a solution back.
std::vector<MilpRow> StrengthenedRows(const MilpModel& model,
                                      const std::vector<const MilpRow*>& rows) {
  const int n = model.num_variables();
  std::vector<int> partner(n, -1);  // U column -> its X^b column
  for (int l = 0; l < static_cast<int>(model.links().size()); ++l) {
    for (int b = 0; b < model.num_tasks(); ++b) partner[model.u(l, b)] = model.xb(l, b);
  }
  const double big_m = model.big_m();
  const double m = std::max(big_m - 1.0, 0.0);
  std::vector<MilpRow> out;
  out.reserve(rows.size());
  for (const MilpRow* src : rows) {
    MilpRow row = *src;
    if (row.tag == row_tag::kUGeZ) {
      for (lp::Entry& e : row.entries) {
        if (e.value == -big_m) e.value = -m;
      }
      row.lower = -m;
    }
    std::vector<lp::Entry> shifted;
    for (const lp::Entry& e : row.entries) {
      if (partner[e.index] >= 0) shifted.push_back({partner[e.index], e.value});
    }
    for (const lp::Entry& add : shifted) {
      auto it = std::find_if(row.entries.begin(), row.entries.end(),
                             [&](const lp::Entry& e) { return e.index == add.index; });
      if (it == row.entries.end()) {
        row.entries.push_back(add);
      } else {
        it->value += add.value;
      }
    }
    std::erase_if(row.entries, [](const lp::Entry& e) { return e.value == 0.0; });
    out.push_back(std::move(row));
  }
  return out;
}

// LP view of the model: singleton rows become column bounds. With
// `strengthen` the rows and U columns follow StrengthenedRows.
class Relaxation {
 public:
  Relaxation(const MilpModel& model, bool strengthen) : model_(model) {
    const int n = model.num_variables();
    lower_.resize(n);
    upper_.resize(n);
    std::vector<double> cost(n);
    for (int j = 0; j < n; ++j) {
      lower_[j] = model.variables()[j].lower;
      upper_[j] = model.variables()[j].upper;
      cost[j] = model.variables()[j].cost;
    }
    for (const MilpRow& row : model.rows()) {
      if (row.entries.empty()) {
        if (row.lower > 1e-9 || row.upper < -1e-9) trivially_infeasible_ = true;
        continue;
      }
      if (RedundantInRelaxation(model, row)) continue;
      if (row.entries.size() == 1) {
        const lp::Entry& e = row.entries.front();
        double lo = row.lower / e.value;
        double hi = row.upper / e.value;
        if (e.value < 0) std::swap(lo, hi);
        lower_[e.index] = std::max(lower_[e.index], lo);
        upper_[e.index] = std::min(upper_[e.index], hi);
        continue;
      }
      lp_rows_.push_back(&row);
    }
    if (strengthen) {
      owned_rows_ = StrengthenedRows(model, lp_rows_);
      for (std::size_t i = 0; i < owned_rows_.size(); ++i) lp_rows_[i] = &owned_rows_[i];
      for (int l = 0; l < static_cast<int>(model.links().size()); ++l) {
        for (int b = 0; b < model.num_tasks(); ++b) {
          const int u = model.u(l, b);
          const int xb = model.xb(l, b);
          cost[xb] += cost[u];
          lower_[u] = std::max(lower_[u], 0.0);
          shifted_.emplace_back(u, xb);
        }
      }
    }
    for (int j = 0; j < n; ++j) {
      const MilpVariable& v = model.variables()[j];
      if (v.binary) {
        // Integral bounds for binaries.
        lower_[j] = std::ceil(lower_[j] - 1e-9);
        upper_[j] = std::floor(upper_[j] + 1e-9);
      }
      lp_.AddVariable(lower_[j], upper_[j], cost[j]);
    }
    var_rows_.resize(n);
    for (int i = 0; i < static_cast<int>(lp_rows_.size()); ++i) {
      const MilpRow& row = *lp_rows_[i];
      lp_.AddRow(row.entries, row.lower, row.upper);
      for (const lp::Entry& e : row.entries) var_rows_[e.index].push_back(i);
    }
    simplex_ = std::make_unique<lp::DualSimplex>(lp_);
  }

  // Model-space values from an LP solution.
  void Restore(std::vector<double>& x) const {
    for (const auto& [u, xb] : shifted_) x[u] += x[xb];
  }

  bool trivially_infeasible() const { return trivially_infeasible_; }
  const std::vector<double>& base_lower() const { return lower_; }
  const std::vector<double>& base_upper() const { return upper_; }
  lp::DualSimplex& simplex() { return *simplex_; }

  // Activity-based domain propagation on binary columns. Returns false when
  // the bounds admit no solution.
  bool Propagate(std::vector<double>& lower, std::vector<double>& upper) const {
    const int n_rows = static_cast<int>(lp_rows_.size());
    std::vector<char> queued(n_rows, 1);
    std::deque<int> queue;
    for (int i = 0; i < n_rows; ++i) queue.push_back(i);
    constexpr double kTol = 1e-9;
    while (!queue.empty()) {
      const int i = queue.front();
      queue.pop_front();
      queued[i] = 0;
      const MilpRow& row = *lp_rows_[i];
      double min_act = 0.0, max_act = 0.0;
      for (const lp::Entry& e : row.entries) {
        if (e.value > 0) {
          min_act += e.value * lower[e.index];
          max_act += e.value * upper[e.index];
        } else {
          min_act += e.value * upper[e.index];
          max_act += e.value * lower[e.index];
        }
      }
      const double hi_tol = kTol * (1.0 + std::abs(row.upper));
      const double lo_tol = kTol * (1.0 + std::abs(row.lower));
      if (min_act > row.upper + hi_tol || max_act < row.lower - lo_tol) {
        return false;
      }
      for (const lp::Entry& e : row.entries) {
        const int j = e.index;
        if (!model_.variables()[j].binary || lower[j] == upper[j]) continue;
        const double a = e.value;
        const double min_j = a > 0 ? a * lower[j] : a * upper[j];
        const double max_j = a > 0 ? a * upper[j] : a * lower[j];
        const double rest_min = min_act - min_j;
        const double rest_max = max_act - max_j;
        bool can_zero = true, can_one = true;
        if (std::isfinite(row.upper)) {
          if (rest_min > row.upper + hi_tol) can_zero = false;
          if (rest_min + a > row.upper + hi_tol) can_one = false;
        }
        if (std::isfinite(row.lower)) {
          if (rest_max < row.lower - lo_tol) can_zero = false;
          if (rest_max + a < row.lower - lo_tol) can_one = false;
        }
        if (!can_zero && !can_one) return false;
        if (can_zero && can_one) continue;
        const double v = can_one ? 1.0 : 0.0;
        lower[j] = upper[j] = v;
        // Refresh this row's activity and requeue neighbours.
        min_act = rest_min + (a > 0 ? a * v : a * v);
        max_act = rest_max + (a > 0 ? a * v : a * v);
        for (int k : var_rows_[j]) {
          if (k != i && !queued[k]) {
            queued[k] = 1;
            queue.push_back(k);
          }
        }
      }
    }
    return true;
  }

 private:
  const MilpModel& model_;
  std::vector<MilpRow> owned_rows_;
  std::vector<const MilpRow*> lp_rows_;
  std::vector<std::pair<int, int>> shifted_;
  std::vector<std::vector<int>> var_rows_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  bool trivially_infeasible_ = false;
  lp::LinearProgram lp_;
  std::unique_ptr<lp::DualSimplex> simplex_;
};

constexpr double kIntegralityTolerance = 1e-6;

}  // namespace

LpRelaxation SolveLpRelaxation(const MilpModel& model,
                               std::span<const Fixing> fixings) {
  Relaxation relax(model, /*strengthen=*/false);
  LpRelaxation out;
  if (relax.trivially_infeasible()) return out;
  std::vector<double> lower = relax.base_lower();
  std::vector<double> upper = relax.base_upper();
  for (const Fixing& f : fixings) {
    lower[f.variable] = std::max(lower[f.variable], f.value);
    upper[f.variable] = std::min(upper[f.variable], f.value);
  }
  for (int j = 0; j < model.num_variables(); ++j) {
    relax.simplex().SetColumnBounds(j, lower[j], upper[j]);
  }
  const lp::LpSolution sol = relax.simplex().Solve();
  if (sol.status == lp::LpStatus::kStall ||
      sol.status == lp::LpStatus::kTimeLimit) {
    throw PlanningError(ErrorCode::kNumericalStall,
                        "simplex stalled after " +
                            std::to_string(sol.iterations) + " iterations");
  }
  if (sol.status != lp::LpStatus::kOptimal) return out;
  out.feasible = true;
  out.value = sol.objective;
  out.point = sol.x;
  return out;
}

namespace {

struct Node {
  std::int64_t id = 0;
  int depth = 0;
  double bound = 0.0;
  double parent_lp = -lp::kInfinity;
  std::vector<std::int8_t> fix;  // per branch variable: -1 free, 0, 1
  std::shared_ptr<const lp::Basis> basis;
};

struct BestFirst {
  bool operator()(const std::shared_ptr<Node>& a,
                  const std::shared_ptr<Node>& b) const {
    // std::priority_queue pops the "largest": invert for min-bound first.
    if (a->bound != b->bound) return a->bound > b->bound;
    if (a->depth != b->depth) return a->depth < b->depth;
    return a->id > b->id;
  }
};

}  // namespace

SolveOutcome SolveP1(const MilpModel& model, const SolveLimits& limits) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  std::optional<Clock::time_point> deadline;
  if (limits.time_limit_s > 0) {
    deadline = start + std::chrono::duration_cast<Clock::duration>(
                           std::chrono::duration<double>(limits.time_limit_s));
  }

  SolveOutcome outcome;
  Relaxation relax(model, /*strengthen=*/true);
  if (relax.trivially_infeasible()) {
    outcome.status = SolveStatus::kInfeasible;
    return outcome;
  }
  relax.simplex().set_deadline(deadline);

  const std::vector<int>& branch = model.branch_variables();
  const int n_vars = model.num_variables();
  std::vector<int> branch_pos(n_vars, -1);
  for (int k = 0; k < static_cast<int>(branch.size()); ++k) {
    branch_pos[branch[k]] = k;
  }

  std::optional<double> incumbent_value;
  std::optional<Plan> incumbent_plan;
  auto prune_threshold = [&]() {
    const double v = *incumbent_value;
    return v - std::max(1e-10, 1e-10 * std::abs(v));
  };

  // Depth-first until the first incumbent, best-first afterwards.
  std::vector<std::shared_ptr<Node>> dive_stack;
  std::priority_queue<std::shared_ptr<Node>, std::vector<std::shared_ptr<Node>>,
                      BestFirst>
      open;
  std::int64_t next_id = 0;
  {
    auto root = std::make_shared<Node>();
    root->id = next_id++;
    root->fix.assign(branch.size(), -1);
    root->bound = -lp::kInfinity;
    dive_stack.push_back(root);
  }
  auto open_size = [&]() {
    return static_cast<std::int64_t>(dive_stack.size() + open.size());
  };
  auto best_open_bound = [&]() {
    double best = lp::kInfinity;
    for (const auto& n : dive_stack) best = std::min(best, n->bound);
    if (!open.empty()) best = std::min(best, open.top()->bound);
    return best;
  };

  bool limit_hit = false;
  auto last_progress = start;
  std::vector<double> lower(n_vars), upper(n_vars);

  while (!dive_stack.empty() || !open.empty()) {
    const auto now = Clock::now();
    if ((deadline && now >= *deadline) ||
        (limits.node_limit > 0 && outcome.nodes_explored >= limits.node_limit)) {
      limit_hit = true;
      break;
    }
    if (limits.progress &&
        std::chrono::duration<double>(now - last_progress).count() >=
            limits.progress_interval_s) {
      last_progress = now;
      SolveProgress p;
      p.nodes = outcome.nodes_explored;
      p.open_nodes = open_size();
      p.incumbent = incumbent_value;
      p.best_bound = best_open_bound();
      p.elapsed_s = std::chrono::duration<double>(now - start).count();
      limits.progress(p);
    }

    std::shared_ptr<Node> node;
    if (!dive_stack.empty()) {
      node = dive_stack.back();
      dive_stack.pop_back();
    } else {
      node = open.top();
      open.pop();
    }
    if (incumbent_value && node->bound >= prune_threshold()) continue;

    lower = relax.base_lower();
    upper = relax.base_upper();
    for (int k = 0; k < static_cast<int>(branch.size()); ++k) {
      if (node->fix[k] >= 0) {
        const double v = node->fix[k];
        if (v < lower[branch[k]] || v > upper[branch[k]]) {
          lower[branch[k]] = 1.0;
          upper[branch[k]] = 0.0;
        } else {
          lower[branch[k]] = upper[branch[k]] = v;
        }
      }
    }
    bool feasible = true;
    for (int j = 0; j < n_vars && feasible; ++j) feasible = lower[j] <= upper[j];
    if (feasible) feasible = relax.Propagate(lower, upper);
    ++outcome.nodes_explored;
    if (!feasible) continue;

    for (int j = 0; j < n_vars; ++j) {
      relax.simplex().SetColumnBounds(j, lower[j], upper[j]);
    }
    lp::LpSolution sol = relax.simplex().Solve(node->basis.get());
    if (sol.status == lp::LpStatus::kStall) {
      sol = relax.simplex().Solve(nullptr);
    }
    if (sol.status == lp::LpStatus::kTimeLimit) {
      // The node is still open.
      if (incumbent_value) {
        open.push(node);
      } else {
        dive_stack.push_back(node);
      }
      limit_hit = true;
      break;
    }
    if (sol.status == lp::LpStatus::kStall) {
      throw PlanningError(ErrorCode::kNumericalStall,
                          "simplex stalled at node " + std::to_string(node->id));
    }
    if (sol.status == lp::LpStatus::kInfeasible) continue;
    relax.Restore(sol.x);

    if (std::isfinite(node->parent_lp)) {
      outcome.worst_bound_drop =
          std::max(outcome.worst_bound_drop, node->parent_lp - sol.objective);
    }
    const double bound = std::max(node->bound, sol.objective);
    if (incumbent_value && bound >= prune_threshold()) continue;

    // Branching candidate: most fractional, then larger objective
    // coefficient, then lowest index.
    int chosen = -1;
    double chosen_frac = 0.0;
    for (int k = 0; k < static_cast<int>(branch.size()); ++k) {
      const int j = branch[k];
      const double v = sol.x[j];
      const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
      if (frac <= kIntegralityTolerance) continue;
      if (chosen < 0 || frac > chosen_frac + 1e-9) {
        chosen = k;
        chosen_frac = frac;
      } else if (std::abs(frac - chosen_frac) <= 1e-9 &&
                 model.variables()[j].cost >
                     model.variables()[branch[chosen]].cost) {
        chosen = k;
        chosen_frac = frac;
      }
    }

    if (chosen < 0) {
      std::optional<Plan> plan = DecodePlan(model, sol.x);
      if (plan) {
        auto encoded = EncodePlan(model, *plan);
        const double value = encoded ? ObjectiveValue(model, *encoded) : bound;
        if (!incumbent_value || value < *incumbent_value) {
          const bool first = !incumbent_value.has_value();
          incumbent_value = value;
          incumbent_plan = std::move(plan);
          if (first) {
            for (auto& n : dive_stack) open.push(n);
            dive_stack.clear();
          }
        }
      }
      continue;
    }

    auto basis = std::make_shared<const lp::Basis>(relax.simplex().CurrentBasis());
    const double v = sol.x[branch[chosen]];
    auto make_child = [&](std::int8_t value) {
      auto child = std::make_shared<Node>();
      child->id = next_id++;
      child->depth = node->depth + 1;
      child->bound = bound;
      child->parent_lp = sol.objective;
      child->fix = node->fix;
      child->fix[chosen] = value;
      child->basis = basis;
      return child;
    };
    auto down = make_child(0);
    auto up = make_child(1);
    if (!incumbent_value) {
      // Dive toward the rounded value first.
      if (v >= 0.5) {
        dive_stack.push_back(down);
        dive_stack.push_back(up);
      } else {
        dive_stack.push_back(up);
        dive_stack.push_back(down);
      }
    } else {
      open.push(down);
      open.push(up);
    }
  }

  if (incumbent_value) {
    outcome.plan = std::move(incumbent_plan);
    outcome.objective_value = *incumbent_value;
    if (limit_hit) {
      const double best = std::min(best_open_bound(), *incumbent_value);
      outcome.best_bound = best;
      outcome.status = SolveStatus::kTimeLimitWithGap;
      outcome.gap = *incumbent_value > 0
                        ? std::max(0.0, (*incumbent_value - best) / *incumbent_value)
                        : 0.0;
    } else {
      outcome.best_bound = *incumbent_value;
      outcome.status = SolveStatus::kOptimal;
      outcome.gap = 0.0;
    }
  } else if (limit_hit) {
    outcome.status = SolveStatus::kTimeLimitWithGap;
    outcome.gap = lp::kInfinity;
    outcome.best_bound = best_open_bound();
  } else {
    outcome.status = SolveStatus::kInfeasible;
  }
  return outcome;
}

}  // namespace mecplan
