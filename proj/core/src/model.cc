#include "mecplan/model.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <string>

#include "mecplan/error.h"
#include "mecplan/linkgraph.h"

namespace mecplan {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kCoincidentBs: return "CoincidentBS";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kEmptyLink: return "EmptyLink";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kMissingAllocation: return "MissingAllocation";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kNumericalStall: return "NumericalStall";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kBadParameter: return "BadParameter";
    case ErrorCode::kInvalidInstance: return "InvalidInstance";
    case ErrorCode::kFormat: return "Format";
  }
  return "Unknown";
}

std::string_view ViolationName(ViolationCode code) {
  switch (code) {
    case ViolationCode::kEmptyNetwork: return "EmptyNetwork";
    case ViolationCode::kNoCloudAttachment: return "NoCloudAttachment";
    case ViolationCode::kDanglingOrigin: return "DanglingOrigin";
    case ViolationCode::kNonFinitePosition: return "NonFinitePosition";
    case ViolationCode::kNonPositiveInterfaces: return "NonPositiveInterfaces";
    case ViolationCode::kNonPositiveCapacity: return "NonPositiveCapacity";
    case ViolationCode::kNonPositiveSize: return "NonPositiveSize";
    case ViolationCode::kNonPositiveWeight: return "NonPositiveWeight";
    case ViolationCode::kWeightsNotNormalized: return "WeightsNotNormalized";
    case ViolationCode::kBadSaturation: return "BadSaturation";
    case ViolationCode::kBadCloudLatency: return "BadCloudLatency";
    case ViolationCode::kBadLinkModel: return "BadLinkModel";
    case ViolationCode::kBadRateOverride: return "BadRateOverride";
    case ViolationCode::kCoincidentBs: return "CoincidentBS";
    case ViolationCode::kUnreachableTask: return "UnreachableTask";
    case ViolationCode::kTaskCountMismatch: return "TaskCountMismatch";
    case ViolationCode::kUnknownLink: return "UnknownLink";
    case ViolationCode::kDuplicateLink: return "DuplicateLink";
    case ViolationCode::kInterfaceReuse: return "InterfaceReuse";
    case ViolationCode::kPairLinkLimit: return "PairLinkLimit";
    case ViolationCode::kRedundantLink: return "RedundantLink";
    case ViolationCode::kLinkNotEstablished: return "LinkNotEstablished";
    case ViolationCode::kBrokenPath: return "BrokenPath";
    case ViolationCode::kNonSimplePath: return "NonSimplePath";
    case ViolationCode::kServerColocation: return "ServerColocation";
    case ViolationCode::kServerCapacity: return "ServerCapacity";
    case ViolationCode::kBadCloudEntry: return "BadCloudEntry";
  }
  return "Unknown";
}

bool HasViolation(const std::vector<Violation>& violations,
                  ViolationCode code) {
  return std::any_of(violations.begin(), violations.end(),
                     [code](const Violation& v) { return v.code == code; });
}

std::vector<int> Instance::CloudAttached() const {
  std::vector<int> out;
  for (int n = 0; n < num_bs(); ++n) {
    if (base_stations[n].cloud_attached) out.push_back(n);
  }
  return out;
}

void NormalizeWeights(Instance& inst, bool weights_given) {
  if (inst.tasks.empty()) return;
  if (!weights_given) {
    const double w = 1.0 / static_cast<double>(inst.tasks.size());
    for (Task& t : inst.tasks) t.weight = w;
    return;
  }
  double total = 0.0;
  for (const Task& t : inst.tasks) total += t.weight;
  if (!(total > 0.0) || !std::isfinite(total)) return;
  // Already normalized weights are kept bit-for-bit.
  if (std::abs(total - 1.0) <= 1e-12) return;
  for (Task& t : inst.tasks) t.weight /= total;
}

std::string FormatLink(const Link& link) {
  return std::to_string(link.from + 1) + "(" +
         std::to_string(link.from_iface + 1) + ")→" +
         std::to_string(link.to + 1) + "(" + std::to_string(link.to_iface + 1) +
         ")";
}

std::string FormatRoute(const Instance& inst, const TaskRoute& route) {
  std::string out;
  for (const Link& link : route.path) {
    if (!out.empty()) out += ' ';
    out += FormatLink(link);
  }
  if (route.site.is_cloud() && route.cloud_entry.has_value()) {
    const int p = *route.cloud_entry;
    // The wired cloud port is numbered after the mmWave interfaces.
    const int port = (p >= 0 && p < inst.num_bs())
                         ? inst.base_stations[p].interfaces + 1
                         : 0;
    if (!out.empty()) out += ' ';
    out += std::to_string(p + 1) + "(" + std::to_string(port) +
           ")→Cloud";
  }
  return out.empty() ? "*" : out;
}

namespace {

void Add(std::vector<Violation>& out, ViolationCode code, std::string detail) {
  out.push_back(Violation{code, std::move(detail)});
}

std::string BsName(int n) { return "BS " + std::to_string(n + 1); }
std::string TaskName(int b) { return "task " + std::to_string(b + 1); }

}  // namespace

std::vector<Violation> ValidateInstance(const Instance& inst) {
  std::vector<Violation> out;
  const int n_bs = inst.num_bs();
  if (n_bs == 0) Add(out, ViolationCode::kEmptyNetwork, "no base stations");

  for (int n = 0; n < n_bs; ++n) {
    const BaseStation& bs = inst.base_stations[n];
    if (!std::isfinite(bs.x) || !std::isfinite(bs.y)) {
      Add(out, ViolationCode::kNonFinitePosition, BsName(n));
    }
    if (bs.interfaces < 1) {
      Add(out, ViolationCode::kNonPositiveInterfaces, BsName(n));
    }
    if (bs.has_server &&
        !(bs.storage_capacity > 0.0 && std::isfinite(bs.storage_capacity))) {
      Add(out, ViolationCode::kNonPositiveCapacity, BsName(n));
    }
  }
  if (n_bs > 0 && inst.CloudAttached().empty()) {
    Add(out, ViolationCode::kNoCloudAttachment,
        "at least one base station needs a wired cloud connection");
  }

  double weight_sum = 0.0;
  for (int b = 0; b < inst.num_tasks(); ++b) {
    const Task& t = inst.tasks[b];
    if (t.origin < 0 || t.origin >= n_bs) {
      Add(out, ViolationCode::kDanglingOrigin,
          TaskName(b) + " origin " + std::to_string(t.origin + 1));
    }
    if (!(t.size > 0.0) || !std::isfinite(t.size)) {
      Add(out, ViolationCode::kNonPositiveSize, TaskName(b));
    }
    if (!(t.weight > 0.0) || !std::isfinite(t.weight)) {
      Add(out, ViolationCode::kNonPositiveWeight, TaskName(b));
    }
    weight_sum += t.weight;
  }
  if (inst.num_tasks() > 0 && std::abs(weight_sum - 1.0) > 1e-9) {
    Add(out, ViolationCode::kWeightsNotNormalized,
        "weights sum to " + std::to_string(weight_sum));
  }
  if (!(inst.saturation > 0.0 && inst.saturation <= 1.0)) {
    Add(out, ViolationCode::kBadSaturation, "saturation must be in (0, 1]");
  }
  if (!(inst.cloud_latency >= 0.0) || !std::isfinite(inst.cloud_latency)) {
    Add(out, ViolationCode::kBadCloudLatency, "cloud latency must be >= 0");
  }
  const LinkModelConfig& lm = inst.link_model;
  const bool model_ok = lm.max_range_m > 0.0 && lm.rate_at_reference > 0.0 &&
                        lm.reference_distance_m > 0.0 &&
                        lm.path_loss_exponent > 0.0 && lm.rate_floor > 0.0 &&
                        lm.reference_distance_m <= lm.max_range_m &&
                        std::isfinite(lm.max_range_m) &&
                        std::isfinite(lm.rate_at_reference) &&
                        std::isfinite(lm.path_loss_exponent);
  if (!model_ok) {
    Add(out, ViolationCode::kBadLinkModel,
        "link model parameters must be positive with reference <= range");
  }
  for (const RateOverride& o : inst.rate_overrides) {
    if (o.n < 0 || o.n >= n_bs || o.m < 0 || o.m >= n_bs || o.n == o.m ||
        !(o.rate >= 0.0) || !std::isfinite(o.rate)) {
      Add(out, ViolationCode::kBadRateOverride,
          "pair " + std::to_string(o.n + 1) + "-" + std::to_string(o.m + 1));
    }
  }
  if (!out.empty()) return out;

  LinkGraph graph;
  try {
    graph = BuildInstanceGraph(inst);
  } catch (const PlanningError& e) {
    Add(out, e.code() == ErrorCode::kCoincidentBs
                 ? ViolationCode::kCoincidentBs
                 : ViolationCode::kBadRateOverride,
        e.what());
    return out;
  }

  // Each task needs some reachable sink: a cloud entry or a server that
  // could hold it on its own.
  for (int b = 0; b < inst.num_tasks(); ++b) {
    const Task& t = inst.tasks[b];
    std::vector<char> seen(n_bs, 0);
    std::deque<int> queue{t.origin};
    seen[t.origin] = 1;
    bool reachable = false;
    while (!queue.empty() && !reachable) {
      const int n = queue.front();
      queue.pop_front();
      const BaseStation& bs = inst.base_stations[n];
      if (bs.cloud_attached ||
          (bs.has_server && bs.storage_capacity >= t.size)) {
        reachable = true;
        break;
      }
      for (int m = 0; m < n_bs; ++m) {
        if (!seen[m] && graph.delta(n, m)) {
          seen[m] = 1;
          queue.push_back(m);
        }
      }
    }
    if (!reachable) {
      Add(out, ViolationCode::kUnreachableTask,
          TaskName(b) + " cannot reach a server or the cloud");
    }
  }
  return out;
}

std::vector<Violation> ValidatePlan(const Instance& inst,
                                    const LinkGraph& graph, const Plan& plan) {
  std::vector<Violation> out;
  const int n_bs = inst.num_bs();
  if (static_cast<int>(plan.routes.size()) != inst.num_tasks()) {
    Add(out, ViolationCode::kTaskCountMismatch,
        std::to_string(plan.routes.size()) + " routes for " +
            std::to_string(inst.num_tasks()) + " tasks");
    return out;
  }

  std::set<Link> established;
  std::map<std::pair<int, int>, int> iface_use;
  std::map<std::pair<int, int>, int> pair_use;
  for (const Link& link : plan.links) {
    if (!graph.IsCandidate(link)) {
      Add(out, ViolationCode::kUnknownLink, FormatLink(link));
      continue;
    }
    if (!established.insert(link).second) {
      Add(out, ViolationCode::kDuplicateLink, FormatLink(link));
      continue;
    }
    ++iface_use[{link.from, link.from_iface}];
    ++iface_use[{link.to, link.to_iface}];
    ++pair_use[{link.from, link.to}];
  }
  for (const auto& [key, count] : iface_use) {
    if (count > 1) {
      Add(out, ViolationCode::kInterfaceReuse,
          "interface " + std::to_string(key.first + 1) + "(" +
              std::to_string(key.second + 1) + ") carries " +
              std::to_string(count) + " links");
    }
  }
  for (const auto& [key, count] : pair_use) {
    if (count > 1) {
      Add(out, ViolationCode::kPairLinkLimit,
          std::to_string(count) + " links from " + BsName(key.first) +
              " to " + BsName(key.second));
    }
  }

  std::set<Link> used;
  std::vector<double> load(n_bs, 0.0);
  for (int b = 0; b < inst.num_tasks(); ++b) {
    const Task& task = inst.tasks[b];
    const TaskRoute& route = plan.routes[b];
    int at = task.origin;
    std::vector<char> visited(n_bs, 0);
    if (at >= 0 && at < n_bs) visited[at] = 1;
    bool contiguous = true;
    bool simple = true;
    for (const Link& link : route.path) {
      if (!graph.IsCandidate(link)) {
        Add(out, ViolationCode::kUnknownLink,
            TaskName(b) + " uses " + FormatLink(link));
        contiguous = false;
        break;
      }
      if (!established.count(link)) {
        Add(out, ViolationCode::kLinkNotEstablished,
            TaskName(b) + " uses " + FormatLink(link));
      }
      used.insert(link);
      if (link.from != at) contiguous = false;
      at = link.to;
      if (visited[at]) simple = false;
      visited[at] = 1;
    }
    if (!contiguous) {
      Add(out, ViolationCode::kBrokenPath,
          TaskName(b) + " path is not a walk from its origin");
      continue;
    }
    if (!simple) {
      Add(out, ViolationCode::kNonSimplePath,
          TaskName(b) + " revisits a base station");
    }
    if (route.site.is_cloud()) {
      if (!route.cloud_entry.has_value() || *route.cloud_entry < 0 ||
          *route.cloud_entry >= n_bs ||
          !inst.base_stations[*route.cloud_entry].cloud_attached) {
        Add(out, ViolationCode::kBadCloudEntry,
            TaskName(b) + " reaches the cloud without a wired entry");
      } else if (*route.cloud_entry != at) {
        Add(out, ViolationCode::kBrokenPath,
            TaskName(b) + " path does not end at its cloud entry");
      }
    } else {
      if (route.cloud_entry.has_value()) {
        Add(out, ViolationCode::kBadCloudEntry,
            TaskName(b) + " is edge-served but lists a cloud entry");
      }
      const int s = route.site.bs();
      if (s < 0 || s >= n_bs || s != at) {
        Add(out, ViolationCode::kBrokenPath,
            TaskName(b) + " path does not end at its server");
        continue;
      }
      if (!inst.base_stations[s].has_server) {
        Add(out, ViolationCode::kServerColocation,
            TaskName(b) + " assigned to " + BsName(s) + " without a server");
        continue;
      }
      load[s] += task.size;
    }
  }
  for (const Link& link : established) {
    if (!used.count(link)) {
      Add(out, ViolationCode::kRedundantLink, FormatLink(link));
    }
  }
  for (int n = 0; n < n_bs; ++n) {
    const double cap = inst.base_stations[n].EffectiveCapacity();
    if (load[n] > cap * (1.0 + 1e-12)) {
      Add(out, ViolationCode::kServerCapacity,
          BsName(n) + " stores " + std::to_string(load[n]) + " bytes");
    }
  }
  return out;
}

}  // namespace mecplan
