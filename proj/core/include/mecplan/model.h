#ifndef MECPLAN_MODEL_H_
#define MECPLAN_MODEL_H_

// Domain types for offloading instances, plans and bandwidth allocations.
//
// Internal units are bytes, bytes/second, seconds and meters. All indices
// (base stations, interfaces, tasks) are zero-based in memory; files and
// rendered labels use one-based ids.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mecplan {

inline constexpr double kBytesPerGigabyte = 1e9;
inline constexpr double kBytesPerSecondPerGbps = 1e9 / 8.0;

// Parameters of the distance-based link-rate model. Rates are in bytes/s.
struct LinkModelConfig {
  double max_range_m = 200.0;
  double rate_at_reference = 10.0 * kBytesPerSecondPerGbps;
  double reference_distance_m = 50.0;
  double path_loss_exponent = 2.0;
  double rate_floor = 0.5 * kBytesPerSecondPerGbps;
};

struct BaseStation {
  double x = 0.0;
  double y = 0.0;
  int interfaces = 1;
  bool has_server = false;
  double storage_capacity = 0.0;  // bytes; ignored unless has_server
  bool cloud_attached = false;

  double EffectiveCapacity() const {
    return has_server ? storage_capacity : 0.0;
  }
};

struct Task {
  double size = 0.0;  // bytes
  int origin = 0;     // base station index
  double weight = 0.0;
};

// Explicit link rate for the unordered base-station pair {n, m}, bytes/s.
struct RateOverride {
  int n = 0;
  int m = 0;
  double rate = 0.0;
  std::string note;
};

struct Instance {
  std::vector<BaseStation> base_stations;
  std::vector<Task> tasks;
  double cloud_latency = 0.2;  // seconds
  double saturation = 0.95;    // usable fraction of every link
  LinkModelConfig link_model;
  std::vector<RateOverride> rate_overrides;
  std::uint64_t seed = 0;

  int num_bs() const { return static_cast<int>(base_stations.size()); }
  int num_tasks() const { return static_cast<int>(tasks.size()); }
  std::vector<int> CloudAttached() const;
};

// Sets every weight to 1/B when `weights_given` is false, otherwise rescales
// the given weights to sum to one.
void NormalizeWeights(Instance& inst, bool weights_given);

// Directed mmWave link from interface `from_iface` of `from` to interface
// `to_iface` of `to`.
struct Link {
  int from = 0;
  int from_iface = 0;
  int to = 0;
  int to_iface = 0;

  friend auto operator<=>(const Link&, const Link&) = default;
};

// Renders a link as "n(i)→m(j)" with one-based ids.
std::string FormatLink(const Link& link);

// Where a task is processed: an edge server at a base station, or the cloud.
class ServingSite {
 public:
  static ServingSite AtBs(int bs) { return ServingSite(bs); }
  static ServingSite Cloud() { return ServingSite(kCloud); }

  bool is_cloud() const { return bs_ == kCloud; }
  // Only meaningful when !is_cloud().
  int bs() const { return bs_; }

  friend bool operator==(ServingSite, ServingSite) = default;

 private:
  static constexpr int kCloud = -1;
  explicit ServingSite(int bs) : bs_(bs) {}
  int bs_;
};

struct TaskRoute {
  std::vector<Link> path;  // ordered hops from the origin
  ServingSite site = ServingSite::Cloud();
  std::optional<int> cloud_entry;  // set iff site is the cloud

  int hops() const { return static_cast<int>(path.size()); }
};

struct Plan {
  std::vector<Link> links;  // established links, sorted
  std::vector<TaskRoute> routes;  // one per task
};

// Renders a route in the "n(i)→m(j) m(j')→Cloud" form, or "*"
// for tasks processed at their origin.
std::string FormatRoute(const Instance& inst, const TaskRoute& route);

struct LinkTask {
  Link link;
  int task = 0;

  friend auto operator<=>(const LinkTask&, const LinkTask&) = default;
};

struct Allocation {
  std::map<LinkTask, double> rho;
  // Path-bottleneck rates in bytes/s, present for minimum-rate allocations.
  std::optional<std::map<int, double>> psi;
  // Capacity multipliers reported by the solver, per link.
  std::map<Link, double> link_price;
};

enum class ViolationCode {
  // instance
  kEmptyNetwork,
  kNoCloudAttachment,
  kDanglingOrigin,
  kNonFinitePosition,
  kNonPositiveInterfaces,
  kNonPositiveCapacity,
  kNonPositiveSize,
  kNonPositiveWeight,
  kWeightsNotNormalized,
  kBadSaturation,
  kBadCloudLatency,
  kBadLinkModel,
  kBadRateOverride,
  kCoincidentBs,
  kUnreachableTask,
  // plan
  kTaskCountMismatch,
  kUnknownLink,
  kDuplicateLink,
  kInterfaceReuse,
  kPairLinkLimit,
  kRedundantLink,
  kLinkNotEstablished,
  kBrokenPath,
  kNonSimplePath,
  kServerColocation,
  kServerCapacity,
  kBadCloudEntry,
};

std::string_view ViolationName(ViolationCode code);

struct Violation {
  ViolationCode code;
  std::string detail;
};

bool HasViolation(const std::vector<Violation>& violations,
                  ViolationCode code);

class LinkGraph;

std::vector<Violation> ValidateInstance(const Instance& inst);

// Checks a plan against every Step-1 feasibility rule. `graph` must have been
// built from `inst`.
std::vector<Violation> ValidatePlan(const Instance& inst,
                                    const LinkGraph& graph, const Plan& plan);

}  // namespace mecplan

#endif  // MECPLAN_MODEL_H_
