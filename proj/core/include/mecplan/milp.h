#ifndef MECPLAN_MILP_H_
#define MECPLAN_MILP_H_

// Step one of the two-step planner: the equal-share linearized MILP over
// topology, routing and server assignment, and its branch-and-bound solver.

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mecplan/linkgraph.h"
#include "mecplan/lp.h"
#include "mecplan/model.h"

namespace mecplan {

enum class VarFamily { kX, kXb, kY, kW, kZ, kU };

std::string_view VarFamilyName(VarFamily family);

struct MilpVariable {
  VarFamily family;
  bool binary = false;
  double lower = 0.0;
  double upper = 1.0;
  double cost = 0.0;
  std::string name;
};

// Row tags name the constraint family a row belongs to.
namespace row_tag {
inline constexpr std::string_view kPairLink = "pair_link";
inline constexpr std::string_view kInterface = "interface";
inline constexpr std::string_view kTaskLink = "task_link";
inline constexpr std::string_view kRedundantLink = "redundant_link";
inline constexpr std::string_view kFlow = "flow";
inline constexpr std::string_view kServerColocation = "server_colocation";
inline constexpr std::string_view kServerCapacity = "server_capacity";
inline constexpr std::string_view kServerReception = "server_reception";
inline constexpr std::string_view kCloudReach = "cloud_reach";
inline constexpr std::string_view kCloudServe = "cloud_serve";
inline constexpr std::string_view kProcessAll = "process_all";
inline constexpr std::string_view kOriginDeparture = "origin_departure";
inline constexpr std::string_view kZDefinition = "z_definition";
inline constexpr std::string_view kULeBigM = "u_le_bigm";
inline constexpr std::string_view kULeZ = "u_le_z";
inline constexpr std::string_view kUGeZ = "u_ge_z";
inline constexpr std::string_view kUNonNegative = "u_nonneg";
}  // namespace row_tag

struct MilpRow {
  std::string tag;
  std::string name;
  std::vector<lp::Entry> entries;
  double lower = -lp::kInfinity;
  double upper = lp::kInfinity;
};

class MilpModel {
 public:
  const std::vector<MilpVariable>& variables() const { return variables_; }
  const std::vector<MilpRow>& rows() const { return rows_; }
  int num_variables() const { return static_cast<int>(variables_.size()); }

  // Candidate links in variable order.
  const std::vector<Link>& links() const { return links_; }
  const std::vector<int>& cloud_bs() const { return cloud_bs_; }
  int num_bs() const { return num_bs_; }
  int num_tasks() const { return num_tasks_; }
  double big_m() const { return big_m_; }

  int x(int link) const { return x_[link]; }
  int xb(int link, int task) const { return xb_[link * num_tasks_ + task]; }
  // `site` in [0, N) is a base station; `site == N` is the cloud.
  int y(int site, int task) const { return y_[site * num_tasks_ + task]; }
  // `entry` indexes cloud_bs().
  int w(int entry, int task) const { return w_[entry * num_tasks_ + task]; }
  int z(int link) const { return z_[link]; }
  int u(int link, int task) const { return u_[link * num_tasks_ + task]; }

  std::optional<int> LinkIndex(const Link& link) const;
  // Position of `bs` within cloud_bs(), if cloud attached.
  std::optional<int> CloudEntryIndex(int bs) const;
  int task_origin(int task) const { return origins_[task]; }

  // X^b, Y and W: the only variables branched on.
  const std::vector<int>& branch_variables() const { return branch_vars_; }

  int CountFamily(VarFamily family) const;
  int CountRows(std::string_view tag) const;

 private:
  friend MilpModel BuildP1(const Instance& inst, const LinkGraph& graph);

  int AddVariable(VarFamily family, bool binary, double lower, double upper,
                  double cost, std::string name);
  void AddRow(std::string_view tag, std::string name,
              std::vector<lp::Entry> entries, double lower, double upper);

  std::vector<MilpVariable> variables_;
  std::vector<MilpRow> rows_;
  std::vector<Link> links_;
  std::map<Link, int> link_index_;
  std::vector<int> cloud_bs_;
  std::vector<int> origins_;
  int num_bs_ = 0;
  int num_tasks_ = 0;
  double big_m_ = 0.0;
  std::vector<int> x_, xb_, y_, w_, z_, u_;
  std::vector<int> branch_vars_;
};

// Builds the linearized problem with Z-bar equal to the number of tasks.
MilpModel BuildP1(const Instance& inst, const LinkGraph& graph);

// Exact 0/1 (plus Z and U) vector of a plan, or nullopt when the plan names
// something the model has no variable for or takes a hop twice.
std::optional<std::vector<double>> EncodePlan(const MilpModel& model,
                                              const Plan& plan);

// Names of rows (and variable bounds) violated by `point`.
std::vector<std::string> ViolatedRows(const MilpModel& model,
                                      std::span<const double> point,
                                      double tolerance = 1e-7);

double ObjectiveValue(const MilpModel& model, std::span<const double> point);

// Reads a plan off an integral point: every task follows its X^b links from
// the origin to its Y/W sink along the fewest hops.
std::optional<Plan> DecodePlan(const MilpModel& model,
                               std::span<const double> point);

struct Fixing {
  int variable = 0;
  double value = 0.0;
};

struct LpRelaxation {
  bool feasible = false;
  double value = 0.0;
  std::vector<double> point;
};

// LP relaxation with binaries in [0,1] and the given binaries fixed.
// Throws PlanningError(kNumericalStall) if the simplex cannot finish.
LpRelaxation SolveLpRelaxation(const MilpModel& model,
                               std::span<const Fixing> fixings);

enum class SolveStatus { kOptimal, kTimeLimitWithGap, kInfeasible };

std::string_view SolveStatusName(SolveStatus status);

struct SolveProgress {
  std::int64_t nodes = 0;
  std::int64_t open_nodes = 0;
  std::optional<double> incumbent;
  double best_bound = 0.0;
  double elapsed_s = 0.0;
};

struct SolveLimits {
  std::int64_t node_limit = 0;  // 0: unlimited
  double time_limit_s = 0.0;    // 0: unlimited
  std::function<void(const SolveProgress&)> progress;
  double progress_interval_s = 1.0;
};

struct SolveOutcome {
  std::optional<Plan> plan;
  double objective_value = 0.0;  // weighted equal-share latency, seconds
  SolveStatus status = SolveStatus::kInfeasible;
  double gap = 0.0;
  double best_bound = 0.0;
  std::int64_t nodes_explored = 0;
  // Largest amount by which a child's LP value fell below its parent's.
  double worst_bound_drop = 0.0;
};

SolveOutcome SolveP1(const MilpModel& model, const SolveLimits& limits = {});

}  // namespace mecplan

#endif  // MECPLAN_MILP_H_
