#include "mecplan/brute_force.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>
#include <vector>

#include "mecplan/error.h"

namespace mecplan {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One way to serve a task: a base-station path from the origin and a sink.
struct Option {
  std::vector<int> nodes;  // origin first
  bool cloud = false;
  double standalone = 0.0;  // cost if the task were alone on every hop
};

class Search {
 public:
  Search(const Instance& inst, const LinkGraph& graph, std::int64_t budget)
      : inst_(inst), graph_(graph), budget_(budget), n_(inst.num_bs()) {}

  SolveOutcome Run() {
    const int n_tasks = inst_.num_tasks();
    options_.resize(n_tasks);
    for (int b = 0; b < n_tasks; ++b) EnumerateOptions(b);

    // Larger tasks first: they constrain capacity and cost the most.
    order_.resize(n_tasks);
    for (int b = 0; b < n_tasks; ++b) order_[b] = b;
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) {
      return inst_.tasks[a].size * inst_.tasks[a].weight >
             inst_.tasks[b].size * inst_.tasks[b].weight;
    });
    suffix_bound_.assign(n_tasks + 1, 0.0);
    for (int k = n_tasks - 1; k >= 0; --k) {
      double best = kInf;
      for (const Option& o : options_[order_[k]]) best = std::min(best, o.standalone);
      suffix_bound_[k] = suffix_bound_[k + 1] + best;
    }

    users_.assign(n_ * n_, 0);
    weight_sum_.assign(n_ * n_, 0.0);
    degree_.assign(n_, 0);
    storage_.assign(n_, 0.0);
    choice_.assign(n_tasks, -1);
    Dfs(0, 0.0);

    SolveOutcome outcome;
    outcome.nodes_explored = nodes_;
    if (best_choice_.empty() && n_tasks > 0) {
      outcome.status = SolveStatus::kInfeasible;
      return outcome;
    }
    outcome.status = SolveStatus::kOptimal;
    outcome.objective_value = n_tasks > 0 ? best_cost_ : 0.0;
    outcome.best_bound = outcome.objective_value;
    outcome.plan = BuildPlan();
    return outcome;
  }

 private:
  void Charge(std::int64_t amount) {
    work_ += amount;
    if (work_ > budget_) {
      throw PlanningError(ErrorCode::kTooLarge,
                          "enumeration budget of " + std::to_string(budget_) +
                              " exceeded");
    }
  }

  double TaskWeight(int b) const {
    return inst_.tasks[b].weight * inst_.tasks[b].size;
  }

  void AddOption(int b, std::vector<int> nodes, bool cloud) {
    Charge(1);
    Option o;
    o.nodes = std::move(nodes);
    o.cloud = cloud;
    for (size_t k = 0; k + 1 < o.nodes.size(); ++k) {
      o.standalone += TaskWeight(b) / graph_.rate(o.nodes[k], o.nodes[k + 1]);
    }
    if (cloud) o.standalone += inst_.tasks[b].weight * inst_.cloud_latency;
    options_[b].push_back(std::move(o));
  }

  void EnumerateOptions(int b) {
    const int origin = inst_.tasks[b].origin;
    std::vector<int> path{origin};
    std::vector<char> on_path(n_, 0);
    on_path[origin] = 1;
    ExtendPath(b, path, on_path);
    std::stable_sort(options_[b].begin(), options_[b].end(),
                     [](const Option& a, const Option& c) {
                       return a.standalone < c.standalone;
                     });
  }

  void ExtendPath(int b, std::vector<int>& path, std::vector<char>& on_path) {
    const int end = path.back();
    const BaseStation& bs = inst_.base_stations[end];
    if (bs.has_server && bs.storage_capacity >= inst_.tasks[b].size) {
      AddOption(b, path, false);
    }
    if (bs.cloud_attached) AddOption(b, path, true);
    for (int m = 0; m < n_; ++m) {
      if (on_path[m] || !graph_.delta(end, m)) continue;
      on_path[m] = 1;
      path.push_back(m);
      ExtendPath(b, path, on_path);
      path.pop_back();
      on_path[m] = 0;
    }
  }

  // Applies (sign=+1) or removes (sign=-1) an option and returns the change
  // in total cost.
  double Apply(int b, const Option& o, int sign) {
    double delta = 0.0;
    const double w = TaskWeight(b);
    for (size_t k = 0; k + 1 < o.nodes.size(); ++k) {
      const int n = o.nodes[k], m = o.nodes[k + 1];
      const int key = n * n_ + m;
      const double rate = graph_.rate(n, m);
      const double before = users_[key] * weight_sum_[key] / rate;
      if (sign > 0 && users_[key] == 0) {
        ++degree_[n];
        ++degree_[m];
      }
      users_[key] += sign;
      weight_sum_[key] += sign * w;
      if (users_[key] == 0) weight_sum_[key] = 0.0;
      if (sign < 0 && users_[key] == 0) {
        --degree_[n];
        --degree_[m];
      }
      delta += users_[key] * weight_sum_[key] / rate - before;
    }
    if (o.cloud) {
      delta += sign * inst_.tasks[b].weight * inst_.cloud_latency;
    } else {
      storage_[o.nodes.back()] += sign * inst_.tasks[b].size;
    }
    return delta;
  }

  bool Fits(int b, const Option& o) const {
    if (!o.cloud) {
      const BaseStation& bs = inst_.base_stations[o.nodes.back()];
      const double used = storage_[o.nodes.back()] + inst_.tasks[b].size;
      if (used > bs.storage_capacity * (1.0 + 1e-12)) return false;
    }
    // Each newly established ordered pair takes one interface at both ends.
    std::vector<std::pair<int, int>> extra;
    for (size_t k = 0; k + 1 < o.nodes.size(); ++k) {
      const int n = o.nodes[k], m = o.nodes[k + 1];
      if (users_[n * n_ + m] > 0) continue;
      extra.emplace_back(n, 1);
      extra.emplace_back(m, 1);
    }
    if (extra.empty()) return true;
    std::map<int, int> add;
    for (auto [n, c] : extra) add[n] += c;
    for (auto [n, c] : add) {
      if (degree_[n] + c > inst_.base_stations[n].interfaces) return false;
    }
    return true;
  }

  void Dfs(int k, double cost) {
    Charge(1);
    ++nodes_;
    if (cost + suffix_bound_[k] >= best_cost_ * (1.0 - 1e-12) &&
        !best_choice_.empty()) {
      return;
    }
    if (k == static_cast<int>(order_.size())) {
      if (best_choice_.empty() || cost < best_cost_) {
        best_cost_ = cost;
        best_choice_ = choice_;
      }
      return;
    }
    const int b = order_[k];
    for (int c = 0; c < static_cast<int>(options_[b].size()); ++c) {
      const Option& o = options_[b][c];
      if (!Fits(b, o)) continue;
      const double delta = Apply(b, o, +1);
      choice_[b] = c;
      Dfs(k + 1, cost + delta);
      Apply(b, o, -1);
      choice_[b] = -1;
    }
  }

  Plan BuildPlan() const {
    const int n_tasks = inst_.num_tasks();
    // Ordered pairs in use, then interfaces handed out in sorted order.
    std::map<std::pair<int, int>, Link> pair_link;
    for (int b = 0; b < n_tasks; ++b) {
      const Option& o = options_[b][best_choice_[b]];
      for (size_t k = 0; k + 1 < o.nodes.size(); ++k) {
        pair_link[{o.nodes[k], o.nodes[k + 1]}] = Link{};
      }
    }
    std::vector<int> next_iface(n_, 0);
    Plan plan;
    for (auto& [pair, link] : pair_link) {
      link = Link{pair.first, next_iface[pair.first]++, pair.second,
                  next_iface[pair.second]++};
      plan.links.push_back(link);
    }
    std::sort(plan.links.begin(), plan.links.end());
    for (int b = 0; b < n_tasks; ++b) {
      const Option& o = options_[b][best_choice_[b]];
      TaskRoute route;
      for (size_t k = 0; k + 1 < o.nodes.size(); ++k) {
        route.path.push_back(pair_link.at({o.nodes[k], o.nodes[k + 1]}));
      }
      if (o.cloud) {
        route.site = ServingSite::Cloud();
        route.cloud_entry = o.nodes.back();
      } else {
        route.site = ServingSite::AtBs(o.nodes.back());
      }
      plan.routes.push_back(std::move(route));
    }
    return plan;
  }

  const Instance& inst_;
  const LinkGraph& graph_;
  const std::int64_t budget_;
  const int n_;
  std::int64_t work_ = 0;
  std::int64_t nodes_ = 0;
  std::vector<std::vector<Option>> options_;
  std::vector<int> order_;
  std::vector<double> suffix_bound_;
  std::vector<int> users_;  // tasks per ordered pair
  std::vector<double> weight_sum_;
  std::vector<int> degree_;
  std::vector<double> storage_;
  std::vector<int> choice_;
  std::vector<int> best_choice_;
  double best_cost_ = kInf;
};

}  // namespace

SolveOutcome BruteForcePlan(const Instance& inst, const LinkGraph& graph,
                            std::int64_t budget) {
  return Search(inst, graph, budget).Run();
}

}  // namespace mecplan
