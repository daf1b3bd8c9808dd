#include "mecplan/bwalloc.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mecplan/error.h"

namespace mecplan {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Shrinks `rho` until its floating-point sum (left to right) is <= budget.
void FitToBudget(std::vector<double>& rho, double budget) {
  for (int round = 0; round < 64; ++round) {
    double sum = 0.0;
    for (double r : rho) sum += r;
    if (sum <= budget) return;
    const double scale = budget / sum * (1.0 - 2.0 * (round + 1) * kEps);
    for (double& r : rho) r *= scale;
  }
}

double RelativeGap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale > 0 ? std::abs(a - b) / scale : 0.0;
}

}  // namespace

double KktReport::Max() const {
  return std::max({primal, dual, stationarity, complementarity});
}

std::vector<LinkLoad> CollectLinkLoads(const Plan& plan, const Instance& inst,
                                       const LinkGraph& graph) {
  std::vector<LinkLoad> loads;
  std::map<Link, size_t> index;
  for (const Link& link : plan.links) {
    index[link] = loads.size();
    loads.push_back(LinkLoad{link, graph.LinkRate(link), {}});
  }
  for (int b = 0; b < static_cast<int>(plan.routes.size()); ++b) {
    const Task& t = inst.tasks[b];
    for (const Link& link : plan.routes[b].path) {
      auto it = index.find(link);
      if (it == index.end()) {
        throw PlanningError(ErrorCode::kMissingAllocation,
                            "task " + std::to_string(b + 1) +
                                " uses unestablished link " + FormatLink(link));
      }
      loads[it->second].users.emplace_back(b, t.weight * t.size);
    }
  }
  for (const LinkLoad& load : loads) {
    if (load.users.empty()) {
      throw PlanningError(ErrorCode::kEmptyLink,
                          "link " + FormatLink(load.link) + " carries no task");
    }
  }
  return loads;
}

std::vector<double> SolveLinkClosedForm(const std::vector<double>& w,
                                        double xi) {
  double s = 0.0;
  for (double v : w) s += std::sqrt(v);
  std::vector<double> rho(w.size());
  for (size_t k = 0; k < w.size(); ++k) rho[k] = xi * std::sqrt(w[k]) / s;
  FitToBudget(rho, xi);
  return rho;
}

std::vector<double> SolveLinkBisection(const std::vector<double>& w,
                                       double xi) {
  if (w.empty()) return {};
  auto used = [&w](double lambda) {
    double sum = 0.0;
    for (double v : w) sum += std::sqrt(v / lambda);
    return sum;
  };
  const double w_min = *std::min_element(w.begin(), w.end());
  const double w_max = *std::max_element(w.begin(), w.end());
  const double n = static_cast<double>(w.size());
  // used(lo) >= xi >= used(hi).
  double lo = w_min / (xi * xi);
  double hi = n * n * w_max / (xi * xi);
  for (int it = 0; it < 400 && hi > lo * (1.0 + 4.0 * kEps); ++it) {
    const double mid = std::sqrt(lo * hi);
    if (mid <= lo || mid >= hi) break;
    if (used(mid) > xi) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  std::vector<double> rho(w.size());
  for (size_t k = 0; k < w.size(); ++k) rho[k] = std::sqrt(w[k] / hi);
  FitToBudget(rho, xi);
  return rho;
}

double LinkObjective(const std::vector<double>& w,
                     const std::vector<double>& rho) {
  double z = 0.0;
  for (size_t k = 0; k < w.size(); ++k) z += w[k] / rho[k];
  return z;
}

Allocation AllocateP2A(const Plan& plan, const Instance& inst,
                       const LinkGraph& graph, LinkSolver solver) {
  const double xi = inst.saturation;
  Allocation alloc;
  for (const LinkLoad& load : CollectLinkLoads(plan, inst, graph)) {
    std::vector<double> w;
    double s = 0.0;
    for (const auto& [task, gl] : load.users) {
      w.push_back(gl / load.capacity);
      s += std::sqrt(w.back());
    }
    const std::vector<double> rho = solver == LinkSolver::kClosedForm
                                        ? SolveLinkClosedForm(w, xi)
                                        : SolveLinkBisection(w, xi);
    for (size_t k = 0; k < w.size(); ++k) {
      alloc.rho[LinkTask{load.link, load.users[k].first}] = rho[k];
    }
    alloc.link_price[load.link] = (s / xi) * (s / xi);
  }
  return alloc;
}

Allocation EqualShare(const Plan& plan, const Instance& inst,
                      const LinkGraph& graph, double share) {
  Allocation alloc;
  for (const LinkLoad& load : CollectLinkLoads(plan, inst, graph)) {
    std::vector<double> rho(load.users.size(),
                            share / static_cast<double>(load.users.size()));
    FitToBudget(rho, share);
    for (size_t k = 0; k < rho.size(); ++k) {
      alloc.rho[LinkTask{load.link, load.users[k].first}] = rho[k];
    }
  }
  return alloc;
}

namespace {

// Path-rate view of P2B: tasks with a nonempty path and the links they use.
struct PathProblem {
  std::vector<int> tasks;            // task ids
  std::vector<double> beta;          // per problem task
  std::vector<std::vector<int>> on;  // per problem task: link positions
  std::vector<Link> links;
  std::vector<double> rate;      // R_l
  std::vector<double> capacity;  // xi R_l
};

PathProblem BuildPathProblem(const Plan& plan, const Instance& inst,
                             const LinkGraph& graph) {
  PathProblem p;
  std::map<Link, int> pos;
  for (const LinkLoad& load : CollectLinkLoads(plan, inst, graph)) {
    pos[load.link] = static_cast<int>(p.links.size());
    p.links.push_back(load.link);
    p.rate.push_back(load.capacity);
    p.capacity.push_back(inst.saturation * load.capacity);
  }
  for (int b = 0; b < static_cast<int>(plan.routes.size()); ++b) {
    const TaskRoute& route = plan.routes[b];
    if (route.path.empty()) continue;
    const Task& t = inst.tasks[b];
    p.tasks.push_back(b);
    p.beta.push_back(t.weight * t.size * route.hops());
    std::vector<int> on;
    for (const Link& link : route.path) on.push_back(pos.at(link));
    p.on.push_back(std::move(on));
  }
  return p;
}

struct DualState {
  std::vector<double> psi;
  std::vector<double> load;
  double dual_value = 0.0;
  double objective = 0.0;
};

DualState Evaluate(const PathProblem& p, const std::vector<double>& lambda) {
  DualState s;
  s.psi.resize(p.tasks.size());
  s.load.assign(p.links.size(), 0.0);
  for (size_t k = 0; k < p.tasks.size(); ++k) {
    double big_lambda = 0.0;
    for (int l : p.on[k]) big_lambda += lambda[l];
    s.psi[k] = std::sqrt(p.beta[k] / big_lambda);
    for (int l : p.on[k]) s.load[l] += s.psi[k];
    s.dual_value += 2.0 * std::sqrt(p.beta[k] * big_lambda);
    s.objective += p.beta[k] / s.psi[k];
  }
  for (size_t l = 0; l < p.links.size(); ++l) {
    s.dual_value -= lambda[l] * p.capacity[l];
  }
  return s;
}

double DualResidual(const PathProblem& p, const std::vector<double>& lambda,
                    const DualState& s) {
  double r = 0.0;
  for (size_t l = 0; l < p.links.size(); ++l) {
    r = std::max(r, std::max(0.0, s.load[l] - p.capacity[l]) / p.capacity[l]);
    r = std::max(r, lambda[l] * std::abs(p.capacity[l] - s.load[l]) /
                        s.objective);
  }
  return r;
}

}  // namespace

Allocation AllocateP2B(const Plan& plan, const Instance& inst,
                       const LinkGraph& graph, const P2BOptions& options) {
  const PathProblem p = BuildPathProblem(plan, inst, graph);
  Allocation alloc;
  alloc.psi.emplace();
  if (p.tasks.empty()) return alloc;

  const size_t n_links = p.links.size();
  std::vector<double> lambda(n_links, 0.0);
  for (size_t k = 0; k < p.tasks.size(); ++k) {
    for (int l : p.on[k]) lambda[l] += std::sqrt(p.beta[k]);
  }
  for (size_t l = 0; l < n_links; ++l) {
    lambda[l] = (lambda[l] / p.capacity[l]) * (lambda[l] / p.capacity[l]);
  }

  // Multiplicative dual ascent with backtracking on the dual value. The
  // internal target is tighter than the reported tolerance so that the final
  // feasibility scaling cannot push the residual over it.
  const double target = std::min(options.tolerance, 1e-7) * 1e-3;
  DualState state = Evaluate(p, lambda);
  double eta = 2.0;
  std::vector<double> trial(n_links);
  for (int it = 0; it < options.max_iterations; ++it) {
    if (DualResidual(p, lambda, state) <= target) break;
    bool accepted = false;
    for (int back = 0; back < 60 && !accepted; ++back) {
      for (size_t l = 0; l < n_links; ++l) {
        trial[l] = lambda[l] * std::pow(state.load[l] / p.capacity[l], eta);
        trial[l] = std::max(trial[l], std::numeric_limits<double>::min());
      }
      DualState next = Evaluate(p, trial);
      if (next.dual_value >=
          state.dual_value - 1e-15 * std::abs(state.dual_value)) {
        lambda.swap(trial);
        state = std::move(next);
        accepted = true;
        eta = std::min(2.0, eta * 1.5);
      } else {
        eta *= 0.5;
      }
    }
    if (!accepted) break;
  }

  // Exact primal feasibility: scale the rates into the capacities, then nudge
  // until every per-link share sum fits in floating point.
  std::vector<double> psi = state.psi;
  double scale = 1.0;
  for (size_t l = 0; l < n_links; ++l) {
    if (state.load[l] > p.capacity[l]) {
      scale = std::min(scale, p.capacity[l] / state.load[l]);
    }
  }
  for (double& v : psi) v *= scale;
  // Hand leftover capacity back: raise each path rate up to its tightest
  // link. Only increases rates, so feasibility holds and the objective drops.
  std::vector<double> used(n_links, 0.0);
  for (size_t k = 0; k < p.tasks.size(); ++k) {
    for (int l : p.on[k]) used[l] += psi[k];
  }
  for (int pass = 0; pass < 3; ++pass) {
    for (size_t k = 0; k < p.tasks.size(); ++k) {
      double room = std::numeric_limits<double>::infinity();
      for (int l : p.on[k]) room = std::min(room, p.capacity[l] - used[l]);
      if (!(room > 0.0) || std::isinf(room)) continue;
      psi[k] += room;
      for (int l : p.on[k]) used[l] += room;
    }
  }
  std::map<Link, std::vector<std::pair<int, int>>> users;  // link -> (k, task)
  for (size_t k = 0; k < p.tasks.size(); ++k) {
    for (int l : p.on[k]) {
      users[p.links[l]].emplace_back(static_cast<int>(k), p.tasks[k]);
    }
  }
  for (int round = 0; round < 64; ++round) {
    alloc.rho.clear();
    bool fits = true;
    for (size_t l = 0; l < n_links; ++l) {
      double sum = 0.0;
      auto& list = users[p.links[l]];
      std::sort(list.begin(), list.end(),
                [](auto a, auto b) { return a.second < b.second; });
      for (auto [k, task] : list) {
        const double r = psi[k] / p.rate[l];
        alloc.rho[LinkTask{p.links[l], task}] = r;
        sum += r;
      }
      if (sum > inst.saturation) fits = false;
    }
    if (fits) break;
    for (double& v : psi) v *= 1.0 - 4.0 * (round + 1) * kEps;
  }
  for (size_t k = 0; k < p.tasks.size(); ++k) {
    double bottleneck = std::numeric_limits<double>::infinity();
    for (int l : p.on[k]) {
      bottleneck = std::min(
          bottleneck, alloc.rho.at(LinkTask{p.links[l], p.tasks[k]}) * p.rate[l]);
    }
    (*alloc.psi)[p.tasks[k]] = bottleneck;
  }
  for (size_t l = 0; l < n_links; ++l) alloc.link_price[p.links[l]] = lambda[l];

  const KktReport report = VerifyKkt(plan, inst, graph, alloc);
  if (report.Max() > options.tolerance) {
    throw PlanningError(ErrorCode::kNoConvergence,
                        "minimum-rate allocation residual " +
                            std::to_string(report.Max()) + " after " +
                            std::to_string(options.max_iterations) +
                            " iterations");
  }
  return alloc;
}

KktReport VerifyKkt(const Plan& plan, const Instance& inst,
                    const LinkGraph& graph, const Allocation& alloc) {
  const double xi = inst.saturation;
  KktReport report;
  auto rho_of = [&alloc](const Link& link, int task) {
    auto it = alloc.rho.find(LinkTask{link, task});
    if (it == alloc.rho.end()) {
      throw PlanningError(ErrorCode::kMissingAllocation,
                          "no share for task " + std::to_string(task + 1) +
                              " on " + FormatLink(link));
    }
    return it->second;
  };
  auto price_of = [&alloc](const Link& link) -> std::optional<double> {
    auto it = alloc.link_price.find(link);
    if (it == alloc.link_price.end()) return std::nullopt;
    return it->second;
  };

  const std::vector<LinkLoad> loads = CollectLinkLoads(plan, inst, graph);
  for (const LinkLoad& load : loads) {
    double sum = 0.0;
    for (const auto& [task, gl] : load.users) {
      const double r = rho_of(load.link, task);
      sum += r;
      report.primal = std::max(report.primal, std::max(0.0, -r));
    }
    report.primal = std::max(report.primal, std::max(0.0, sum - xi) / xi);
  }

  if (!alloc.psi.has_value()) {
    for (const LinkLoad& load : loads) {
      std::vector<double> w, rho;
      double sum = 0.0;
      for (const auto& [task, gl] : load.users) {
        w.push_back(gl / load.capacity);
        rho.push_back(rho_of(load.link, task));
        sum += rho.back();
      }
      double lambda;
      if (auto price = price_of(load.link)) {
        lambda = *price;
      } else {
        lambda = 0.0;
        for (size_t k = 0; k < w.size(); ++k) lambda += w[k] / (rho[k] * rho[k]);
        lambda /= static_cast<double>(w.size());
      }
      report.dual = std::max(report.dual, std::max(0.0, -lambda));
      for (size_t k = 0; k < w.size(); ++k) {
        report.stationarity = std::max(
            report.stationarity, RelativeGap(w[k] / (rho[k] * rho[k]), lambda));
      }
      const double objective = LinkObjective(w, rho);
      if (objective > 0) {
        report.complementarity =
            std::max(report.complementarity,
                     std::abs(lambda) * std::abs(xi - sum) / objective);
      }
    }
    return report;
  }

  const PathProblem p = BuildPathProblem(plan, inst, graph);
  std::vector<double> lambda(p.links.size(), 0.0);
  std::vector<double> load(p.links.size(), 0.0);
  for (size_t l = 0; l < p.links.size(); ++l) {
    lambda[l] = price_of(p.links[l]).value_or(0.0);
    report.dual = std::max(report.dual, std::max(0.0, -lambda[l]));
  }
  double objective = 0.0;
  for (size_t k = 0; k < p.tasks.size(); ++k) {
    const int b = p.tasks[k];
    auto it = alloc.psi->find(b);
    if (it == alloc.psi->end()) {
      throw PlanningError(ErrorCode::kMissingAllocation,
                          "no path rate for task " + std::to_string(b + 1));
    }
    const double psi = it->second;
    objective += p.beta[k] / psi;
    double big_lambda = 0.0;
    for (int l : p.on[k]) {
      big_lambda += lambda[l];
      load[l] += psi;
      const double granted = rho_of(p.links[l], b) * p.rate[l];
      report.primal =
          std::max(report.primal, std::max(0.0, psi - granted) / psi);
    }
    report.stationarity = std::max(
        report.stationarity, RelativeGap(p.beta[k] / (psi * psi), big_lambda));
  }
  for (size_t l = 0; l < p.links.size(); ++l) {
    report.primal = std::max(
        report.primal, std::max(0.0, load[l] - p.capacity[l]) / p.capacity[l]);
    if (objective > 0) {
      report.complementarity =
          std::max(report.complementarity,
                   std::abs(lambda[l]) * std::abs(p.capacity[l] - load[l]) /
                       objective);
    }
  }
  return report;
}

}  // namespace mecplan
