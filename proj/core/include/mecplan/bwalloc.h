#ifndef MECPLAN_BWALLOC_H_
#define MECPLAN_BWALLOC_H_

// Step two: bandwidth shares for a fixed plan.
//
// P2A (hop-by-hop) separates per link into
//   min sum_b w_b / rho_b  s.t.  sum_b rho_b <= xi,  w_b = gamma_b L_b / R.
// P2B (minimum rate) is solved over the path rates Psi_b:
//   min sum_b beta_b / Psi_b  s.t.  sum_{b on l} Psi_b <= xi R_l,
// with beta_b = gamma_b L_b hops_b, then rho = Psi_b / R_l on every hop.

#include <utility>
#include <vector>

#include "mecplan/linkgraph.h"
#include "mecplan/model.h"

namespace mecplan {

struct LinkLoad {
  Link link;
  double capacity = 0.0;  // bytes/s
  // (task, gamma_b * L_b)
  std::vector<std::pair<int, double>> users;
};

// Every plan link with its users, in plan.links order. Throws
// PlanningError(kEmptyLink) for a link that carries no task.
std::vector<LinkLoad> CollectLinkLoads(const Plan& plan, const Instance& inst,
                                       const LinkGraph& graph);

// Optimal shares of one link for weights `w`: rho_b = xi sqrt(w_b) / S.
std::vector<double> SolveLinkClosedForm(const std::vector<double>& w,
                                        double xi);

// Same problem by bisection on the capacity multiplier lambda, with
// rho_b(lambda) = sqrt(w_b / lambda).
std::vector<double> SolveLinkBisection(const std::vector<double>& w,
                                       double xi);

// sum_b w_b / rho_b.
double LinkObjective(const std::vector<double>& w,
                     const std::vector<double>& rho);

enum class LinkSolver { kClosedForm, kBisection };

Allocation AllocateP2A(const Plan& plan, const Instance& inst,
                       const LinkGraph& graph,
                       LinkSolver solver = LinkSolver::kClosedForm);

struct P2BOptions {
  int max_iterations = 10'000;
  double tolerance = 1e-7;  // KKT residual required on return
};

// Throws PlanningError(kNoConvergence) when the residual stays above
// `tolerance` after the iteration cap.
Allocation AllocateP2B(const Plan& plan, const Instance& inst,
                       const LinkGraph& graph, const P2BOptions& options = {});

// Splits `share` of every link evenly among its users. share = 1 gives the
// Step-1 rule; share = xi gives the fixed policy used for comparisons.
Allocation EqualShare(const Plan& plan, const Instance& inst,
                      const LinkGraph& graph, double share);

struct KktReport {
  double primal = 0.0;
  double dual = 0.0;
  double stationarity = 0.0;
  double complementarity = 0.0;

  double Max() const;
};

// Optimality residuals of `alloc`, relative to the problem's scale. An
// allocation with psi is checked against P2B, otherwise against P2A. The
// multipliers are taken from alloc.link_price when present.
KktReport VerifyKkt(const Plan& plan, const Instance& inst,
                    const LinkGraph& graph, const Allocation& alloc);

}  // namespace mecplan

#endif  // MECPLAN_BWALLOC_H_
