#ifndef MECPLAN_LINKGRAPH_H_
#define MECPLAN_LINKGRAPH_H_

#include <vector>

#include "mecplan/model.h"

namespace mecplan {

// Feasible-link structure of a backhaul network: per base-station pair
// feasibility and capacity (both symmetric), plus every directed
// interface-pair link those pairs admit.
class LinkGraph {
 public:
  LinkGraph() = default;

  int num_bs() const { return num_bs_; }
  int interfaces(int n) const { return interfaces_[n]; }
  bool in_range(int n, int m) const { return in_range_[Index(n, m)] != 0; }
  bool delta(int n, int m) const { return delta_[Index(n, m)] != 0; }
  double rate(int n, int m) const { return rate_[Index(n, m)]; }
  double rate_floor() const { return rate_floor_; }

  const std::vector<Link>& candidate_links() const { return candidates_; }
  bool IsCandidate(const Link& link) const;
  double LinkRate(const Link& link) const { return rate(link.from, link.to); }

  // Full N x N rate matrix, row-major rows.
  std::vector<std::vector<double>> RateTable() const;

  friend bool operator==(const LinkGraph&, const LinkGraph&) = default;

 private:
  friend LinkGraph BuildLinkGraph(const Instance& inst);
  friend LinkGraph OverrideRates(const LinkGraph& graph,
                                 const std::vector<std::vector<double>>& table);

  int Index(int n, int m) const { return n * num_bs_ + m; }
  void Finalize();

  int num_bs_ = 0;
  double rate_floor_ = 0.0;
  std::vector<int> interfaces_;
  std::vector<char> in_range_;
  std::vector<char> delta_;
  std::vector<double> rate_;
  std::vector<Link> candidates_;
};

// Modeled rate between two points `distance` meters apart, bytes/s.
double ModeledRate(const LinkModelConfig& config, double distance);

// Applies the distance model to every base-station pair. Throws
// PlanningError(kCoincidentBs) when two stations share a position.
LinkGraph BuildLinkGraph(const Instance& inst);

// Replaces the rate matrix and recomputes feasibility against the floor.
// Throws PlanningError(kShapeMismatch) for a non-square, asymmetric or
// negative table.
LinkGraph OverrideRates(const LinkGraph& graph,
                        const std::vector<std::vector<double>>& table);

// BuildLinkGraph followed by the instance's own rate overrides, if any.
LinkGraph BuildInstanceGraph(const Instance& inst);

}  // namespace mecplan

#endif  // MECPLAN_LINKGRAPH_H_
