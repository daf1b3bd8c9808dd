#include "mecplan/linkgraph.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "mecplan/error.h"

namespace mecplan {

double ModeledRate(const LinkModelConfig& config, double distance) {
  if (distance <= config.reference_distance_m) return config.rate_at_reference;
  return config.rate_at_reference *
         std::pow(config.reference_distance_m / distance,
                  config.path_loss_exponent);
}

bool LinkGraph::IsCandidate(const Link& link) const {
  if (link.from < 0 || link.from >= num_bs_ || link.to < 0 ||
      link.to >= num_bs_ || link.from == link.to) {
    return false;
  }
  if (link.from_iface < 0 || link.from_iface >= interfaces_[link.from] ||
      link.to_iface < 0 || link.to_iface >= interfaces_[link.to]) {
    return false;
  }
  return delta(link.from, link.to);
}

std::vector<std::vector<double>> LinkGraph::RateTable() const {
  std::vector<std::vector<double>> table(num_bs_,
                                         std::vector<double>(num_bs_, 0.0));
  for (int n = 0; n < num_bs_; ++n) {
    for (int m = 0; m < num_bs_; ++m) table[n][m] = rate(n, m);
  }
  return table;
}

void LinkGraph::Finalize() {
  candidates_.clear();
  for (int n = 0; n < num_bs_; ++n) {
    for (int m = 0; m < num_bs_; ++m) {
      const bool feasible =
          n != m && in_range_[Index(n, m)] && rate_[Index(n, m)] >= rate_floor_;
      delta_[Index(n, m)] = feasible ? 1 : 0;
    }
  }
  for (int n = 0; n < num_bs_; ++n) {
    for (int i = 0; i < interfaces_[n]; ++i) {
      for (int m = 0; m < num_bs_; ++m) {
        if (!delta(n, m)) continue;
        for (int j = 0; j < interfaces_[m]; ++j) {
          candidates_.push_back(Link{n, i, m, j});
        }
      }
    }
  }
}

LinkGraph BuildLinkGraph(const Instance& inst) {
  LinkGraph g;
  const int n_bs = inst.num_bs();
  const LinkModelConfig& config = inst.link_model;
  g.num_bs_ = n_bs;
  g.rate_floor_ = config.rate_floor;
  g.interfaces_.resize(n_bs);
  g.in_range_.assign(static_cast<size_t>(n_bs) * n_bs, 0);
  g.delta_.assign(static_cast<size_t>(n_bs) * n_bs, 0);
  g.rate_.assign(static_cast<size_t>(n_bs) * n_bs, 0.0);
  for (int n = 0; n < n_bs; ++n) {
    g.interfaces_[n] = std::max(0, inst.base_stations[n].interfaces);
  }
  for (int n = 0; n < n_bs; ++n) {
    for (int m = n + 1; m < n_bs; ++m) {
      const BaseStation& a = inst.base_stations[n];
      const BaseStation& b = inst.base_stations[m];
      const double distance = std::hypot(a.x - b.x, a.y - b.y);
      if (distance == 0.0) {
        throw PlanningError(ErrorCode::kCoincidentBs,
                            "base stations " + std::to_string(n + 1) +
                                " and " + std::to_string(m + 1) +
                                " share a position");
      }
      const double rate = ModeledRate(config, distance);
      const char in_range = distance <= config.max_range_m ? 1 : 0;
      g.rate_[g.Index(n, m)] = g.rate_[g.Index(m, n)] = rate;
      g.in_range_[g.Index(n, m)] = g.in_range_[g.Index(m, n)] = in_range;
    }
  }
  g.Finalize();
  return g;
}

LinkGraph OverrideRates(const LinkGraph& graph,
                        const std::vector<std::vector<double>>& table) {
  const int n_bs = graph.num_bs();
  if (static_cast<int>(table.size()) != n_bs) {
    throw PlanningError(ErrorCode::kShapeMismatch,
                        "rate table has " + std::to_string(table.size()) +
                            " rows, expected " + std::to_string(n_bs));
  }
  for (const auto& row : table) {
    if (static_cast<int>(row.size()) != n_bs) {
      throw PlanningError(ErrorCode::kShapeMismatch, "rate table is not square");
    }
  }
  LinkGraph g = graph;
  for (int n = 0; n < n_bs; ++n) {
    for (int m = 0; m < n_bs; ++m) {
      if (n == m) continue;
      const double v = table[n][m];
      if (!std::isfinite(v) || v < 0.0) {
        throw PlanningError(ErrorCode::kShapeMismatch,
                            "rate table entry is negative or not finite");
      }
      if (v != table[m][n]) {
        throw PlanningError(ErrorCode::kShapeMismatch,
                            "rate table is not symmetric");
      }
      g.rate_[g.Index(n, m)] = v;
    }
  }
  g.Finalize();
  return g;
}

LinkGraph BuildInstanceGraph(const Instance& inst) {
  LinkGraph g = BuildLinkGraph(inst);
  if (inst.rate_overrides.empty()) return g;
  auto table = g.RateTable();
  for (const RateOverride& o : inst.rate_overrides) {
    if (o.n < 0 || o.n >= g.num_bs() || o.m < 0 || o.m >= g.num_bs() ||
        o.n == o.m) {
      throw PlanningError(ErrorCode::kShapeMismatch,
                          "rate override refers to an unknown pair");
    }
    table[o.n][o.m] = table[o.m][o.n] = o.rate;
  }
  return OverrideRates(g, table);
}

}  // namespace mecplan
