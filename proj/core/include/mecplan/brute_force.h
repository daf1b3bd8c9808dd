#ifndef MECPLAN_BRUTE_FORCE_H_
#define MECPLAN_BRUTE_FORCE_H_

#include <cstdint>

#include "mecplan/linkgraph.h"
#include "mecplan/milp.h"
#include "mecplan/model.h"

namespace mecplan {

// Exhaustive Step-1 optimum for tiny instances: every task picks a local
// server, a direct cloud hand-off, or a simple path to a server or cloud
// entry, subject to interface, pair and storage limits. Latencies use the
// equal-share rule.
//
// `budget` caps the number of enumerated path options plus search nodes;
// exceeding it throws PlanningError(kTooLarge).
SolveOutcome BruteForcePlan(const Instance& inst, const LinkGraph& graph,
                            std::int64_t budget = 5'000'000);

}  // namespace mecplan

#endif  // MECPLAN_BRUTE_FORCE_H_
