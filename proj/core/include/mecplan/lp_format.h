#ifndef MECPLAN_LP_FORMAT_H_
#define MECPLAN_LP_FORMAT_H_

#include <string>

#include "mecplan/milp.h"

namespace mecplan {

// CPLEX LP text of the model, for cross-checking with external solvers.
// Output depends only on the model, byte for byte.
std::string WriteLpFormat(const MilpModel& model);

}  // namespace mecplan

#endif  // MECPLAN_LP_FORMAT_H_
