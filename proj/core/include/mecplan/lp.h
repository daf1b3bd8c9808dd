#ifndef MECPLAN_LP_H_
#define MECPLAN_LP_H_

// Bounded-variable dual simplex used as the bounding engine of the
// branch-and-bound solver.
//
// Problems have the form
//   minimize c'x  subject to  row_lower <= A x <= row_upper,
//                             col_lower <= x <= col_upper,
// where every structural column must have finite bounds. With boxed columns
// the all-logical basis is dual feasible, so no phase one is needed and any
// previously optimal basis stays dual feasible after bound changes.

#include <chrono>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

namespace mecplan::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Entry {
  int index = 0;
  double value = 0.0;
};

class LinearProgram {
 public:
  int AddVariable(double lower, double upper, double cost);
  int AddRow(std::vector<Entry> entries, double lower, double upper);

  int num_variables() const { return static_cast<int>(cost_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }

  double col_lower(int j) const { return col_lower_[j]; }
  double col_upper(int j) const { return col_upper_[j]; }
  double cost(int j) const { return cost_[j]; }
  const std::vector<Entry>& row(int i) const { return rows_[i]; }
  double row_lower(int i) const { return row_lower_[i]; }
  double row_upper(int i) const { return row_upper_[i]; }

 private:
  std::vector<double> col_lower_;
  std::vector<double> col_upper_;
  std::vector<double> cost_;
  std::vector<std::vector<Entry>> rows_;
  std::vector<double> row_lower_;
  std::vector<double> row_upper_;
};

enum class LpStatus { kOptimal, kInfeasible, kStall, kTimeLimit };

// Basis snapshot: which variable is basic in every row position plus the
// bound every nonbasic variable sits at. Variables are numbered structurals
// first, then one logical per row.
struct Basis {
  std::vector<int> head;
  std::vector<std::int8_t> state;
};

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;
  std::vector<double> x;  // structural values, valid when kOptimal
  int iterations = 0;
  bool bland_fallback = false;
};

struct SimplexOptions {
  double primal_tolerance = 1e-9;
  double dual_tolerance = 1e-9;
  double pivot_tolerance = 1e-9;
  int refactor_interval = 64;
  // Consecutive dual-degenerate pivots before switching to Bland's rule.
  int degenerate_streak_limit = 400;
  // 0 selects max(20000, 25 * (rows + columns)).
  int iteration_limit = 0;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

class DualSimplex {
 public:
  explicit DualSimplex(const LinearProgram& lp, SimplexOptions options = {});
  ~DualSimplex();
  DualSimplex(const DualSimplex&) = delete;
  DualSimplex& operator=(const DualSimplex&) = delete;

  // Bounds of structural column j for the next Solve.
  void SetColumnBounds(int j, double lower, double upper);
  void ResetColumnBounds();

  // Solves from `warm_start` when given (and usable), else from the
  // all-logical basis.
  LpSolution Solve(const Basis* warm_start = nullptr);

  // Basis reached by the last Solve.
  Basis CurrentBasis() const;

  void set_deadline(std::optional<std::chrono::steady_clock::time_point> d) {
    options_.deadline = d;
  }

 private:
  class Impl;
  std::unique_ptr<Impl> impl_;
  SimplexOptions options_;
};

}  // namespace mecplan::lp

#endif  // MECPLAN_LP_H_
