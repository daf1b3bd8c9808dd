#include "mecplan/lp.h"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace mecplan::lp {

int LinearProgram::AddVariable(double lower, double upper, double cost) {
  col_lower_.push_back(lower);
  col_upper_.push_back(upper);
  cost_.push_back(cost);
  return num_variables() - 1;
}

int LinearProgram::AddRow(std::vector<Entry> entries, double lower,
                          double upper) {
  rows_.push_back(std::move(entries));
  row_lower_.push_back(lower);
  row_upper_.push_back(upper);
  return num_rows() - 1;
}

namespace {

enum State : std::int8_t { kBasic = 0, kAtLower = 1, kAtUpper = 2, kAtZero = 3 };

// Elementary transformation recorded after each basis change (product form).
struct Eta {
  int row = 0;
  double pivot = 0.0;
  std::vector<int> index;
  std::vector<double> value;
};

using SparseMatrix = Eigen::SparseMatrix<double>;
using Factor = Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>;

}  // namespace

class DualSimplex::Impl {
 public:
  Impl(const LinearProgram& lp, const SimplexOptions& options);

  void SetColumnBounds(int j, double lower, double upper) {
    lower_[j] = lower;
    upper_[j] = upper;
  }
  void ResetColumnBounds() {
    std::copy(base_lower_.begin(), base_lower_.end(), lower_.begin());
    std::copy(base_upper_.begin(), base_upper_.end(), upper_.begin());
  }

  LpSolution Solve(const Basis* warm, const SimplexOptions& options);
  Basis CurrentBasis() const { return Basis{head_, state_}; }

 private:
  int total() const { return n_ + m_; }
  bool IsFixed(int j) const { return lower_[j] == upper_[j]; }

  void ColdBasis();
  bool LoadBasis(const Basis& basis);
  void PlaceNonbasic(int j);
  bool Refactor();
  void KernelSolve(Eigen::VectorXd& v) const;
  void KernelSolveTransposed(Eigen::VectorXd& v) const;
  void Ftran(Eigen::VectorXd& v) const;
  void Btran(Eigen::VectorXd& v) const;
  void LoadColumn(int j, Eigen::VectorXd& v) const;
  void ComputePrimal();
  void ComputeDuals();
  // Flips boxed nonbasic variables whose reduced cost has the wrong sign.
  // Returns false when an unfixable dual infeasibility remains.
  bool RepairDualFeasibility(double tolerance);
  bool Reinvert();
  int SelectLeaving(bool bland) const;
  double Objective() const;

  int m_ = 0;
  int n_ = 0;
  std::vector<int> col_start_;
  std::vector<int> col_row_;
  std::vector<double> col_val_;
  std::vector<int> row_start_;
  std::vector<int> row_col_;
  std::vector<double> row_val_;
  std::vector<double> base_lower_;
  std::vector<double> base_upper_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> cost_;
  // Costs the iterations run on: cost_ plus a small perturbation while the
  // degenerate phase lasts.
  std::vector<double> work_cost_;
  std::vector<double> perturbation_;
  bool shifting_ = false;

  std::vector<int> head_;
  std::vector<int> basic_pos_;
  std::vector<std::int8_t> state_;
  std::vector<double> x_;
  std::vector<double> d_;
  // Dual Devex reference weights, one per basis position.
  std::vector<double> weight_;

  // The basis is factored through its kernel: rows not covered by a basic
  // logical against the structural basic columns. Logical positions are
  // resolved by substitution.
  mutable Factor lu_;
  std::vector<int> kernel_rows_;   // kernel row -> constraint row
  std::vector<int> kernel_pos_;    // kernel column -> basis position
  std::vector<int> row_kernel_;    // constraint row -> kernel row or -1
  std::vector<int> factored_head_;  // head_ when the kernel was factored
  bool factor_valid_ = false;
  std::vector<Eta> etas_;

  std::vector<double> alpha_row_;
  std::vector<int> touched_;
  std::vector<char> is_touched_;

  SimplexOptions options_;
};

DualSimplex::Impl::Impl(const LinearProgram& lp, const SimplexOptions& options)
    : options_(options) {
  m_ = lp.num_rows();
  n_ = lp.num_variables();
  const int nt = n_ + m_;
  base_lower_.resize(nt);
  base_upper_.resize(nt);
  cost_.assign(nt, 0.0);
  for (int j = 0; j < n_; ++j) {
    if (!std::isfinite(lp.col_lower(j)) || !std::isfinite(lp.col_upper(j))) {
      throw std::invalid_argument("dual simplex needs boxed structural columns");
    }
    base_lower_[j] = lp.col_lower(j);
    base_upper_[j] = lp.col_upper(j);
    cost_[j] = lp.cost(j);
  }
  for (int i = 0; i < m_; ++i) {
    base_lower_[n_ + i] = lp.row_lower(i);
    base_upper_[n_ + i] = lp.row_upper(i);
  }
  lower_ = base_lower_;
  upper_ = base_upper_;
  work_cost_ = cost_;

  // Deterministic per-column perturbation magnitudes, scaled to the costs.
  double cost_scale = 0.0;
  for (int j = 0; j < n_; ++j) cost_scale = std::max(cost_scale, std::abs(cost_[j]));
  if (cost_scale == 0.0) cost_scale = 1.0;
  perturbation_.assign(nt, 0.0);
  std::uint64_t state = 0x9E3779B97F4A7C15ULL;
  for (int j = 0; j < n_; ++j) {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    const double u = static_cast<double>(state >> 11) * 0x1.0p-53;
    perturbation_[j] =
        1e-6 * cost_scale * (1.0 + std::abs(cost_[j]) / cost_scale) * (0.5 + u);
  }

  // Row-wise and column-wise copies of the structural part of A.
  row_start_.assign(m_ + 1, 0);
  std::vector<int> col_count(n_, 0);
  for (int i = 0; i < m_; ++i) {
    row_start_[i + 1] = row_start_[i] + static_cast<int>(lp.row(i).size());
    for (const Entry& e : lp.row(i)) ++col_count[e.index];
  }
  row_col_.resize(row_start_[m_]);
  row_val_.resize(row_start_[m_]);
  col_start_.assign(n_ + 1, 0);
  for (int j = 0; j < n_; ++j) col_start_[j + 1] = col_start_[j] + col_count[j];
  col_row_.resize(col_start_[n_]);
  col_val_.resize(col_start_[n_]);
  std::vector<int> fill(col_start_.begin(), col_start_.end() - 1);
  for (int i = 0; i < m_; ++i) {
    int k = row_start_[i];
    for (const Entry& e : lp.row(i)) {
      row_col_[k] = e.index;
      row_val_[k] = e.value;
      ++k;
      col_row_[fill[e.index]] = i;
      col_val_[fill[e.index]] = e.value;
      ++fill[e.index];
    }
  }

  head_.resize(m_);
  basic_pos_.assign(nt, -1);
  state_.assign(nt, kAtLower);
  x_.assign(nt, 0.0);
  weight_.assign(m_, 1.0);
  d_.assign(nt, 0.0);
  alpha_row_.assign(nt, 0.0);
  is_touched_.assign(nt, 0);
}

void DualSimplex::Impl::PlaceNonbasic(int j) {
  switch (state_[j]) {
    case kAtLower: x_[j] = lower_[j]; break;
    case kAtUpper: x_[j] = upper_[j]; break;
    default: x_[j] = 0.0; break;
  }
  if (!std::isfinite(x_[j])) {
    // A nonbasic logical must sit at a finite bound.
    if (std::isfinite(lower_[j])) {
      state_[j] = kAtLower;
      x_[j] = lower_[j];
    } else if (std::isfinite(upper_[j])) {
      state_[j] = kAtUpper;
      x_[j] = upper_[j];
    } else {
      state_[j] = kAtZero;
      x_[j] = 0.0;
    }
  }
}

void DualSimplex::Impl::ColdBasis() {
  weight_.assign(m_, 1.0);
  std::fill(basic_pos_.begin(), basic_pos_.end(), -1);
  for (int i = 0; i < m_; ++i) {
    head_[i] = n_ + i;
    basic_pos_[n_ + i] = i;
    state_[n_ + i] = kBasic;
  }
  for (int j = 0; j < n_; ++j) {
    state_[j] = work_cost_[j] >= 0.0 ? kAtLower : kAtUpper;
    PlaceNonbasic(j);
  }
}

bool DualSimplex::Impl::LoadBasis(const Basis& basis) {
  if (static_cast<int>(basis.head.size()) != m_ ||
      static_cast<int>(basis.state.size()) != total()) {
    return false;
  }
  std::fill(basic_pos_.begin(), basic_pos_.end(), -1);
  for (int i = 0; i < m_; ++i) {
    const int j = basis.head[i];
    if (j < 0 || j >= total() || basic_pos_[j] != -1 ||
        basis.state[j] != kBasic) {
      return false;
    }
    basic_pos_[j] = i;
  }
  head_ = basis.head;
  state_ = basis.state;
  weight_.assign(m_, 1.0);
  for (int j = 0; j < total(); ++j) {
    if (basic_pos_[j] < 0) {
      if (state_[j] == kBasic) return false;
      PlaceNonbasic(j);
    }
  }
  return true;
}

bool DualSimplex::Impl::Refactor() {
  etas_.clear();
  factor_valid_ = false;
  if (m_ == 0) {
    factor_valid_ = true;
    return true;
  }
  std::vector<char> covered(m_, 0);
  factored_head_ = head_;
  kernel_pos_.clear();
  for (int i = 0; i < m_; ++i) {
    if (head_[i] >= n_) {
      covered[head_[i] - n_] = 1;
    } else {
      kernel_pos_.push_back(i);
    }
  }
  kernel_rows_.clear();
  row_kernel_.assign(m_, -1);
  for (int i = 0; i < m_; ++i) {
    if (covered[i]) continue;
    row_kernel_[i] = static_cast<int>(kernel_rows_.size());
    kernel_rows_.push_back(i);
  }
  const int k = static_cast<int>(kernel_pos_.size());
  if (static_cast<int>(kernel_rows_.size()) != k) return false;
  if (k > 0) {
    std::vector<Eigen::Triplet<double>> triplets;
    for (int c = 0; c < k; ++c) {
      const int j = head_[kernel_pos_[c]];
      for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) {
        const int rk = row_kernel_[col_row_[e]];
        if (rk >= 0) triplets.emplace_back(rk, c, col_val_[e]);
      }
    }
    SparseMatrix kernel(k, k);
    kernel.setFromTriplets(triplets.begin(), triplets.end());
    kernel.makeCompressed();
    lu_.analyzePattern(kernel);
    lu_.factorize(kernel);
    if (lu_.info() != Eigen::Success) return false;
  }
  factor_valid_ = true;
  return true;
}

void DualSimplex::Impl::KernelSolve(Eigen::VectorXd& v) const {
  const int k = static_cast<int>(kernel_pos_.size());
  Eigen::VectorXd out(m_);
  if (k > 0) {
    Eigen::VectorXd rhs(k);
    for (int r = 0; r < k; ++r) rhs[r] = v[kernel_rows_[r]];
    const Eigen::VectorXd xk = lu_.solve(rhs);
    for (int c = 0; c < k; ++c) out[kernel_pos_[c]] = xk[c];
  }
  // Logical positions: A[i, K] x_K - x_logical = v_i.
  Eigen::VectorXd acc = -v;
  for (int c = 0; c < k; ++c) {
    const int j = factored_head_[kernel_pos_[c]];
    const double xc = out[kernel_pos_[c]];
    if (xc == 0.0) continue;
    for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) {
      acc[col_row_[e]] += col_val_[e] * xc;
    }
  }
  for (int i = 0; i < m_; ++i) {
    if (factored_head_[i] >= n_) out[i] = acc[factored_head_[i] - n_];
  }
  v = std::move(out);
}

void DualSimplex::Impl::KernelSolveTransposed(Eigen::VectorXd& v) const {
  // v is indexed by basis position on entry and by row on exit.
  const int k = static_cast<int>(kernel_pos_.size());
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m_);
  for (int i = 0; i < m_; ++i) {
    if (factored_head_[i] >= n_) y[factored_head_[i] - n_] = -v[i];
  }
  if (k > 0) {
    Eigen::VectorXd t(k);
    for (int c = 0; c < k; ++c) {
      const int j = factored_head_[kernel_pos_[c]];
      double s = v[kernel_pos_[c]];
      for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) {
        if (row_kernel_[col_row_[e]] < 0) s -= col_val_[e] * y[col_row_[e]];
      }
      t[c] = s;
    }
    const Eigen::VectorXd yk = lu_.transpose().solve(t);
    for (int r = 0; r < k; ++r) y[kernel_rows_[r]] = yk[r];
  }
  v = std::move(y);
}

void DualSimplex::Impl::Ftran(Eigen::VectorXd& v) const {
  if (m_ == 0) return;
  KernelSolve(v);
  for (const Eta& eta : etas_) {
    const double t = v[eta.row] / eta.pivot;
    if (t == 0.0) continue;
    v[eta.row] = t;
    for (size_t k = 0; k < eta.index.size(); ++k) {
      v[eta.index[k]] -= eta.value[k] * t;
    }
  }
}

void DualSimplex::Impl::Btran(Eigen::VectorXd& v) const {
  if (m_ == 0) return;
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double s = v[it->row];
    for (size_t k = 0; k < it->index.size(); ++k) {
      s -= it->value[k] * v[it->index[k]];
    }
    v[it->row] = s / it->pivot;
  }
  KernelSolveTransposed(v);
}

void DualSimplex::Impl::LoadColumn(int j, Eigen::VectorXd& v) const {
  v.setZero(m_);
  if (j >= n_) {
    v[j - n_] = -1.0;
    return;
  }
  for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) {
    v[col_row_[k]] = col_val_[k];
  }
}

void DualSimplex::Impl::ComputePrimal() {
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
  for (int j = 0; j < n_; ++j) {
    if (basic_pos_[j] >= 0 || x_[j] == 0.0) continue;
    for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) {
      rhs[col_row_[k]] -= col_val_[k] * x_[j];
    }
  }
  for (int i = 0; i < m_; ++i) {
    const int j = n_ + i;
    if (basic_pos_[j] >= 0) continue;
    rhs[i] += x_[j];
  }
  Ftran(rhs);
  for (int i = 0; i < m_; ++i) x_[head_[i]] = rhs[i];
}

void DualSimplex::Impl::ComputeDuals() {
  Eigen::VectorXd y(m_);
  for (int i = 0; i < m_; ++i) y[i] = work_cost_[head_[i]];
  Btran(y);
  for (int j = 0; j < n_; ++j) {
    if (basic_pos_[j] >= 0) {
      d_[j] = 0.0;
      continue;
    }
    double s = work_cost_[j];
    for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) {
      s -= y[col_row_[k]] * col_val_[k];
    }
    d_[j] = s;
  }
  for (int i = 0; i < m_; ++i) {
    const int j = n_ + i;
    d_[j] = basic_pos_[j] >= 0 ? 0.0 : work_cost_[j] + y[i];
  }
}

bool DualSimplex::Impl::RepairDualFeasibility(double tolerance) {
  bool ok = true;
  for (int j = 0; j < total(); ++j) {
    if (basic_pos_[j] >= 0 || IsFixed(j)) continue;
    if (state_[j] == kAtLower && d_[j] < -tolerance) {
      if (std::isfinite(upper_[j])) {
        state_[j] = kAtUpper;
        x_[j] = upper_[j];
      } else {
        ok = false;
      }
    } else if (state_[j] == kAtUpper && d_[j] > tolerance) {
      if (std::isfinite(lower_[j])) {
        state_[j] = kAtLower;
        x_[j] = lower_[j];
      } else {
        ok = false;
      }
    }
  }
  return ok;
}

bool DualSimplex::Impl::Reinvert() {
  if (!Refactor()) return false;
  ComputeDuals();
  if (shifting_) {
    // Drift left by the ratio test tolerance is absorbed into the working
    // costs instead of flipping bounds, which would undo primal progress.
    for (int j = 0; j < total(); ++j) {
      if (basic_pos_[j] >= 0 || IsFixed(j)) continue;
      const bool wrong = (state_[j] == kAtLower && d_[j] < 0.0) ||
                         (state_[j] == kAtUpper && d_[j] > 0.0);
      if (wrong && std::abs(d_[j]) <= 1e-7) {
        work_cost_[j] -= d_[j];
        d_[j] = 0.0;
      }
    }
  }
  if (!RepairDualFeasibility(options_.dual_tolerance)) return false;
  ComputePrimal();
  return true;
}

int DualSimplex::Impl::SelectLeaving(bool bland) const {
  int best = -1;
  double best_violation = 0.0;
  int best_var = total();
  const double tol = options_.primal_tolerance;
  for (int i = 0; i < m_; ++i) {
    const int j = head_[i];
    const double v = x_[j];
    double violation = 0.0;
    if (v < lower_[j] - tol * (1.0 + std::abs(lower_[j]))) {
      violation = lower_[j] - v;
    } else if (v > upper_[j] + tol * (1.0 + std::abs(upper_[j]))) {
      violation = v - upper_[j];
    } else {
      continue;
    }
    if (bland) {
      if (j < best_var) {
        best_var = j;
        best = i;
      }
    } else if (violation * violation > best_violation * weight_[i]) {
      best_violation = violation * violation / weight_[i];
      best = i;
    }
  }
  return best;
}

double DualSimplex::Impl::Objective() const {
  double z = 0.0;
  for (int j = 0; j < n_; ++j) z += cost_[j] * x_[j];
  return z;
}

LpSolution DualSimplex::Impl::Solve(const Basis* warm,
                                    const SimplexOptions& options) {
  options_ = options;
  LpSolution result;
  for (int j = 0; j < n_; ++j) {
    if (lower_[j] > upper_[j]) {
      result.status = LpStatus::kInfeasible;
      return result;
    }
  }

  // Perturb toward the side each column currently sits on, so the starting
  // basis stays dual feasible.
  auto perturb = [this](bool on) {
    for (int j = 0; j < total(); ++j) {
      double delta = 0.0;
      if (on && !IsFixed(j)) {
        delta = state_[j] == kAtUpper ? -perturbation_[j] : perturbation_[j];
      }
      work_cost_[j] = cost_[j] + delta;
    }
    shifting_ = on;
  };
  if (warm != nullptr && static_cast<int>(warm->state.size()) == total()) {
    state_ = warm->state;
  }
  perturb(true);
  bool perturbed = true;

  bool ready = false;
  if (warm != nullptr && factor_valid_ && warm->head == head_ &&
      static_cast<int>(warm->state.size()) == total()) {
    // Same basis as the one already factored: only the bounds moved, so the
    // duals stay valid and just the primal values need refreshing.
    for (int j = 0; j < total(); ++j) {
      if (basic_pos_[j] < 0) PlaceNonbasic(j);
    }
    ComputeDuals();
    ready = RepairDualFeasibility(options_.dual_tolerance);
    if (ready) ComputePrimal();
  }
  if (!ready && warm != nullptr && LoadBasis(*warm)) ready = Reinvert();
  if (!ready) {
    perturb(false);
    ColdBasis();
    perturb(true);
    if (!Reinvert()) {
      result.status = LpStatus::kStall;
      return result;
    }
  }

  const int iteration_limit =
      options_.iteration_limit > 0
          ? options_.iteration_limit
          : std::max(20000, 25 * (m_ + n_));
  bool bland = false;
  int degenerate_streak = 0;
  int iterations = 0;
  bool confirmed = false;
  Eigen::VectorXd rho(m_);
  Eigen::VectorXd column(m_);

  while (true) {
    if (iterations >= iteration_limit) {
      result.status = LpStatus::kStall;
      break;
    }
    if (options_.deadline.has_value() && (iterations & 31) == 0 &&
        std::chrono::steady_clock::now() >= *options_.deadline) {
      result.status = LpStatus::kTimeLimit;
      break;
    }
    if (static_cast<int>(etas_.size()) >= options_.refactor_interval) {
      if (!Reinvert()) {
        ColdBasis();
        if (!Reinvert()) {
          result.status = LpStatus::kStall;
          break;
        }
      }
    }

    const int r = SelectLeaving(bland);
    if (r < 0 && perturbed) {
      // Back to the true costs; flips repair the few duals that turn.
      perturbed = false;
      perturb(false);
      bland = false;
      degenerate_streak = 0;
      ComputeDuals();
      if (!RepairDualFeasibility(options_.dual_tolerance)) {
        ColdBasis();
        if (!Reinvert()) {
          result.status = LpStatus::kStall;
          break;
        }
      } else {
        ComputePrimal();
      }
      confirmed = false;
      continue;
    }
    if (r < 0) {
      if (!confirmed) {
        // Recompute values from the factorization before accepting them.
        confirmed = true;
        perturb(false);
        ComputeDuals();
        if (!RepairDualFeasibility(options_.dual_tolerance)) {
          if (!Reinvert()) {
            result.status = LpStatus::kStall;
            break;
          }
        } else {
          ComputePrimal();
        }
        if (SelectLeaving(bland) >= 0) continue;
      }
      result.status = LpStatus::kOptimal;
      break;
    }
    confirmed = false;
    ++iterations;

    const int p = head_[r];
    const bool to_lower = x_[p] < lower_[p];
    const double bound = to_lower ? lower_[p] : upper_[p];
    const double sign = to_lower ? 1.0 : -1.0;

    rho.setZero();
    rho[r] = 1.0;
    Btran(rho);

    // Pivot row over nonbasic columns.
    for (int j : touched_) {
      alpha_row_[j] = 0.0;
      is_touched_[j] = 0;
    }
    touched_.clear();
    for (int i = 0; i < m_; ++i) {
      const double ri = rho[i];
      if (std::abs(ri) < 1e-13) continue;
      for (int k = row_start_[i]; k < row_start_[i + 1]; ++k) {
        const int j = row_col_[k];
        if (!is_touched_[j]) {
          is_touched_[j] = 1;
          touched_.push_back(j);
        }
        alpha_row_[j] += ri * row_val_[k];
      }
      const int logical = n_ + i;
      if (!is_touched_[logical]) {
        is_touched_[logical] = 1;
        touched_.push_back(logical);
      }
      alpha_row_[logical] = -ri;
    }

    // Dual ratio test: Harris two-pass, or plain minimum ratio with lowest
    // index under Bland's rule.
    const double piv_tol = options_.pivot_tolerance;
    const double dual_tol = options_.dual_tolerance;
    auto eligible = [&](int j, double& slack, double& rate) {
      if (basic_pos_[j] >= 0 || IsFixed(j)) return false;
      const double a = sign * alpha_row_[j];
      switch (state_[j]) {
        case kAtLower:
          if (a >= -piv_tol) return false;
          slack = d_[j];
          break;
        case kAtUpper:
          if (a <= piv_tol) return false;
          slack = -d_[j];
          break;
        default:
          if (std::abs(a) <= piv_tol) return false;
          slack = 0.0;
          break;
      }
      rate = std::abs(a);
      return true;
    };

    int q = -1;
    double step = 0.0;
    if (!bland) {
      double bound_ratio = kInfinity;
      for (int j : touched_) {
        double slack, rate;
        if (!eligible(j, slack, rate)) continue;
        bound_ratio = std::min(bound_ratio, (slack + dual_tol) / rate);
      }
      double best_rate = 0.0;
      for (int j : touched_) {
        double slack, rate;
        if (!eligible(j, slack, rate)) continue;
        if (slack / rate <= bound_ratio &&
            (rate > best_rate || (rate == best_rate && j < q))) {
          best_rate = rate;
          q = j;
          step = std::max(slack, 0.0) / rate;
        }
      }
    } else {
      double min_ratio = kInfinity;
      for (int j : touched_) {
        double slack, rate;
        if (!eligible(j, slack, rate)) continue;
        min_ratio = std::min(min_ratio, std::max(slack, 0.0) / rate);
      }
      for (int j : touched_) {
        double slack, rate;
        if (!eligible(j, slack, rate)) continue;
        if (slack / rate <= min_ratio + 1e-12 && (q < 0 || j < q)) {
          q = j;
          step = std::max(slack, 0.0) / rate;
        }
      }
    }
    if (q < 0) {
      result.status = LpStatus::kInfeasible;
      break;
    }
    if (step == 0.0 && d_[q] != 0.0) {
      // Harris admitted a slightly wrong-signed entering column; shift its
      // cost so the zero step keeps the duals consistent.
      work_cost_[q] -= d_[q];
      d_[q] = 0.0;
    }

    LoadColumn(q, column);
    Ftran(column);
    const double pivot = column[r];
    if (std::abs(pivot) < piv_tol ||
        std::abs(pivot - alpha_row_[q]) > 1e-7 * (1.0 + std::abs(pivot))) {
      if (!etas_.empty()) {
        if (!Reinvert()) {
          result.status = LpStatus::kStall;
          break;
        }
        continue;
      }
      if (std::abs(pivot) < piv_tol) {
        result.status = LpStatus::kStall;
        break;
      }
    }

    // Dual update.
    const double dual_step = sign * step;
    for (int j : touched_) {
      if (basic_pos_[j] >= 0) continue;
      d_[j] += dual_step * alpha_row_[j];
    }
    d_[q] = 0.0;
    d_[p] = dual_step;

    // Primal update.
    const double infeasibility = std::abs(x_[p] - bound);
    const double theta = (x_[p] - bound) / pivot;
    for (int i = 0; i < m_; ++i) {
      if (column[i] != 0.0) x_[head_[i]] -= theta * column[i];
    }
    x_[q] += theta;
    x_[p] = bound;

    const double wr = weight_[r];
    double wmax = 0.0;
    for (int i = 0; i < m_; ++i) {
      if (i == r || column[i] == 0.0) continue;
      const double ratio = column[i] / pivot;
      weight_[i] = std::max(weight_[i], ratio * ratio * wr);
      wmax = std::max(wmax, weight_[i]);
    }
    weight_[r] = std::max(wr / (pivot * pivot), 1.0);
    if (wmax > 1e6) weight_.assign(m_, 1.0);

    head_[r] = q;
    basic_pos_[q] = r;
    basic_pos_[p] = -1;
    state_[q] = kBasic;
    state_[p] = (to_lower || IsFixed(p)) ? kAtLower : kAtUpper;

    Eta eta;
    eta.row = r;
    eta.pivot = pivot;
    for (int i = 0; i < m_; ++i) {
      if (i != r && std::abs(column[i]) > 1e-14) {
        eta.index.push_back(i);
        eta.value.push_back(column[i]);
      }
    }
    etas_.push_back(std::move(eta));

    if (step * infeasibility <= 1e-12) {
      if (++degenerate_streak > options_.degenerate_streak_limit) bland = true;
    } else {
      degenerate_streak = 0;
    }
  }

  result.iterations = iterations;
  result.bland_fallback = bland;
  if (result.status == LpStatus::kOptimal) {
    result.x.assign(x_.begin(), x_.begin() + n_);
    result.objective = Objective();
  }
  return result;
}

DualSimplex::DualSimplex(const LinearProgram& lp, SimplexOptions options)
    : impl_(std::make_unique<Impl>(lp, options)), options_(options) {}

DualSimplex::~DualSimplex() = default;

void DualSimplex::SetColumnBounds(int j, double lower, double upper) {
  impl_->SetColumnBounds(j, lower, upper);
}

void DualSimplex::ResetColumnBounds() { impl_->ResetColumnBounds(); }

LpSolution DualSimplex::Solve(const Basis* warm_start) {
  return impl_->Solve(warm_start, options_);
}

Basis DualSimplex::CurrentBasis() const { return impl_->CurrentBasis(); }

}  // namespace mecplan::lp
