// Dense bounded-variable primal simplex.
//
// Every column is shifted to the range [0, ub] (ub may be infinite), rows get
// slack columns, and rows whose slack cannot start basic get an artificial
// column minimised away in phase 1. Nonbasic columns sit at either bound, so
// branch-and-bound bound changes never add rows. A short bound-propagation
// pass removes singleton, forcing, and redundant rows before the tableau is
// built.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "odpd/grid.hpp"
#include "odpd/kernels.hpp"
#include "odpd/milp.hpp"

namespace odpd::milp {
namespace {

constexpr double kFeasTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kHarrisTol = 1e-10;
constexpr int kDegenerateBeforeBland = 200;

enum class Presolve { kOk, kInfeasible };

struct Activity {
  double min = 0.0;
  double max = 0.0;
};

Activity row_activity(const LinearConstraint& row, const std::vector<double>& lb,
                      const std::vector<double>& ub) {
  Activity act;
  for (const Term& t : row.terms) {
    const double lo = lb[t.var.value];
    const double hi = ub[t.var.value];
    if (t.coef > 0) {
      act.min += t.coef * lo;
      act.max += t.coef * hi;
    } else {
      act.min += t.coef * hi;
      act.max += t.coef * lo;
    }
  }
  // inf - inf cannot occur: each side only accumulates one sign of infinity.
  return act;
}

// Fixes every variable of a forcing row at the bound that attains the
// row's minimum (at_min) or maximum activity.
void force_row(const LinearConstraint& row, bool at_min, std::vector<double>& lb,
               std::vector<double>& ub) {
  for (const Term& t : row.terms) {
    const int j = t.var.value;
    const bool take_lower = (t.coef > 0) == at_min;
    if (take_lower) {
      ub[j] = lb[j];
    } else {
      lb[j] = ub[j];
    }
  }
}

Presolve propagate_bounds(const MilpProblem& p, std::vector<double>& lb,
                          std::vector<double>& ub, std::vector<char>& row_active) {
  const auto& rows = p.constraints();
  for (int pass = 0; pass < 25; ++pass) {
    bool changed = false;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (!row_active[r]) continue;
      const LinearConstraint& row = rows[r];
      const Activity act = row_activity(row, lb, ub);
      const double b = row.rhs;
      const double tol = kFeasTol * std::max(1.0, std::fabs(b));
      const bool need_le = row.sense != Sense::kGreaterEqual;
      const bool need_ge = row.sense != Sense::kLessEqual;
      if ((need_le && act.min > b + tol) || (need_ge && act.max < b - tol)) {
        return Presolve::kInfeasible;
      }
      const bool le_redundant = !need_le || act.max <= b + tol;
      const bool ge_redundant = !need_ge || act.min >= b - tol;
      if (le_redundant && ge_redundant) {
        row_active[r] = 0;
        changed = true;
        continue;
      }
      if (need_le && std::fabs(act.min - b) <= tol && std::isfinite(act.min)) {
        force_row(row, true, lb, ub);
        row_active[r] = 0;
        changed = true;
        continue;
      }
      if (need_ge && std::fabs(act.max - b) <= tol && std::isfinite(act.max)) {
        force_row(row, false, lb, ub);
        row_active[r] = 0;
        changed = true;
        continue;
      }
      // Singleton: one column not fixed.
      int free_count = 0;
      const Term* single = nullptr;
      double fixed_part = 0.0;
      for (const Term& t : row.terms) {
        const int j = t.var.value;
        if (ub[j] - lb[j] <= 0.0) {
          fixed_part += t.coef * lb[j];
        } else {
          ++free_count;
          single = &t;
        }
      }
      if (free_count != 1) continue;
      const int j = single->var.value;
      const double bound = (b - fixed_part) / single->coef;
      const bool upper_side_le = single->coef > 0;  // a x <= b  =>  x <= bound
      if (need_le) {
        if (upper_side_le) {
          ub[j] = std::min(ub[j], bound);
        } else {
          lb[j] = std::max(lb[j], bound);
        }
      }
      if (need_ge) {
        if (upper_side_le) {
          lb[j] = std::max(lb[j], bound);
        } else {
          ub[j] = std::min(ub[j], bound);
        }
      }
      if (lb[j] > ub[j]) {
        if (lb[j] - ub[j] > kFeasTol * std::max(1.0, std::fabs(lb[j]))) {
          return Presolve::kInfeasible;
        }
        ub[j] = lb[j];
      }
      row_active[r] = 0;
      changed = true;
    }
    if (!changed) break;
  }
  return Presolve::kOk;
}

// Column of the transformed LP: x_orig += sign * x_col, x_col in [0, ub].
struct LpColumn {
  int var;
  double sign;
  double ub;
};

enum class RunResult { kOptimal, kUnbounded, kIterLimit };

class Tableau {
 public:
  Tableau(int rows, int cols) : t_(rows, cols, 0.0), beta_(rows, 0.0), basis_(rows, -1),
        pos_(cols, -1), ub_(cols, kInf), at_upper_(cols, 0), can_enter_(cols, 1),
        d_(cols, 0.0), alpha_(rows, 0.0) {}

  int rows() const { return static_cast<int>(t_.rows()); }
  int cols() const { return static_cast<int>(t_.cols()); }

  double& at(int r, int c) { return t_(r, c); }
  double& beta(int r) { return beta_[r]; }
  double& ub(int c) { return ub_[c]; }
  void block_entry(int c) { can_enter_[c] = 0; }
  bool is_basic(int c) const { return pos_[c] >= 0; }
  int basic_col(int r) const { return basis_[r]; }

  void set_basic(int r, int c) {
    basis_[r] = c;
    pos_[c] = r;
  }

  double value(int c) const {
    if (pos_[c] >= 0) return beta_[pos_[c]];
    return at_upper_[c] ? ub_[c] : 0.0;
  }

  // Reduced costs for the given column costs under the current basis.
  void price_out(const std::vector<double>& cost) {
    d_ = cost;
    for (int r = 0; r < rows(); ++r) {
      const double cb = cost[basis_[r]];
      if (cb != 0.0) kernels::axpy(-cb, t_.row(r), d_);
    }
    for (int r = 0; r < rows(); ++r) d_[basis_[r]] = 0.0;
  }

  RunResult run(std::int64_t max_iter, std::int64_t& iterations) {
    int degenerate = 0;
    bool bland = false;
    while (true) {
      if (iterations >= max_iter) return RunResult::kIterLimit;
      const int enter = choose_entering(bland);
      if (enter < 0) return RunResult::kOptimal;
      ++iterations;
      double moved = 0.0;
      if (!take_step(enter, bland, moved)) return RunResult::kUnbounded;
      if (moved <= 1e-12) {
        if (++degenerate > kDegenerateBeforeBland) bland = true;
      } else {
        degenerate = 0;
        bland = false;
      }
    }
  }

 private:
  int choose_entering(bool bland) const {
    int best = -1;
    double best_score = kDualTol;
    for (int j = 0; j < cols(); ++j) {
      if (pos_[j] >= 0 || !can_enter_[j] || ub_[j] <= 0.0) continue;
      const double dj = d_[j];
      double score;
      if (!at_upper_[j] && dj < -kDualTol) {
        score = -dj;
      } else if (at_upper_[j] && dj > kDualTol) {
        score = dj;
      } else {
        continue;
      }
      if (bland) return j;
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    return best;
  }

  // Moves the entering column as far as the bounds allow; false if unbounded.
  bool take_step(int enter, bool bland, double& moved) {
    const int m = rows();
    const double dir = at_upper_[enter] ? -1.0 : 1.0;
    for (int r = 0; r < m; ++r) alpha_[r] = t_(r, enter);

    // Harris pass 1: largest step keeping every basic within a relaxed bound.
    double theta_max = kInf;
    for (int r = 0; r < m; ++r) {
      const double a = -dir * alpha_[r];
      if (std::fabs(alpha_[r]) <= kPivotTol) continue;
      const double bub = ub_[basis_[r]];
      double lim;
      if (a < 0) {
        lim = (beta_[r] + kHarrisTol) / -a;
      } else if (std::isfinite(bub)) {
        lim = (bub - beta_[r] + kHarrisTol) / a;
      } else {
        continue;
      }
      theta_max = std::min(theta_max, lim);
    }
    const double flip = ub_[enter];
    if (!std::isfinite(theta_max) && !std::isfinite(flip)) return false;

    // Pass 2: among rows blocking within theta_max take the largest pivot.
    int leave_row = -1;
    double leave_ratio = kInf;
    double best_pivot = 0.0;
    for (int r = 0; r < m; ++r) {
      const double a = -dir * alpha_[r];
      if (std::fabs(alpha_[r]) <= kPivotTol) continue;
      const double bub = ub_[basis_[r]];
      double ratio;
      if (a < 0) {
        ratio = std::max(beta_[r], 0.0) / -a;
      } else if (std::isfinite(bub)) {
        ratio = std::max(bub - beta_[r], 0.0) / a;
      } else {
        continue;
      }
      if (bland) {
        const bool better = ratio < leave_ratio - 1e-12;
        const bool tie = leave_row >= 0 && std::fabs(ratio - leave_ratio) <= 1e-12 &&
                         basis_[r] < basis_[leave_row];
        if (better || tie) {
          leave_ratio = ratio;
          leave_row = r;
        }
      } else if (ratio <= theta_max && std::fabs(alpha_[r]) > best_pivot) {
        best_pivot = std::fabs(alpha_[r]);
        leave_row = r;
        leave_ratio = ratio;
      }
    }

    if (leave_row < 0 || flip <= leave_ratio) {
      // Bound flip of the entering column.
      if (!std::isfinite(flip)) return false;
      kernels::axpy(-dir * flip, alpha_, beta_);
      at_upper_[enter] = !at_upper_[enter];
      moved = flip;
      return true;
    }

    const double step = leave_ratio;
    moved = step;
    kernels::axpy(-dir * step, alpha_, beta_);
    const int leaving = basis_[leave_row];
    const double a_leave = -dir * alpha_[leave_row];
    at_upper_[leaving] = a_leave > 0 ? 1 : 0;
    pos_[leaving] = -1;
    beta_[leave_row] = at_upper_[enter] ? ub_[enter] - step : step;
    at_upper_[enter] = 0;
    pivot(leave_row, enter);
    return true;
  }

  void pivot(int r, int c) {
    auto prow = t_.row(r);
    kernels::scale(1.0 / prow[c], prow);
    prow[c] = 1.0;
    for (int i = 0; i < rows(); ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f == 0.0) continue;
      kernels::axpy(-f, prow, t_.row(i));
      t_(i, c) = 0.0;
    }
    const double fd = d_[c];
    if (fd != 0.0) kernels::axpy(-fd, prow, d_);
    d_[c] = 0.0;
    basis_[r] = c;
    pos_[c] = r;
  }

  Matrix t_;
  std::vector<double> beta_;
  std::vector<int> basis_;
  std::vector<int> pos_;
  std::vector<double> ub_;
  std::vector<char> at_upper_;
  std::vector<char> can_enter_;
  std::vector<double> d_;
  std::vector<double> alpha_;
};

MilpSolution make_status(Status status, std::int64_t iterations) {
  MilpSolution sol;
  sol.status = status;
  sol.lp_iterations = iterations;
  return sol;
}

}  // namespace

MilpSolution solve_lp(const MilpProblem& problem, const LpOptions& options) {
  std::vector<double> lb, ub;
  for (const VarSpec& v : problem.variables()) {
    lb.push_back(v.lower);
    ub.push_back(v.upper);
  }
  return solve_lp(problem, lb, ub, options);
}

MilpSolution solve_lp(const MilpProblem& problem, std::span<const double> lower,
                      std::span<const double> upper, const LpOptions& options) {
  const int nv = problem.num_variables();
  if (static_cast<int>(lower.size()) != nv || static_cast<int>(upper.size()) != nv) {
    throw MalformedProblem("bound vectors do not match the variable count");
  }
  problem.validate();
  std::vector<double> lb(lower.begin(), lower.end());
  std::vector<double> ub(upper.begin(), upper.end());
  for (int j = 0; j < nv; ++j) {
    if (lb[j] > ub[j] + kFeasTol) return make_status(Status::kInfeasible, 0);
    ub[j] = std::max(ub[j], lb[j]);
  }

  const auto& rows = problem.constraints();
  std::vector<char> row_active(rows.size(), 1);
  if (propagate_bounds(problem, lb, ub, row_active) == Presolve::kInfeasible) {
    return make_status(Status::kInfeasible, 0);
  }

  // Column transformation.
  std::vector<double> shift(nv, 0.0);
  std::vector<LpColumn> columns;
  std::vector<int> first_col(nv, -1);
  for (int j = 0; j < nv; ++j) {
    if (ub[j] - lb[j] <= 0.0) {
      shift[j] = lb[j];
      continue;
    }
    first_col[j] = static_cast<int>(columns.size());
    if (std::isfinite(lb[j])) {
      shift[j] = lb[j];
      columns.push_back({j, 1.0, ub[j] - lb[j]});
    } else if (std::isfinite(ub[j])) {
      shift[j] = ub[j];
      columns.push_back({j, -1.0, kInf});
    } else {
      columns.push_back({j, 1.0, kInf});
      columns.push_back({j, -1.0, kInf});
    }
  }

  std::vector<int> active_rows;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (row_active[r]) active_rows.push_back(static_cast<int>(r));
  }
  const int m = static_cast<int>(active_rows.size());
  const int ns = static_cast<int>(columns.size());

  // Row data in transformed space, normalised to a nonnegative rhs.
  std::vector<double> rhs(m);
  std::vector<double> row_sign(m, 1.0);
  std::vector<int> slack_col(m, -1);
  std::vector<double> slack_coef(m, 0.0);
  int next_col = ns;
  for (int k = 0; k < m; ++k) {
    const LinearConstraint& row = rows[active_rows[k]];
    double b = row.rhs;
    for (const Term& t : row.terms) b -= t.coef * shift[t.var.value];
    double scoef = 0.0;
    if (row.sense == Sense::kLessEqual) scoef = 1.0;
    if (row.sense == Sense::kGreaterEqual) scoef = -1.0;
    if (b < 0) {
      row_sign[k] = -1.0;
      b = -b;
      scoef = -scoef;
    }
    rhs[k] = b;
    slack_coef[k] = scoef;
    if (scoef != 0.0) slack_col[k] = next_col++;
  }
  std::vector<int> art_col(m, -1);
  for (int k = 0; k < m; ++k) {
    if (slack_coef[k] != 1.0) art_col[k] = next_col++;
  }
  const int ncols = next_col;

  Tableau tab(m, ncols);
  for (int k = 0; k < m; ++k) {
    const LinearConstraint& row = rows[active_rows[k]];
    for (const Term& t : row.terms) {
      const int c0 = first_col[t.var.value];
      if (c0 < 0) continue;
      tab.at(k, c0) += row_sign[k] * t.coef * columns[c0].sign;
      if (c0 + 1 < ns && columns[c0 + 1].var == t.var.value) {
        tab.at(k, c0 + 1) += row_sign[k] * t.coef * columns[c0 + 1].sign;
      }
    }
    if (slack_col[k] >= 0) tab.at(k, slack_col[k]) = slack_coef[k];
    if (art_col[k] >= 0) {
      tab.at(k, art_col[k]) = 1.0;
      tab.set_basic(k, art_col[k]);
    } else {
      tab.set_basic(k, slack_col[k]);
    }
    tab.beta(k) = rhs[k];
  }
  for (int c = 0; c < ns; ++c) tab.ub(c) = columns[c].ub;

  std::int64_t max_iter = options.max_iterations > 0
                              ? options.max_iterations
                              : 50 * static_cast<std::int64_t>(m + ncols) + 1000;
  std::int64_t iterations = 0;

  const bool has_artificials =
      std::any_of(art_col.begin(), art_col.end(), [](int c) { return c >= 0; });
  if (has_artificials) {
    std::vector<double> phase1(ncols, 0.0);
    for (int k = 0; k < m; ++k) {
      if (art_col[k] >= 0) phase1[art_col[k]] = 1.0;
    }
    tab.price_out(phase1);
    const RunResult res = tab.run(max_iter, iterations);
    if (res == RunResult::kIterLimit) return make_status(Status::kIterLimit, iterations);
    double infeas = 0.0;
    double scale = 1.0;
    for (int k = 0; k < m; ++k) {
      scale = std::max(scale, rhs[k]);
      if (art_col[k] >= 0) infeas += tab.value(art_col[k]);
    }
    if (infeas > 1e-7 * scale) return make_status(Status::kInfeasible, iterations);
    for (int k = 0; k < m; ++k) {
      if (art_col[k] < 0) continue;
      tab.block_entry(art_col[k]);
      tab.ub(art_col[k]) = 0.0;
    }
  }

  std::vector<double> cost(ncols, 0.0);
  const auto& obj = problem.objective();
  for (int c = 0; c < ns; ++c) cost[c] = obj[columns[c].var] * columns[c].sign;
  tab.price_out(cost);
  const RunResult res = tab.run(max_iter, iterations);
  if (res == RunResult::kIterLimit) return make_status(Status::kIterLimit, iterations);
  if (res == RunResult::kUnbounded) return make_status(Status::kUnbounded, iterations);

  MilpSolution sol;
  sol.status = Status::kOptimal;
  sol.lp_iterations = iterations;
  sol.values = shift;
  for (int c = 0; c < ns; ++c) {
    sol.values[columns[c].var] += columns[c].sign * tab.value(c);
  }
  // Clamp round-off outside the original bounds.
  for (int j = 0; j < nv; ++j) {
    sol.values[j] = std::clamp(sol.values[j], lb[j], ub[j]);
  }
  sol.objective_value = problem.objective_value(sol.values);
  sol.proven_bound = sol.objective_value;
  return sol;
}

}  // namespace odpd::milp
