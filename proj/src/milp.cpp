#include "hsara/milp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hsara::milp {

int LinearProgram::add_variable(double cost, double lo, double hi) {
  objective.push_back(cost);
  lower.push_back(lo);
  upper.push_back(hi);
  return variable_count() - 1;
}

int LinearProgram::add_row(std::vector<std::pair<int, double>> coeffs, RowSense sense, double rhs) {
  rows.push_back({std::move(coeffs), sense, rhs});
  return row_count() - 1;
}

double row_activity(const Row& row, std::span<const double> x) {
  double s = 0.0;
  for (auto [j, a] : row.coeffs) s += a * x[j];
  return s;
}

double max_violation(const LinearProgram& lp, std::span<const double> x) {
  double worst = 0.0;
  for (int j = 0; j < lp.variable_count(); ++j) {
    worst = std::max(worst, lp.lower[j] - x[j]);
    worst = std::max(worst, x[j] - lp.upper[j]);
  }
  for (const Row& row : lp.rows) {
    const double act = row_activity(row, x);
    switch (row.sense) {
      case RowSense::less_equal: worst = std::max(worst, act - row.rhs); break;
      case RowSense::greater_equal: worst = std::max(worst, row.rhs - act); break;
      case RowSense::equal: worst = std::max(worst, std::abs(act - row.rhs)); break;
    }
  }
  return worst;
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr int kDegenerateRunBeforeBland = 50;

// Dense bounded-variable simplex tableau. Columns: structurals, then one
// slack per inequality row, then artificials. T holds B^-1 A.
class Simplex {
 public:
  explicit Simplex(const LinearProgram& lp) : lp_(lp) {}

  LpSolution run(const LpOptions& options) {
    LpSolution out;
    const int n = lp_.variable_count();
    for (int j = 0; j < n; ++j) {
      if (!std::isfinite(lp_.lower[j]))
        throw std::invalid_argument("solve_lp: every variable needs a finite lower bound");
      if (lp_.lower[j] > lp_.upper[j] + kFeasibilityTol) {
        out.status = LpStatus::infeasible;
        return out;
      }
    }
    build();
    iteration_limit_ = options.iteration_limit;

    if (!artificials_.empty()) {
      std::vector<double> phase1(cols_, 0.0);
      for (int a : artificials_) phase1[a] = 1.0;
      const LpStatus s = optimize(phase1);
      if (s == LpStatus::iteration_limit) return finish(out, s);
      double infeas = 0.0;
      for (int a : artificials_) infeas += x_[a];
      if (infeas > kFeasibilityTol * (1.0 + rhs_scale_)) {
        out.status = LpStatus::infeasible;
        out.iterations = iterations_;
        return out;
      }
      for (int a : artificials_) {
        hi_[a] = 0.0;
        if (position_[a] < 0) x_[a] = 0.0;
      }
    }
    return finish(out, optimize(cost_));
  }

 private:
  double& t(int i, int j) { return tab_[static_cast<std::size_t>(i) * cols_ + j]; }
  double t(int i, int j) const { return tab_[static_cast<std::size_t>(i) * cols_ + j]; }

  void build() {
    const int n = lp_.variable_count();
    m_ = lp_.row_count();
    // Column layout.
    std::vector<int> slack_of(m_, -1);
    int next = n;
    for (int i = 0; i < m_; ++i)
      if (lp_.rows[i].sense != RowSense::equal) slack_of[i] = next++;

    // Starting point: structurals at their lower bounds.
    std::vector<double> start(lp_.lower.begin(), lp_.lower.end());
    std::vector<double> residual(m_);
    rhs_scale_ = 0.0;
    for (int i = 0; i < m_; ++i) {
      residual[i] = lp_.rows[i].rhs - row_activity(lp_.rows[i], start);
      rhs_scale_ = std::max(rhs_scale_, std::abs(lp_.rows[i].rhs));
    }

    // Decide which column is basic in each row.
    identity_col_.assign(m_, -1);
    identity_sign_.assign(m_, 1.0);
    std::vector<int> art_of(m_, -1);
    for (int i = 0; i < m_; ++i) {
      const RowSense s = lp_.rows[i].sense;
      if (s == RowSense::less_equal && residual[i] >= 0.0) {
        identity_col_[i] = slack_of[i];
        identity_sign_[i] = 1.0;
      } else if (s == RowSense::greater_equal && residual[i] <= 0.0) {
        identity_col_[i] = slack_of[i];
        identity_sign_[i] = -1.0;
      } else {
        art_of[i] = next++;
        identity_col_[i] = art_of[i];
        identity_sign_[i] = residual[i] >= 0.0 ? 1.0 : -1.0;
        artificials_.push_back(art_of[i]);
      }
    }
    cols_ = next;

    lo_.assign(cols_, 0.0);
    hi_.assign(cols_, kInfinity);
    cost_.assign(cols_, 0.0);
    x_.assign(cols_, 0.0);
    for (int j = 0; j < n; ++j) {
      lo_[j] = lp_.lower[j];
      hi_[j] = lp_.upper[j];
      cost_[j] = lp_.objective[j];
      x_[j] = lp_.lower[j];
    }

    tab_.assign(static_cast<std::size_t>(m_) * cols_, 0.0);
    basis_.assign(m_, -1);
    position_.assign(cols_, -1);
    for (int i = 0; i < m_; ++i) {
      const double sign = identity_sign_[i];
      for (auto [j, a] : lp_.rows[i].coeffs) t(i, j) += a / sign;
      if (slack_of[i] >= 0) {
        const double slack_coef = lp_.rows[i].sense == RowSense::less_equal ? 1.0 : -1.0;
        t(i, slack_of[i]) = slack_coef / sign;
      }
      if (art_of[i] >= 0) t(i, art_of[i]) = 1.0;
      basis_[i] = identity_col_[i];
      position_[identity_col_[i]] = i;
      x_[identity_col_[i]] = residual[i] / sign;
    }
  }

  LpStatus optimize(const std::vector<double>& cost) {
    active_cost_ = &cost;
    d_.assign(cols_, 0.0);
    for (int j = 0; j < cols_; ++j) {
      double z = 0.0;
      for (int i = 0; i < m_; ++i) z += cost[basis_[i]] * t(i, j);
      d_[j] = cost[j] - z;
    }
    int degenerate_run = 0;
    while (true) {
      if (iterations_ >= iteration_limit_) return LpStatus::iteration_limit;
      const bool bland = degenerate_run >= kDegenerateRunBeforeBland;
      const int q = choose_entering(bland);
      if (q < 0) return LpStatus::optimal;
      ++iterations_;

      const double dir = at_upper(q) ? -1.0 : 1.0;
      double theta = hi_[q] - lo_[q];
      int leave_row = -1;
      double leave_alpha = 0.0;
      for (int i = 0; i < m_; ++i) {
        const double alpha = t(i, q) * dir;
        const int b = basis_[i];
        double limit;
        if (alpha > kPivotTol) {
          limit = (x_[b] - lo_[b]) / alpha;
        } else if (alpha < -kPivotTol && std::isfinite(hi_[b])) {
          limit = (hi_[b] - x_[b]) / -alpha;
        } else {
          continue;
        }
        limit = std::max(limit, 0.0);
        bool take;
        if (leave_row < 0)
          take = limit < theta;
        else if (limit < theta - 1e-12)
          take = true;
        else if (limit <= theta + 1e-12)
          take = bland ? b < basis_[leave_row] : std::abs(alpha) > std::abs(leave_alpha);
        else
          take = false;
        if (take) {
          theta = std::min(theta, limit);
          leave_row = i;
          leave_alpha = alpha;
        }
      }
      if (leave_row < 0 && !std::isfinite(theta)) return LpStatus::unbounded;

      degenerate_run = theta <= 1e-12 ? degenerate_run + 1 : 0;

      x_[q] += dir * theta;
      for (int i = 0; i < m_; ++i) x_[basis_[i]] -= theta * dir * t(i, q);

      if (leave_row < 0) {
        // Bound flip, basis unchanged.
        x_[q] = dir > 0 ? hi_[q] : lo_[q];
        continue;
      }
      const int leaving = basis_[leave_row];
      x_[leaving] = leave_alpha > 0 ? lo_[leaving] : hi_[leaving];
      pivot(leave_row, q);
    }
  }

  bool at_upper(int j) const { return std::isfinite(hi_[j]) && x_[j] >= hi_[j]; }

  int choose_entering(bool bland) const {
    int best = -1;
    double best_score = 0.0;
    for (int j = 0; j < cols_; ++j) {
      if (position_[j] >= 0) continue;
      if (hi_[j] - lo_[j] <= 0.0) continue;  // fixed
      double score = 0.0;
      if (at_upper(j)) {
        if (d_[j] > kReducedCostTol) score = d_[j];
      } else if (d_[j] < -kReducedCostTol) {
        score = -d_[j];
      }
      if (score <= 0.0) continue;
      if (bland) return j;
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    return best;
  }

  void pivot(int r, int q) {
    const double p = t(r, q);
    double* prow = &tab_[static_cast<std::size_t>(r) * cols_];
    for (int j = 0; j < cols_; ++j) prow[j] /= p;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double f = t(i, q);
      if (f == 0.0) continue;
      double* row = &tab_[static_cast<std::size_t>(i) * cols_];
      for (int j = 0; j < cols_; ++j) row[j] -= f * prow[j];
      row[q] = 0.0;
    }
    const double f = d_[q];
    if (f != 0.0) {
      for (int j = 0; j < cols_; ++j) d_[j] -= f * prow[j];
      d_[q] = 0.0;
    }
    position_[basis_[r]] = -1;
    basis_[r] = q;
    position_[q] = r;
  }

  LpSolution& finish(LpSolution& out, LpStatus status) {
    out.status = status;
    out.iterations = iterations_;
    if (status != LpStatus::optimal) return out;
    const int n = lp_.variable_count();
    out.x.assign(x_.begin(), x_.begin() + n);
    for (int j = 0; j < n; ++j) {
      // Snap values within tolerance of a bound.
      if (std::abs(out.x[j] - lp_.lower[j]) < 1e-11) out.x[j] = lp_.lower[j];
      if (std::isfinite(lp_.upper[j]) && std::abs(out.x[j] - lp_.upper[j]) < 1e-11)
        out.x[j] = lp_.upper[j];
    }
    out.objective = 0.0;
    for (int j = 0; j < n; ++j) out.objective += lp_.objective[j] * out.x[j];
    out.duals.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      const int col = identity_col_[i];
      out.duals[i] = ((*active_cost_)[col] - d_[col]) / identity_sign_[i];
    }
    out.reduced_costs.assign(d_.begin(), d_.begin() + n);
    return out;
  }

  const LinearProgram& lp_;
  int m_ = 0;
  int cols_ = 0;
  std::vector<double> tab_;
  std::vector<int> basis_;
  std::vector<int> position_;  // row of a basic column, -1 when nonbasic
  std::vector<double> lo_, hi_, cost_, x_, d_;
  std::vector<int> identity_col_;
  std::vector<double> identity_sign_;
  std::vector<int> artificials_;
  const std::vector<double>* active_cost_ = nullptr;
  double rhs_scale_ = 0.0;
  long iterations_ = 0;
  long iteration_limit_ = 0;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options) {
  for (const Row& row : lp.rows)
    for (auto [j, a] : row.coeffs) {
      if (j < 0 || j >= lp.variable_count())
        throw std::invalid_argument("solve_lp: row references unknown variable");
      if (!std::isfinite(a)) throw std::invalid_argument("solve_lp: non-finite coefficient");
    }
  if (lp.lower.size() != lp.objective.size() || lp.upper.size() != lp.objective.size())
    throw std::invalid_argument("solve_lp: bound vectors must match the objective");
  Simplex simplex(lp);
  return simplex.run(options);
}

namespace {

struct BranchNode {
  std::vector<double> lower;
  std::vector<double> upper;
};

}  // namespace

IpSolution solve_ip(const LinearProgram& lp, std::span<const int> integer_vars,
                    const IpOptions& options) {
  IpSolution best;
  if (options.incumbent) {
    const auto& x = *options.incumbent;
    if (static_cast<int>(x.size()) == lp.variable_count() &&
        max_violation(lp, x) <= kFeasibilityTol) {
      best.has_solution = true;
      best.x = x;
      best.objective = 0.0;
      for (int j = 0; j < lp.variable_count(); ++j) best.objective += lp.objective[j] * x[j];
      best.incumbent_history.push_back(best.objective);
    }
  }

  LinearProgram node_lp = lp;
  std::vector<BranchNode> stack;
  stack.push_back({lp.lower, lp.upper});
  bool exhausted = true;
  bool unbounded = false;

  while (!stack.empty()) {
    if (options.cancel && options.cancel->load(std::memory_order_relaxed)) {
      best.status = IpStatus::cancelled;
      best.proven = false;
      return best;
    }
    if (best.nodes >= options.node_limit) {
      exhausted = false;
      break;
    }
    BranchNode node = std::move(stack.back());
    stack.pop_back();
    ++best.nodes;

    node_lp.lower = node.lower;
    node_lp.upper = node.upper;
    const LpSolution rel = solve_lp(node_lp);
    if (rel.status == LpStatus::infeasible) continue;
    if (rel.status == LpStatus::unbounded) {
      unbounded = true;
      continue;
    }
    if (rel.status != LpStatus::optimal) {
      exhausted = false;
      continue;
    }
    if (best.has_solution && rel.objective >= best.objective - options.improvement_tol) continue;
    if (options.cutoff && rel.objective >= *options.cutoff) continue;

    int branch_var = -1;
    double best_frac = 0.0;
    for (int j : integer_vars) {
      const double v = rel.x[j];
      const double frac = v - std::floor(v);
      const double dist = std::min(frac, 1.0 - frac);
      if (dist > kIntegralityTol && dist > best_frac + 1e-12) {
        best_frac = dist;
        branch_var = j;
      }
    }
    if (branch_var < 0) {
      best.has_solution = true;
      best.x = rel.x;
      for (int j : integer_vars) best.x[j] = std::round(best.x[j]);
      best.objective = rel.objective;
      best.incumbent_history.push_back(best.objective);
      continue;
    }

    const double v = rel.x[branch_var];
    BranchNode down = node;
    BranchNode up = std::move(node);
    down.upper[branch_var] = std::floor(v);
    up.lower[branch_var] = std::ceil(v);
    // Explore the rounding direction first.
    if (v - std::floor(v) >= 0.5) {
      stack.push_back(std::move(down));
      stack.push_back(std::move(up));
    } else {
      stack.push_back(std::move(up));
      stack.push_back(std::move(down));
    }
  }

  if (unbounded && !best.has_solution) {
    best.status = IpStatus::unbounded;
    return best;
  }
  best.proven = exhausted;
  if (!exhausted)
    best.status = IpStatus::node_limit;
  else
    best.status = best.has_solution ? IpStatus::optimal : IpStatus::infeasible;
  return best;
}

}  // namespace hsara::milp
