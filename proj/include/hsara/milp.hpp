#pragma once

#include <atomic>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace hsara::milp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Tolerances shared by the LP and IP solvers.
inline constexpr double kFeasibilityTol = 1e-7;
inline constexpr double kIntegralityTol = 1e-6;
inline constexpr double kReducedCostTol = 1e-9;

enum class RowSense { less_equal, greater_equal, equal };

struct Row {
  std::vector<std::pair<int, double>> coeffs;  // (variable, coefficient)
  RowSense sense = RowSense::less_equal;
  double rhs = 0.0;
};

// Minimization LP with finite lower bounds on every variable.
struct LinearProgram {
  std::vector<double> objective;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<Row> rows;

  int add_variable(double cost, double lo = 0.0, double hi = kInfinity);
  int add_row(std::vector<std::pair<int, double>> coeffs, RowSense sense, double rhs);
  int variable_count() const { return static_cast<int>(objective.size()); }
  int row_count() const { return static_cast<int>(rows.size()); }
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> x;
  double objective = 0.0;
  // Row duals y with reduced costs d = c - A^T y. y >= 0 on binding >= rows,
  // y <= 0 on binding <= rows.
  std::vector<double> duals;
  std::vector<double> reduced_costs;
  long iterations = 0;
};

struct LpOptions {
  long iteration_limit = 200000;
};

// Bounded-variable two-phase primal simplex on a dense tableau. Dantzig
// pricing with smallest-index tie breaks; falls back to Bland's rule after a
// run of degenerate pivots.
LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options = {});

enum class IpStatus { optimal, infeasible, node_limit, cancelled, unbounded };

struct IpSolution {
  IpStatus status = IpStatus::infeasible;
  bool proven = false;  // true when the search tree was exhausted
  bool has_solution = false;
  std::vector<double> x;
  double objective = kInfinity;
  long nodes = 0;
  std::vector<double> incumbent_history;  // objective of every improving incumbent
};

struct IpOptions {
  long node_limit = 500000;
  // A known feasible point; only improving solutions replace it.
  std::optional<std::vector<double>> incumbent;
  // Lets the caller abort from another thread; returns the best incumbent.
  const std::atomic<bool>* cancel = nullptr;
  // Prune a node whose LP bound cannot improve the incumbent by more than this.
  double improvement_tol = 1e-9;
  // Only solutions strictly below this value are wanted; nodes whose bound
  // reaches it are pruned. With no such solution the result is `infeasible`.
  std::optional<double> cutoff;
};

// Depth-first LP-based branch-and-bound, branching on the most fractional
// integer variable.
IpSolution solve_ip(const LinearProgram& lp, std::span<const int> integer_vars,
                    const IpOptions& options = {});

double row_activity(const Row& row, std::span<const double> x);
// Largest bound or row violation of x.
double max_violation(const LinearProgram& lp, std::span<const double> x);

}  // namespace hsara::milp
