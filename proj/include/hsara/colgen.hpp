#pragma once

#include <atomic>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "hsara/instance.hpp"
#include "hsara/pricing.hpp"
#include "hsara/tour_split.hpp"

namespace hsara {

// IS: initial split solution only. HM: split-based pricing. EM: exact pricing.
enum class Method { is, hm, em };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

struct ColGenConfig {
  Method method = Method::hm;
  double t_max = std::numeric_limits<double>::infinity();  // seconds
  bool pool = true;  // HM adds every promising route of a split, not just the best
  ExactPricingOptions exact;
  long ip_node_limit = 2000000;
  // EM only. Once pricing has converged, add every route whose reduced cost
  // is below the gap between the covering IP and the LP bound, then re-solve
  // the IP. When the enumeration finishes, no better covering exists.
  bool close_gap = true;
  long gap_route_limit = 20000;
  long gap_node_limit = 20000000;
  const std::atomic<bool>* cancel = nullptr;
};

struct SarSolution {
  std::vector<Route> routes;
  double objective = 0.0;
  std::optional<double> lower_bound;  // final EM LP value when pricing ran to completion
  std::optional<double> gap_percent;
  Method method = Method::is;
  double wall_time_s = 0.0;
  double cpu_time_s = 0.0;
  int iterations = 0;
  int columns = 0;
  bool converged = false;           // pricing found no promising route
  bool ip_proven = true;            // final covering IP solved to optimality
  bool gap_closed = false;          // EM: objective is optimal over all routes
  std::vector<double> lp_history;   // RMP value at every iteration
};

// Set covering LP over a growing column set.
class RestrictedMaster {
 public:
  explicit RestrictedMaster(const Instance& instance) : instance_(&instance) {}

  // False if an identical customer sequence is already present.
  bool add_column(Route route);
  const std::vector<Route>& columns() const { return columns_; }

  struct LpResult {
    double value = 0.0;
    std::vector<double> duals;  // indexed by node, duals[0] == 0
    std::vector<double> y;
  };
  LpResult solve_lp() const;

  struct IpResult {
    std::vector<int> selected;  // column indices
    double value = 0.0;
    bool proven = false;
  };
  // `incumbent` lists columns of a known cover.
  IpResult solve_ip(const std::vector<int>& incumbent, long node_limit,
                    const std::atomic<bool>* cancel = nullptr) const;

 private:
  const Instance* instance_;
  std::vector<Route> columns_;
  std::set<std::vector<int>> keys_;
};

class ColGenError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Giant tour by MST walk, then split: a feasible cover of all customers.
std::vector<Route> initial_columns(const Instance& instance);

SarSolution run_colgen(const Instance& instance, const ColGenConfig& config);

// Drops customers covered more than once from every route but the one where
// removing them saves least, then re-costs. Empty routes are dropped.
std::vector<Route> remove_over_coverage(const Instance& instance, std::vector<Route> routes);

// Exhaustive optimum over all partitions into ordered routes (n <= 8).
SarSolution sar_oracle(const Instance& instance);

// 100 (z - z_ref) / z_ref.
double gap(double z, double z_ref);

double total_cost(const std::vector<Route>& routes);

}  // namespace hsara
