#pragma once

#include <atomic>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "hsara/instance.hpp"
#include "hsara/tour_split.hpp"

namespace hsara {

// A route is "promising" when its reduced cost is below this.
inline constexpr double kNegativeReducedCost = -1e-6;

// Arc weights of the pricing problem over nodes 0..n. Column 0 doubles as the
// return depot, so weight(i, 0) is the arc from customer i back home.
struct ReducedCostGraph {
  Matrix weight;                // r_0j = c_f + c_t t_0j, r_ij = c_t t_ij - pi_i
  Matrix duration;              // t~_0j = t_0j, t~_ij = t_ij + s_i
  std::vector<double> duals;    // indexed by node, duals[0] == 0
};

// `duals` is indexed by node (size n+1); entry 0 is ignored.
ReducedCostGraph reduced_cost_graph(const Instance& instance, std::span<const double> duals);

// Sum of arc weights plus c_o times the overtime of the path.
double path_reduced_cost(const Instance& instance, const ReducedCostGraph& graph,
                         const std::vector<int>& customers);

struct PricedPath {
  Route route;
  double reduced_cost = 0.0;
};

class PricingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One generalized cutset row: arcs inside `subtour` <= out-degree of subtour \ {anchor}.
struct CutsetCut {
  std::vector<int> subtour;
  int anchor = 0;
};

struct ExactPricingOptions {
  int max_cut_rounds = 200;
  // Stop as soon as an intermediate IP solution carries a promising depot path.
  bool early_exit = true;
  long node_limit = 2000000;
  const std::atomic<bool>* cancel = nullptr;
  // Rows added before the first solve. Cutset rows do not depend on the
  // duals, so a pool carried across pricing calls stays valid.
  std::vector<CutsetCut> cuts;
};

struct ExactPricingStats {
  int cut_rounds = 0;
  long bb_nodes = 0;
  std::vector<CutsetCut> cuts;  // rows separated by this call only
};

// Elementary shortest path by integer programming with lazily added cutset rows.
// Returns nothing when no path has reduced cost below kNegativeReducedCost.
std::optional<PricedPath> exact_price(const Instance& instance, std::span<const double> duals,
                                      const ExactPricingOptions& options = {},
                                      ExactPricingStats* stats = nullptr);

struct RouteEnumeration {
  std::vector<PricedPath> routes;
  bool complete = false;  // false when a limit stopped the search
  long nodes = 0;
};

// Every elementary route with reduced cost strictly below `threshold`, by
// depth-first search over depot paths. Stops early once more than
// `route_limit` routes qualify or `node_limit` partial paths were visited.
RouteEnumeration enumerate_routes(const Instance& instance, std::span<const double> duals,
                                  double threshold, long route_limit, long node_limit);

// Giant tour over the depot and customers with positive dual, split on
// reduced-cost arc weights; returns every promising route of the split.
std::vector<PricedPath> heuristic_price(const Instance& instance, std::span<const double> duals);

}  // namespace hsara
