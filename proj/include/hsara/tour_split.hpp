#pragma once

#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hsara/instance.hpp"
#include "hsara/tsp_tour.hpp"

namespace hsara {

// A depot-to-depot route and its expected SAR cost.
struct Route {
  std::vector<int> customers;
  double cost = 0.0;         // hiring + c_t * travel_time + c_o * overtime
  double travel_time = 0.0;  // expected minutes on the road, depot arcs included
  double duration = 0.0;     // travel_time plus expected service
  double overtime = 0.0;     // max(0, duration - L)

  bool covers(int customer) const;
  // Directed arcs (i, j) in visiting order; the closing arc ends at node 0.
  std::vector<std::pair<int, int>> arcs() const;
  bool operator==(const Route&) const = default;
};

class RouteError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Throws RouteError on empty, out-of-range or repeated customers.
Route route_cost(const Instance& instance, std::vector<int> customers);

// Split DAG over tour positions 0..m. Arc (i, j), i < j, stands for the route
// serving positions i+1..j of `sequence`.
struct TripGraph {
  struct Arc {
    int from;
    int to;
    double weight;
  };
  std::vector<int> sequence;  // customers in tour order
  std::vector<Arc> arcs;      // sorted by (from, to)
  int node_count() const { return static_cast<int>(sequence.size()) + 1; }
};

// Arc weight = route cost minus the prizes of the customers served.
// `prizes` is indexed by node id; empty means no prizes.
TripGraph build_trip_graph(const Instance& instance, const std::vector<int>& sequence,
                           std::span<const double> prizes = {});

struct ShortestPath {
  std::vector<int> nodes;  // 0 = first node, back() = last node
  double length = 0.0;
};

// Single forward pass in topological order.
ShortestPath dag_shortest_path(const TripGraph& graph);
// Plain Bellman-Ford over the same arcs; used to cross-check the DAG pass.
ShortestPath bellman_ford(const TripGraph& graph);

// Routes on the shortest path of the trip graph.
std::vector<Route> routes_from_path(const Instance& instance, const TripGraph& graph,
                                    const ShortestPath& path);

// Optimal contiguous partition of the giant tour into routes.
std::vector<Route> split(const Instance& instance, const GiantTour& tour);

}  // namespace hsara
