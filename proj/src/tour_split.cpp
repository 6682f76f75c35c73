#include "hsara/tour_split.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace hsara {

bool Route::covers(int customer) const {
  return std::find(customers.begin(), customers.end(), customer) != customers.end();
}

std::vector<std::pair<int, int>> Route::arcs() const {
  std::vector<std::pair<int, int>> out;
  int prev = 0;
  for (int c : customers) {
    out.emplace_back(prev, c);
    prev = c;
  }
  out.emplace_back(prev, 0);
  return out;
}

Route route_cost(const Instance& instance, std::vector<int> customers) {
  if (customers.empty()) throw RouteError("route must visit at least one customer");
  std::vector<bool> seen(instance.n + 1, false);
  for (int c : customers) {
    if (c < 1 || c > instance.n) throw RouteError("customer " + std::to_string(c) + " out of range");
    if (seen[c]) throw RouteError("customer " + std::to_string(c) + " repeated in route");
    seen[c] = true;
  }
  Route r;
  int prev = 0;
  double service = 0.0;
  for (int c : customers) {
    r.travel_time += instance.travel(prev, c);
    service += instance.service_mean[c];
    prev = c;
  }
  r.travel_time += instance.travel(prev, 0);
  r.duration = r.travel_time + service;
  r.overtime = std::max(0.0, r.duration - instance.horizon);
  const CostParams& k = instance.costs;
  r.cost = k.hiring + k.travel * r.travel_time + k.overtime * r.overtime;
  r.customers = std::move(customers);
  return r;
}

TripGraph build_trip_graph(const Instance& instance, const std::vector<int>& sequence,
                           std::span<const double> prizes) {
  TripGraph g;
  g.sequence = sequence;
  const int m = static_cast<int>(sequence.size());
  const CostParams& k = instance.costs;
  g.arcs.reserve(static_cast<std::size_t>(m) * (m + 1) / 2);
  for (int i = 0; i < m; ++i) {
    double open_travel = 0.0;  // depot -> seq[i] -> ... -> seq[j-1], not closed
    double service = 0.0;
    double prize = 0.0;
    int prev = 0;
    for (int j = i + 1; j <= m; ++j) {
      const int c = sequence[j - 1];
      open_travel += instance.travel(prev, c);
      service += instance.service_mean[c];
      if (!prizes.empty()) prize += prizes[c];
      prev = c;
      const double travel = open_travel + instance.travel(c, 0);
      const double overtime = std::max(0.0, travel + service - instance.horizon);
      const double cost = k.hiring + k.travel * travel + k.overtime * overtime;
      g.arcs.push_back({i, j, cost - prize});
    }
  }
  return g;
}

namespace {

ShortestPath trace(const std::vector<double>& dist, const std::vector<int>& pred) {
  ShortestPath p;
  const int last = static_cast<int>(dist.size()) - 1;
  p.length = dist[last];
  for (int v = last; v >= 0; v = pred[v]) p.nodes.push_back(v);
  std::reverse(p.nodes.begin(), p.nodes.end());
  return p;
}

}  // namespace

ShortestPath dag_shortest_path(const TripGraph& graph) {
  const int nodes = graph.node_count();
  std::vector<double> dist(nodes, std::numeric_limits<double>::infinity());
  std::vector<int> pred(nodes, -1);
  dist[0] = 0.0;
  // Arcs are sorted by tail, and every tail precedes its head.
  for (const auto& a : graph.arcs) {
    const double cand = dist[a.from] + a.weight;
    if (cand < dist[a.to]) {
      dist[a.to] = cand;
      pred[a.to] = a.from;
    }
  }
  return trace(dist, pred);
}

ShortestPath bellman_ford(const TripGraph& graph) {
  const int nodes = graph.node_count();
  std::vector<double> dist(nodes, std::numeric_limits<double>::infinity());
  std::vector<int> pred(nodes, -1);
  dist[0] = 0.0;
  // Relax in reverse arc order so the DAG ordering gives no head start.
  for (int round = 0; round < nodes - 1; ++round) {
    bool changed = false;
    for (auto it = graph.arcs.rbegin(); it != graph.arcs.rend(); ++it) {
      if (dist[it->from] == std::numeric_limits<double>::infinity()) continue;
      const double cand = dist[it->from] + it->weight;
      if (cand < dist[it->to]) {
        dist[it->to] = cand;
        pred[it->to] = it->from;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return trace(dist, pred);
}

std::vector<Route> routes_from_path(const Instance& instance, const TripGraph& graph,
                                    const ShortestPath& path) {
  std::vector<Route> routes;
  for (std::size_t k = 0; k + 1 < path.nodes.size(); ++k) {
    std::vector<int> seg(graph.sequence.begin() + path.nodes[k],
                         graph.sequence.begin() + path.nodes[k + 1]);
    routes.push_back(route_cost(instance, std::move(seg)));
  }
  return routes;
}

std::vector<Route> split(const Instance& instance, const GiantTour& tour) {
  std::vector<int> sequence;
  for (int v : tour.order)
    if (v != 0) sequence.push_back(v);
  const TripGraph graph = build_trip_graph(instance, sequence);
  return routes_from_path(instance, graph, dag_shortest_path(graph));
}

}  // namespace hsara
