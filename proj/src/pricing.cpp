#include "hsara/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hsara/milp.hpp"
#include "hsara/tsp_tour.hpp"

namespace hsara {

ReducedCostGraph reduced_cost_graph(const Instance& instance, std::span<const double> duals) {
  const int nodes = instance.node_count();
  if (static_cast<int>(duals.size()) != nodes)
    throw PricingError("dual vector must have n+1 entries (indexed by node)");
  ReducedCostGraph g;
  g.weight = Matrix(nodes);
  g.duration = Matrix(nodes);
  g.duals.assign(duals.begin(), duals.end());
  g.duals[0] = 0.0;
  const CostParams& k = instance.costs;
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j) {
      if (i == j) continue;
      if (i == 0) {
        g.weight(i, j) = k.hiring + k.travel * instance.travel(i, j);
        g.duration(i, j) = instance.travel(i, j);
      } else {
        g.weight(i, j) = k.travel * instance.travel(i, j) - g.duals[i];
        g.duration(i, j) = instance.travel(i, j) + instance.service_mean[i];
      }
    }
  return g;
}

double path_reduced_cost(const Instance& instance, const ReducedCostGraph& graph,
                         const std::vector<int>& customers) {
  double weight = 0.0;
  double duration = 0.0;
  int prev = 0;
  for (int c : customers) {
    weight += graph.weight(prev, c);
    duration += graph.duration(prev, c);
    prev = c;
  }
  weight += graph.weight(prev, 0);
  duration += graph.duration(prev, 0);
  return weight + instance.costs.overtime * std::max(0.0, duration - instance.horizon);
}

namespace {

// IP model of the pricing problem. Node n+1 is the return depot.
class PricingModel {
 public:
  PricingModel(const Instance& instance, const ReducedCostGraph& graph)
      : n_(instance.n), end_(instance.n + 1) {
    out_arcs_.resize(n_ + 2);
    in_arcs_.resize(n_ + 2);
    auto add_arc = [&](int i, int j, int phys_j) {
      const int v = lp_.add_variable(graph.weight(i, phys_j), 0.0, 1.0);
      arcs_.push_back({i, j});
      out_arcs_[i].push_back(v);
      in_arcs_[j].push_back(v);
      durations_.push_back(graph.duration(i, phys_j));
    };
    for (int j = 1; j <= n_; ++j) add_arc(0, j, j);
    for (int i = 1; i <= n_; ++i) {
      for (int j = 1; j <= n_; ++j)
        if (i != j) add_arc(i, j, j);
      add_arc(i, end_, 0);
    }
    binaries_.resize(arcs_.size());
    for (std::size_t v = 0; v < arcs_.size(); ++v) binaries_[v] = static_cast<int>(v);
    overtime_var_ = lp_.add_variable(instance.costs.overtime, 0.0, milp::kInfinity);

    // Flow balance; the return-depot row is implied by the others.
    lp_.add_row(coeffs(out_arcs_[0], 1.0), milp::RowSense::equal, 1.0);
    for (int i = 1; i <= n_; ++i) {
      auto row = coeffs(out_arcs_[i], 1.0);
      for (int v : in_arcs_[i]) row.emplace_back(v, -1.0);
      lp_.add_row(std::move(row), milp::RowSense::equal, 0.0);
    }
    for (int i = 1; i <= n_; ++i)
      lp_.add_row(coeffs(out_arcs_[i], 1.0), milp::RowSense::less_equal, 1.0);
    std::vector<std::pair<int, double>> time_row;
    for (std::size_t v = 0; v < arcs_.size(); ++v)
      time_row.emplace_back(static_cast<int>(v), durations_[v]);
    time_row.emplace_back(overtime_var_, -1.0);
    lp_.add_row(std::move(time_row), milp::RowSense::less_equal, instance.horizon);
  }

  milp::IpSolution solve(const ExactPricingOptions& options) const {
    milp::IpOptions ip;
    ip.node_limit = options.node_limit;
    ip.cancel = options.cancel;
    ip.cutoff = kNegativeReducedCost;
    return milp::solve_ip(lp_, binaries_, ip);
  }

  // Successor of every node in the integer solution, -1 if none.
  std::vector<int> successors(const std::vector<double>& x) const {
    std::vector<int> next(n_ + 2, -1);
    for (std::size_t v = 0; v < arcs_.size(); ++v)
      if (x[v] > 0.5) next[arcs_[v].first] = arcs_[v].second;
    return next;
  }

  // Customers on the path leaving the depot.
  std::vector<int> depot_path(const std::vector<int>& next) const {
    std::vector<int> path;
    for (int v = next[0]; v != end_ && v > 0 && static_cast<int>(path.size()) <= n_; v = next[v])
      path.push_back(v);
    return path;
  }

  // Cycles in the support that do not touch the depot path.
  std::vector<std::vector<int>> subtours(const std::vector<int>& next,
                                         const std::vector<int>& path) const {
    std::vector<bool> done(n_ + 2, false);
    for (int c : path) done[c] = true;
    std::vector<std::vector<int>> cycles;
    for (int start = 1; start <= n_; ++start) {
      if (done[start] || next[start] < 0) continue;
      std::vector<int> cycle;
      for (int v = start; v >= 1 && v <= n_ && !done[v]; v = next[v]) {
        done[v] = true;
        cycle.push_back(v);
      }
      std::sort(cycle.begin(), cycle.end());
      cycles.push_back(std::move(cycle));
    }
    return cycles;
  }

  void add_cutset(const std::vector<int>& subtour, int anchor) {
    std::vector<bool> in_set(n_ + 2, false);
    for (int c : subtour) in_set[c] = true;
    std::vector<double> coef(arcs_.size(), 0.0);
    for (std::size_t v = 0; v < arcs_.size(); ++v) {
      const auto [i, j] = arcs_[v];
      if (in_set[i] && in_set[j]) coef[v] += 1.0;
      if (in_set[i] && i != anchor) coef[v] -= 1.0;
    }
    std::vector<std::pair<int, double>> row;
    for (std::size_t v = 0; v < coef.size(); ++v)
      if (coef[v] != 0.0) row.emplace_back(static_cast<int>(v), coef[v]);
    lp_.add_row(std::move(row), milp::RowSense::less_equal, 0.0);
  }

 private:
  static std::vector<std::pair<int, double>> coeffs(const std::vector<int>& vars, double a) {
    std::vector<std::pair<int, double>> out;
    out.reserve(vars.size());
    for (int v : vars) out.emplace_back(v, a);
    return out;
  }

  int n_;
  int end_;
  milp::LinearProgram lp_;
  std::vector<std::pair<int, int>> arcs_;
  std::vector<double> durations_;
  std::vector<std::vector<int>> out_arcs_, in_arcs_;
  std::vector<int> binaries_;
  int overtime_var_ = -1;
};

PricedPath priced(const Instance& instance, const ReducedCostGraph& graph,
                  std::vector<int> customers) {
  PricedPath p;
  p.reduced_cost = path_reduced_cost(instance, graph, customers);
  p.route = route_cost(instance, std::move(customers));
  return p;
}

}  // namespace

std::optional<PricedPath> exact_price(const Instance& instance, std::span<const double> duals,
                                      const ExactPricingOptions& options,
                                      ExactPricingStats* stats) {
  const ReducedCostGraph graph = reduced_cost_graph(instance, duals);
  PricingModel model(instance, graph);
  ExactPricingStats local;
  ExactPricingStats& st = stats ? *stats : local;
  for (const CutsetCut& c : options.cuts) model.add_cutset(c.subtour, c.anchor);

  for (int round = 0; round < options.max_cut_rounds; ++round) {
    st.cut_rounds = round + 1;
    const milp::IpSolution sol = model.solve(options);
    st.bb_nodes += sol.nodes;
    if (sol.status == milp::IpStatus::cancelled) throw PricingError("exact pricing cancelled");
    // Nothing below the cutoff: even paths with subtours cannot go negative.
    if (sol.status == milp::IpStatus::infeasible) return std::nullopt;
    if (!sol.has_solution || !sol.proven) {
      std::ostringstream msg;
      msg << "exact pricing IP not solved to optimality (round " << round + 1 << ", "
          << sol.nodes << " nodes)";
      throw PricingError(msg.str());
    }
    const auto next = model.successors(sol.x);
    auto path = model.depot_path(next);
    const auto cycles = model.subtours(next, path);
    if (cycles.empty()) {
      PricedPath p = priced(instance, graph, std::move(path));
      if (p.reduced_cost < kNegativeReducedCost) return p;
      return std::nullopt;
    }
    if (options.early_exit && !path.empty()) {
      PricedPath p = priced(instance, graph, path);
      if (p.reduced_cost < kNegativeReducedCost) return p;
    }
    for (const auto& cycle : cycles)
      for (int u : cycle) {
        model.add_cutset(cycle, u);
        st.cuts.push_back({cycle, u});
      }
  }
  std::ostringstream msg;
  msg << "exact pricing hit the cut-round cap of " << options.max_cut_rounds << " ("
      << st.cuts.size() << " cutset rows, " << st.bb_nodes << " B&B nodes)";
  throw PricingError(msg.str());
}

RouteEnumeration enumerate_routes(const Instance& instance, std::span<const double> duals,
                                  double threshold, long route_limit, long node_limit) {
  const ReducedCostGraph graph = reduced_cost_graph(instance, duals);
  const CostParams& k = instance.costs;
  const int n = instance.n;
  double prize_left = 0.0;  // positive duals not yet on the path
  for (int i = 1; i <= n; ++i) prize_left += std::max(0.0, graph.duals[i]);

  RouteEnumeration out;
  out.complete = true;
  std::vector<int> path;
  std::vector<bool> used(n + 1, false);
  // weight: arc weights so far; duration: open-path minutes so far.
  auto grow = [&](auto&& self, int last, double weight, double duration) -> void {
    for (int c = 1; c <= n && out.complete; ++c) {
      if (used[c]) continue;
      if (++out.nodes > node_limit) {
        out.complete = false;
        return;
      }
      const double w = weight + graph.weight(last, c);
      const double d = duration + graph.duration(last, c);
      const double pi = std::max(0.0, graph.duals[c]);
      // Whatever follows adds nonnegative travel and duration and collects at
      // most the prizes still available, c's own included.
      const double bound = w + k.overtime * std::max(0.0, d - instance.horizon) - prize_left;
      if (bound >= threshold) continue;
      used[c] = true;
      path.push_back(c);
      prize_left -= pi;
      const double closed = w + graph.weight(c, 0);
      const double rc = closed + k.overtime * std::max(0.0, d + graph.duration(c, 0) - instance.horizon);
      if (rc < threshold) {
        if (static_cast<long>(out.routes.size()) >= route_limit) {
          out.complete = false;
        } else {
          out.routes.push_back(priced(instance, graph, path));
        }
      }
      self(self, c, w, d);
      prize_left += pi;
      path.pop_back();
      used[c] = false;
    }
  };
  grow(grow, 0, 0.0, 0.0);
  return out;
}

std::vector<PricedPath> heuristic_price(const Instance& instance, std::span<const double> duals) {
  const ReducedCostGraph graph = reduced_cost_graph(instance, duals);
  std::vector<int> candidates;
  for (int i = 1; i <= instance.n; ++i)
    if (graph.duals[i] > 1e-9) candidates.push_back(i);
  if (candidates.empty()) return {};

  // Local id 0 is the depot, id k is candidates[k-1]. Prim needs an
  // undirected weight, so average the two arc directions.
  auto node = [&](int local) { return local == 0 ? 0 : candidates[local - 1]; };
  const int count = static_cast<int>(candidates.size()) + 1;
  const SpanningTree tree = prim_mst(count, [&](int a, int b) {
    const int i = node(a);
    const int j = node(b);
    return 0.5 * (graph.weight(i, j) + graph.weight(j, i));
  });
  std::vector<int> sequence;
  for (int local : preorder(tree))
    if (local != 0) sequence.push_back(node(local));

  const TripGraph trips = build_trip_graph(instance, sequence, graph.duals);
  const ShortestPath path = dag_shortest_path(trips);
  std::vector<PricedPath> out;
  for (Route& r : routes_from_path(instance, trips, path)) {
    const double rc = path_reduced_cost(instance, graph, r.customers);
    if (rc < kNegativeReducedCost) out.push_back({std::move(r), rc});
  }
  return out;
}

}  // namespace hsara
