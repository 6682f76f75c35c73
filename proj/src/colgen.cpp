#include "hsara/colgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hsara/milp.hpp"
#include "hsara/timer.hpp"
#include "hsara/tsp_tour.hpp"

namespace hsara {

std::string to_string(Method m) {
  switch (m) {
    case Method::is: return "is";
    case Method::hm: return "hm";
    case Method::em: return "em";
  }
  return "?";
}

Method method_from_string(const std::string& s) {
  std::string lower = s;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "is") return Method::is;
  if (lower == "hm") return Method::hm;
  if (lower == "em") return Method::em;
  throw std::invalid_argument("unknown method '" + s + "' (expected is, hm or em)");
}

double total_cost(const std::vector<Route>& routes) {
  double z = 0.0;
  for (const Route& r : routes) z += r.cost;
  return z;
}

double gap(double z, double z_ref) {
  if (!(z_ref > 0.0)) throw std::invalid_argument("gap: reference objective must be positive");
  return 100.0 * (z - z_ref) / z_ref;
}

bool RestrictedMaster::add_column(Route route) {
  if (!keys_.insert(route.customers).second) return false;
  columns_.push_back(std::move(route));
  return true;
}

namespace {

milp::LinearProgram covering_lp(const Instance& instance, const std::vector<Route>& columns,
                                double upper) {
  milp::LinearProgram lp;
  std::vector<std::vector<std::pair<int, double>>> rows(instance.n + 1);
  for (std::size_t r = 0; r < columns.size(); ++r) {
    const int v = lp.add_variable(columns[r].cost, 0.0, upper);
    for (int c : columns[r].customers) rows[c].emplace_back(v, 1.0);
  }
  for (int i = 1; i <= instance.n; ++i)
    lp.add_row(std::move(rows[i]), milp::RowSense::greater_equal, 1.0);
  return lp;
}

}  // namespace

RestrictedMaster::LpResult RestrictedMaster::solve_lp() const {
  const milp::LinearProgram lp = covering_lp(*instance_, columns_, milp::kInfinity);
  const milp::LpSolution sol = milp::solve_lp(lp);
  if (sol.status != milp::LpStatus::optimal)
    throw ColGenError("restricted master LP not optimal (columns do not cover every customer?)");
  LpResult out;
  out.value = sol.objective;
  out.y = sol.x;
  out.duals.assign(instance_->n + 1, 0.0);
  for (int i = 1; i <= instance_->n; ++i) out.duals[i] = std::max(0.0, sol.duals[i - 1]);
  return out;
}

RestrictedMaster::IpResult RestrictedMaster::solve_ip(const std::vector<int>& incumbent,
                                                      long node_limit,
                                                      const std::atomic<bool>* cancel) const {
  // y <= 1 loses nothing: duplicating a column never helps a covering.
  const milp::LinearProgram lp = covering_lp(*instance_, columns_, 1.0);
  std::vector<int> ints(columns_.size());
  std::iota(ints.begin(), ints.end(), 0);
  milp::IpOptions opts;
  opts.node_limit = node_limit;
  opts.cancel = cancel;
  if (!incumbent.empty()) {
    std::vector<double> x(columns_.size(), 0.0);
    for (int r : incumbent) x[r] = 1.0;
    opts.incumbent = std::move(x);
  }
  const milp::IpSolution sol = milp::solve_ip(lp, ints, opts);
  if (!sol.has_solution) throw ColGenError("set covering IP found no integer solution");
  IpResult out;
  out.proven = sol.proven;
  for (std::size_t r = 0; r < columns_.size(); ++r)
    if (sol.x[r] > 0.5) out.selected.push_back(static_cast<int>(r));
  for (int r : out.selected) out.value += columns_[r].cost;
  return out;
}

std::vector<Route> initial_columns(const Instance& instance) {
  return split(instance, approx_tsp_tour(instance));
}

std::vector<Route> remove_over_coverage(const Instance& instance, std::vector<Route> routes) {
  for (int c = 1; c <= instance.n; ++c) {
    std::vector<std::size_t> holders;
    for (std::size_t r = 0; r < routes.size(); ++r)
      if (routes[r].covers(c)) holders.push_back(r);
    if (holders.size() <= 1) continue;

    auto without = [&](const Route& r) {
      std::vector<int> seq;
      for (int v : r.customers)
        if (v != c) seq.push_back(v);
      return seq;
    };
    auto saving = [&](const Route& r) {
      const auto seq = without(r);
      return r.cost - (seq.empty() ? 0.0 : route_cost(instance, seq).cost);
    };
    std::size_t keep = holders.front();
    double keep_saving = saving(routes[keep]);
    for (std::size_t h : holders) {
      const double s = saving(routes[h]);
      if (s < keep_saving) {
        keep = h;
        keep_saving = s;
      }
    }
    for (std::size_t h : holders) {
      if (h == keep) continue;
      auto seq = without(routes[h]);
      if (seq.empty())
        routes[h].customers.clear();
      else
        routes[h] = route_cost(instance, std::move(seq));
    }
    std::erase_if(routes, [](const Route& r) { return r.customers.empty(); });
  }
  return routes;
}

SarSolution run_colgen(const Instance& instance, const ColGenConfig& config) {
  if (config.t_max < 0.0) throw std::invalid_argument("t_max must be >= 0");
  const Stopwatch clock;
  SarSolution sol;
  sol.method = config.method;

  RestrictedMaster master(instance);
  std::vector<int> initial_ids;
  for (Route& r : initial_columns(instance)) {
    if (master.add_column(std::move(r))) initial_ids.push_back(static_cast<int>(master.columns().size()) - 1);
  }

  if (config.method == Method::is || config.t_max == 0.0) {
    sol.routes = master.columns();
    sol.objective = total_cost(sol.routes);
    sol.columns = static_cast<int>(master.columns().size());
    sol.wall_time_s = clock.wall_seconds();
    sol.cpu_time_s = clock.cpu_seconds();
    return sol;
  }

  auto cancelled = [&] { return config.cancel && config.cancel->load(std::memory_order_relaxed); };
  ExactPricingOptions exact = config.exact;
  if (!exact.cancel) exact.cancel = config.cancel;

  double last_lp = 0.0;
  while (clock.wall_seconds() <= config.t_max && !cancelled()) {
    const RestrictedMaster::LpResult lp = master.solve_lp();
    last_lp = lp.value;
    sol.lp_history.push_back(lp.value);
    ++sol.iterations;

    std::vector<PricedPath> found;
    if (config.method == Method::em) {
      ExactPricingStats stats;
      auto p = exact_price(instance, lp.duals, exact, &stats);
      exact.cuts.insert(exact.cuts.end(), stats.cuts.begin(), stats.cuts.end());
      if (p) found.push_back(std::move(*p));
    } else {
      found = heuristic_price(instance, lp.duals);
      if (!config.pool && found.size() > 1) {
        auto best = std::min_element(found.begin(), found.end(), [](const auto& a, const auto& b) {
          return a.reduced_cost < b.reduced_cost;
        });
        found = {std::move(*best)};
      }
    }
    bool added = false;
    for (PricedPath& p : found) added |= master.add_column(std::move(p.route));
    if (!added) {
      sol.converged = true;
      break;
    }
  }

  if (config.method == Method::em && sol.converged) sol.lower_bound = last_lp;

  RestrictedMaster::IpResult ip = master.solve_ip(initial_ids, config.ip_node_limit, config.cancel);
  sol.ip_proven = ip.proven;

  // Any covering x obeys cost(x) >= LB + sum of the reduced costs it uses, so
  // a route in a covering cheaper than the incumbent has reduced cost below
  // the gap.
  if (config.method == Method::em && sol.converged && config.close_gap && ip.proven && !cancelled()) {
    const double slack = 1e-6 * (instance.n + 1);
    const double threshold = ip.value - last_lp + slack;
    const auto duals = master.solve_lp().duals;
    const RouteEnumeration found =
        enumerate_routes(instance, duals, threshold, config.gap_route_limit, config.gap_node_limit);
    if (found.complete) {
      const std::vector<int> incumbent = ip.selected;
      for (const PricedPath& p : found.routes) master.add_column(p.route);
      ip = master.solve_ip(incumbent, config.ip_node_limit, config.cancel);
      sol.ip_proven = ip.proven;
      sol.gap_closed = ip.proven;
    }
  }
  std::vector<Route> chosen;
  for (int r : ip.selected) chosen.push_back(master.columns()[r]);
  sol.routes = remove_over_coverage(instance, std::move(chosen));
  sol.objective = total_cost(sol.routes);
  sol.columns = static_cast<int>(master.columns().size());
  if (sol.lower_bound && *sol.lower_bound > 0.0) sol.gap_percent = gap(sol.objective, *sol.lower_bound);
  sol.wall_time_s = clock.wall_seconds();
  sol.cpu_time_s = clock.cpu_seconds();
  return sol;
}

SarSolution sar_oracle(const Instance& instance) {
  const int n = instance.n;
  if (n > 8) throw std::invalid_argument("sar_oracle: exhaustive search limited to n <= 8");
  const Stopwatch clock;
  const int full = (1 << n) - 1;

  // Cheapest ordering of every customer subset.
  std::vector<double> best_route(full + 1, std::numeric_limits<double>::infinity());
  std::vector<std::vector<int>> best_order(full + 1);
  for (int mask = 1; mask <= full; ++mask) {
    std::vector<int> members;
    for (int i = 0; i < n; ++i)
      if (mask & (1 << i)) members.push_back(i + 1);
    do {
      const double c = route_cost(instance, members).cost;
      if (c < best_route[mask]) {
        best_route[mask] = c;
        best_order[mask] = members;
      }
    } while (std::next_permutation(members.begin(), members.end()));
  }

  // Partition DP; the block holding the lowest customer is chosen first.
  std::vector<double> best(full + 1, std::numeric_limits<double>::infinity());
  std::vector<int> choice(full + 1, 0);
  best[0] = 0.0;
  for (int mask = 1; mask <= full; ++mask) {
    const int low = mask & -mask;
    for (int sub = mask; sub > 0; sub = (sub - 1) & mask) {
      if (!(sub & low)) continue;
      const double c = best_route[sub] + best[mask ^ sub];
      if (c < best[mask]) {
        best[mask] = c;
        choice[mask] = sub;
      }
    }
  }

  SarSolution sol;
  sol.method = Method::em;
  for (int mask = full; mask > 0; mask ^= choice[mask])
    sol.routes.push_back(route_cost(instance, best_order[choice[mask]]));
  sol.objective = total_cost(sol.routes);
  sol.lower_bound = sol.objective;
  sol.gap_percent = 0.0;
  sol.converged = true;
  sol.wall_time_s = clock.wall_seconds();
  sol.cpu_time_s = clock.cpu_seconds();
  return sol;
}

}  // namespace hsara
