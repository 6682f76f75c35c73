#include "hsara/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hsara {

namespace {

enum Purpose : std::uint64_t { kSchedule = 0, kCheck = 1, kEvaluate = 2 };

// Route-keyed stream id so a route's draws do not depend on processing order.
std::uint64_t route_stream(const std::vector<int>& customers, Purpose purpose) {
  std::uint64_t h = 1469598103934665603ull;
  for (int c : customers) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 1099511628211ull;
  }
  return (h << 2) | purpose;
}

// Everything random about one replica of a route, drawn up front.
struct ReplicaDraws {
  std::vector<char> cancelled;
  std::vector<double> travel_in;  // from the actual previous stop
  std::vector<double> service;
  double travel_home = 0.0;
  std::vector<std::pair<int, int>> arcs;
};

ReplicaDraws draw_replica(const std::vector<int>& customers, ReplicaSampler& s, bool discover) {
  const std::size_t m = customers.size();
  ReplicaDraws d;
  d.cancelled.resize(m);
  d.travel_in.assign(m, 0.0);
  d.service.assign(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) d.cancelled[k] = s.cancelled(customers[k]);
  int prev = 0;
  for (std::size_t k = 0; k < m; ++k) {
    const int c = customers[k];
    d.travel_in[k] = s.travel(prev, c);
    if (d.cancelled[k] && !discover) continue;  // hypothetical leg, never driven
    d.arcs.emplace_back(prev, c);
    if (!d.cancelled[k]) d.service[k] = s.service(c);
    prev = c;
  }
  d.travel_home = prev == 0 ? 0.0 : s.travel(prev, 0);
  if (prev != 0) d.arcs.emplace_back(prev, 0);
  return d;
}

bool drives_to(const ReplicaDraws& d, std::size_t k, bool discover) { return !d.cancelled[k] || discover; }

ReplicaTrace replay(const ReplicaDraws& d, std::span<const double> appointments, bool discover) {
  const std::size_t m = d.cancelled.size();
  ReplicaTrace t;
  t.arcs = d.arcs;
  t.served.assign(m, false);
  t.arrival.assign(m, 0.0);
  double clock = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    if (!drives_to(d, k, discover)) continue;
    const double arrive = clock + d.travel_in[k];
    if (d.cancelled[k]) {
      clock = arrive;
      continue;
    }
    t.served[k] = true;
    t.arrival[k] = arrive;
    const double start = appointments.empty() ? arrive : std::max(appointments[k], arrive);
    clock = start + d.service[k];
  }
  t.return_time = clock + d.travel_home;
  return t;
}

}  // namespace

void validate(const ScheduleConfig& config) {
  if (!(config.alpha >= 0.0 && config.alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0,1]");
  if (config.replicas < 1) throw std::invalid_argument("replicas must be >= 1");
  if (config.check_replicas < 0) throw std::invalid_argument("check_replicas must be >= 0");
}

double nearest_rank_percentile(std::span<const double> sorted, double alpha) {
  if (sorted.empty()) throw std::invalid_argument("percentile of an empty sample");
  const auto r = static_cast<long>(sorted.size());
  long rank = static_cast<long>(std::ceil(alpha * static_cast<double>(r) - 1e-12));
  rank = std::clamp(rank, 1L, r);
  return sorted[rank - 1];
}

ReplicaTrace simulate_replica(const CalibratedModel& model, const std::vector<int>& customers,
                              std::span<const double> appointments, std::uint64_t seed,
                              std::uint64_t replica, std::uint64_t stream, bool discover_on_arrival) {
  ReplicaSampler s(model, seed, replica, stream);
  return replay(draw_replica(customers, s, discover_on_arrival), appointments, discover_on_arrival);
}

RouteSchedule schedule_route(const Instance& instance, const CalibratedModel& model,
                             const Route& route, const ScheduleConfig& config) {
  validate(config);
  const auto& cust = route.customers;
  if (cust.empty()) throw std::invalid_argument("schedule_route: empty route");
  const std::size_t m = cust.size();
  const int R = config.replicas;
  const bool discover = config.discover_on_arrival;

  std::vector<ReplicaDraws> draws;
  draws.reserve(R);
  const std::uint64_t stream = route_stream(cust, kSchedule);
  for (int r = 0; r < R; ++r) {
    ReplicaSampler s(model, config.seed, static_cast<std::uint64_t>(r), stream);
    draws.push_back(draw_replica(cust, s, discover));
  }

  RouteSchedule out;
  out.customers = cust;
  out.appointments.resize(m);
  out.empirical.resize(m);
  std::vector<double> w(m, 0.0);
  std::vector<double> clock(R, 0.0);  // time the team leaves its current stop
  std::vector<double> arrival(R, 0.0);

  for (std::size_t k = 0; k < m; ++k) {
    std::vector<double> samples;
    samples.reserve(R);
    for (int r = 0; r < R; ++r) {
      arrival[r] = clock[r] + draws[r].travel_in[k];
      if (!draws[r].cancelled[k]) samples.push_back(arrival[r]);
    }
    Appointment& a = out.appointments[k];
    a.customer = cust[k];
    if (samples.empty()) {
      a.all_cancelled = true;
      for (int r = 0; r < R; ++r) samples.push_back(arrival[r]);
    }
    std::sort(samples.begin(), samples.end());
    w[k] = nearest_rank_percentile(samples, config.alpha);
    a.time = w[k];
    out.empirical[k] = std::move(samples);

    for (int r = 0; r < R; ++r) {
      const ReplicaDraws& d = draws[r];
      if (!d.cancelled[k])
        clock[r] = std::max(w[k], arrival[r]) + d.service[k];
      else if (discover)
        clock[r] = arrival[r];
    }
  }

  // On-time rates on fresh replicas.
  const int checks = config.check_replicas > 0 ? config.check_replicas : R;
  const std::uint64_t check_stream = route_stream(cust, kCheck);
  std::vector<long> on_time(m, 0), served(m, 0);
  for (int r = 0; r < checks; ++r) {
    const ReplicaTrace t = simulate_replica(model, cust, w, config.seed, static_cast<std::uint64_t>(r),
                                            check_stream, discover);
    for (std::size_t k = 0; k < m; ++k) {
      if (!t.served[k]) continue;
      ++served[k];
      if (t.arrival[k] <= w[k]) ++on_time[k];
    }
  }
  long total_on = 0, total_served = 0;
  for (std::size_t k = 0; k < m; ++k) {
    out.appointments[k].on_time_rate = served[k] ? static_cast<double>(on_time[k]) / served[k] : 0.0;
    total_on += on_time[k];
    total_served += served[k];
  }
  out.on_time_rate = total_served ? static_cast<double>(total_on) / total_served : 0.0;

  const std::size_t last = static_cast<std::size_t>(std::max_element(w.begin(), w.end()) - w.begin());
  const int lc = cust[last];
  out.scheduled_return = w[last] + instance.service_mean[lc] + instance.travel(lc, 0);
  return out;
}

std::vector<RouteSchedule> schedule_routes(const Instance& instance, const CalibratedModel& model,
                                           const std::vector<Route>& routes,
                                           const ScheduleConfig& config) {
  std::vector<RouteSchedule> out;
  out.reserve(routes.size());
  for (const Route& r : routes) out.push_back(schedule_route(instance, model, r, config));
  return out;
}

CostBreakdown evaluate_costs(const Instance& instance, const CalibratedModel& model,
                             const SarSolution& solution, const std::vector<RouteSchedule>& schedules,
                             int eval_replicas, std::uint64_t seed, bool discover_on_arrival) {
  if (eval_replicas < 1) throw std::invalid_argument("eval_replicas must be >= 1");
  if (schedules.size() != solution.routes.size())
    throw std::invalid_argument("evaluate_costs: one schedule per route required");
  const CostParams& k = instance.costs;
  CostBreakdown c;
  c.hiring = k.hiring * static_cast<double>(solution.routes.size());
  for (const Route& r : solution.routes) c.travel += k.travel * r.travel_time;

  for (std::size_t ri = 0; ri < schedules.size(); ++ri) {
    const RouteSchedule& sched = schedules[ri];
    if (sched.customers != solution.routes[ri].customers)
      throw std::invalid_argument("evaluate_costs: schedule does not match its route");
    std::vector<double> w;
    for (const Appointment& a : sched.appointments) w.push_back(a.time);
    const std::uint64_t stream = route_stream(sched.customers, kEvaluate);
    double overtime = 0.0, early = 0.0, late = 0.0;
    for (int e = 0; e < eval_replicas; ++e) {
      const ReplicaTrace t = simulate_replica(model, sched.customers, w, seed, static_cast<std::uint64_t>(e),
                                              stream, discover_on_arrival);
      overtime += std::max(0.0, t.return_time - instance.horizon);
      for (std::size_t p = 0; p < w.size(); ++p) {
        if (!t.served[p]) continue;
        early += std::max(w[p] - t.arrival[p], 0.0);
        late += std::max(t.arrival[p] - w[p], 0.0);
      }
    }
    const double inv = 1.0 / eval_replicas;
    c.overtime += k.overtime * overtime * inv;
    c.earliness += k.earliness * early * inv;
    c.delay += k.delay * late * inv;
  }
  c.total = c.hiring + c.travel + c.overtime + c.earliness + c.delay;
  return c;
}

}  // namespace hsara
