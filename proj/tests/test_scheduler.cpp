#include <doctest.h>

#include <algorithm>

#include "hsara/scheduler.hpp"
#include "hsara/tour_split.hpp"

using namespace hsara;

namespace {

// Point-mass travel and service, no cancellations.
CalibratedModel deterministic_model(const Instance& inst) {
  CalibratedModel m = calibrate(inst);
  for (int i = 0; i <= inst.n; ++i)
    for (int j = 0; j <= inst.n; ++j) m.sigma(i, j) = 0.0;
  m.service_family = ServiceFamily::deterministic;
  std::fill(m.gamma.begin(), m.gamma.end(), 0.0);
  return m;
}

}  // namespace

TEST_CASE("nearest-rank percentile") {
  const std::vector<double> xs{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  CHECK(nearest_rank_percentile(xs, 0.5) == 5.0);
  CHECK(nearest_rank_percentile(xs, 0.0) == 1.0);
  CHECK(nearest_rank_percentile(xs, 1.0) == 10.0);
  CHECK(nearest_rank_percentile(xs, 0.91) == 10.0);
  CHECK(nearest_rank_percentile(xs, 0.3) == 3.0);
  CHECK_THROWS(nearest_rank_percentile(std::vector<double>{}, 0.5));
}

TEST_CASE("config validation") {
  ScheduleConfig c;
  c.alpha = 1.5;
  CHECK_THROWS(validate(c));
  c.alpha = 0.5;
  c.replicas = 0;
  CHECK_THROWS(validate(c));
}

TEST_CASE("deterministic arrivals are the appointments for every alpha") {
  const Instance inst = generate_instance(5, 9);
  const CalibratedModel model = deterministic_model(inst);
  const Route route = route_cost(inst, {2, 4, 1});
  std::vector<double> expected;
  double clock = 0.0;
  int prev = 0;
  for (int c : route.customers) {
    clock += inst.travel(prev, c);
    expected.push_back(clock);
    clock += inst.service_mean[c];
    prev = c;
  }
  for (double alpha : {0.05, 0.5, 0.95}) {
    ScheduleConfig cfg;
    cfg.alpha = alpha;
    cfg.replicas = 20;
    const RouteSchedule s = schedule_route(inst, model, route, cfg);
    for (std::size_t k = 0; k < expected.size(); ++k) {
      CHECK(s.appointments[k].time == doctest::Approx(expected[k]));
      CHECK(s.appointments[k].on_time_rate == 1.0);
    }
    CHECK(s.scheduled_return == doctest::Approx(clock + inst.travel(prev, 0)));
  }
}

TEST_CASE("a customer who always cancels is skipped") {
  Instance inst = generate_instance(3, 5);
  CalibratedModel model = calibrate(inst);
  model.gamma = {0.0, 0.0, 1.0, 0.0};
  const Route route = route_cost(inst, {1, 2, 3});
  for (std::uint64_t r = 0; r < 200; ++r) {
    const ReplicaTrace t = simulate_replica(model, route.customers, {}, 3, r);
    CHECK(t.arcs == std::vector<std::pair<int, int>>{{0, 1}, {1, 3}, {3, 0}});
    CHECK(t.served == std::vector<bool>{true, false, true});
  }
  ScheduleConfig cfg;
  cfg.replicas = 50;
  const RouteSchedule s = schedule_route(inst, model, route, cfg);
  REQUIRE(s.appointments.size() == 3);
  CHECK(s.appointments[1].all_cancelled);
  CHECK_FALSE(s.appointments[0].all_cancelled);
  CHECK_FALSE(s.appointments[2].all_cancelled);

  // Discovering on arrival means driving there first.
  const ReplicaTrace seen = simulate_replica(model, route.customers, {}, 3, 0, 0, true);
  CHECK(seen.arcs == std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {2, 3}, {3, 0}});
}

TEST_CASE("appointments grow with alpha") {
  const Instance inst = generate_instance(6, 12);
  const CalibratedModel model = calibrate(inst);
  const Route route = route_cost(inst, {6, 2, 5, 3});
  std::vector<double> prev(4, -1.0);
  for (double alpha : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    ScheduleConfig cfg;
    cfg.alpha = alpha;
    cfg.replicas = 300;
    cfg.seed = 4;
    const RouteSchedule s = schedule_route(inst, model, route, cfg);
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(s.appointments[k].time >= prev[k]);
      prev[k] = s.appointments[k].time;
      CHECK(std::is_sorted(s.empirical[k].begin(), s.empirical[k].end()));
    }
  }
}

TEST_CASE("high alpha keeps most arrivals on time") {
  const Instance inst = generate_instance(6, 12);
  CalibratedModel model = calibrate(inst);
  std::fill(model.gamma.begin(), model.gamma.end(), 0.0);
  ScheduleConfig cfg;
  cfg.alpha = 0.95;
  cfg.replicas = 1000;
  const RouteSchedule s = schedule_route(inst, model, route_cost(inst, {1, 2, 3}), cfg);
  CHECK(s.on_time_rate >= 0.9);
}

TEST_CASE("zero-variance costs are exact") {
  Instance inst = generate_instance(4, 2);
  inst.horizon = 100.0;
  const CalibratedModel model = deterministic_model(inst);
  SarSolution sol;
  sol.routes = {route_cost(inst, {1, 2, 3, 4})};
  ScheduleConfig cfg;
  cfg.replicas = 10;
  const auto schedules = schedule_routes(inst, model, sol.routes, cfg);
  const CostBreakdown c = evaluate_costs(inst, model, sol, schedules, 25, 1);
  CHECK(c.hiring == 100.0);
  CHECK(c.travel == doctest::Approx(sol.routes[0].travel_time));
  CHECK(c.overtime == doctest::Approx(2.0 * sol.routes[0].overtime));
  CHECK(c.earliness == doctest::Approx(0.0));
  CHECK(c.delay == doctest::Approx(0.0));
  CHECK(c.total == doctest::Approx(c.hiring + c.travel + c.overtime));
}

TEST_CASE("low alpha trades earliness for delay") {
  const Instance inst = generate_instance(8, 21);
  const CalibratedModel model = calibrate(inst);
  SarSolution sol;
  sol.routes = {route_cost(inst, {1, 2, 3, 4}), route_cost(inst, {5, 6, 7, 8})};
  std::vector<CostBreakdown> costs;
  for (double alpha : {0.05, 0.5, 0.95}) {
    ScheduleConfig cfg;
    cfg.alpha = alpha;
    cfg.replicas = 500;
    cfg.seed = 8;
    costs.push_back(evaluate_costs(inst, model, sol, schedule_routes(inst, model, sol.routes, cfg), 1000, 8));
  }
  CHECK(costs[0].earliness < costs[1].earliness);
  CHECK(costs[1].earliness < costs[2].earliness);
  CHECK(costs[0].delay > costs[1].delay);
  CHECK(costs[1].delay > costs[2].delay);
  CHECK(costs[0].earliness < 0.1 * costs[0].delay);
}

TEST_CASE("schedules and routes must line up") {
  const Instance inst = generate_instance(4, 2);
  const CalibratedModel model = calibrate(inst);
  SarSolution sol;
  sol.routes = {route_cost(inst, {1, 2}), route_cost(inst, {3, 4})};
  const auto one = schedule_routes(inst, model, {sol.routes[0]}, {});
  CHECK_THROWS(evaluate_costs(inst, model, sol, one, 10, 1));
  CHECK_THROWS(evaluate_costs(inst, model, sol, schedule_routes(inst, model, sol.routes, {}), 0, 1));
}

TEST_CASE("scheduling is reproducible") {
  const Instance inst = generate_instance(5, 3);
  const CalibratedModel model = calibrate(inst);
  const Route route = route_cost(inst, {5, 1, 4});
  ScheduleConfig cfg;
  cfg.seed = 99;
  const RouteSchedule a = schedule_route(inst, model, route, cfg);
  const RouteSchedule b = schedule_route(inst, model, route, cfg);
  for (std::size_t k = 0; k < 3; ++k) CHECK(a.appointments[k].time == b.appointments[k].time);
}
