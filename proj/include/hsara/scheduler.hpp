#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "hsara/colgen.hpp"
#include "hsara/instance.hpp"
#include "hsara/stochastics.hpp"
#include "hsara/tour_split.hpp"

namespace hsara {

struct ScheduleConfig {
  double alpha = 0.5;        // desired on-time arrival probability
  int replicas = 100;        // scheduling replicas R
  std::uint64_t seed = 0;
  int check_replicas = 0;    // fresh replicas for on_time_rate; 0 means R
  // Off: a cancellation is known before leaving for the customer. On: the
  // team drives there and finds out on arrival.
  bool discover_on_arrival = false;
};

void validate(const ScheduleConfig& config);

struct Appointment {
  int customer = 0;
  double time = 0.0;          // w_i, minutes from shift start
  double on_time_rate = 0.0;  // fresh replicas, served ones only
  bool all_cancelled = false; // no replica served it; time from travel-only propagation
};

struct RouteSchedule {
  std::vector<int> customers;
  std::vector<Appointment> appointments;         // route order
  std::vector<std::vector<double>> empirical;    // sorted arrival samples per appointment
  double on_time_rate = 0.0;                     // pooled over served visits
  // Latest appointment + its mean service + expected travel home.
  double scheduled_return = 0.0;
};

// Nearest-rank percentile: element ceil(alpha * R) (1-based, clamped to [1, R]).
double nearest_rank_percentile(std::span<const double> sorted, double alpha);

RouteSchedule schedule_route(const Instance& instance, const CalibratedModel& model,
                             const Route& route, const ScheduleConfig& config);

std::vector<RouteSchedule> schedule_routes(const Instance& instance, const CalibratedModel& model,
                                           const std::vector<Route>& routes,
                                           const ScheduleConfig& config);

// One simulated day of a route.
struct ReplicaTrace {
  std::vector<std::pair<int, int>> arcs;  // arcs actually driven
  std::vector<bool> served;               // per route position
  std::vector<double> arrival;            // per route position, valid when served
  double return_time = 0.0;
};

// Appointments may be empty (no waiting). `stream` separates independent uses
// of the same seed.
ReplicaTrace simulate_replica(const CalibratedModel& model, const std::vector<int>& customers,
                              std::span<const double> appointments, std::uint64_t seed,
                              std::uint64_t replica, std::uint64_t stream = 0,
                              bool discover_on_arrival = false);

struct CostBreakdown {
  double hiring = 0.0;
  double travel = 0.0;
  double overtime = 0.0;
  double earliness = 0.0;
  double delay = 0.0;
  double total = 0.0;
};

CostBreakdown evaluate_costs(const Instance& instance, const CalibratedModel& model,
                             const SarSolution& solution, const std::vector<RouteSchedule>& schedules,
                             int eval_replicas, std::uint64_t seed,
                             bool discover_on_arrival = false);

}  // namespace hsara
