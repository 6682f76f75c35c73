#pragma once

#include <json.hpp>

#include "hsara/colgen.hpp"
#include "hsara/instance.hpp"
#include "hsara/scheduler.hpp"
#include "hsara/stochastics.hpp"

namespace hsara {

inline constexpr int kSchemaVersion = 1;

nlohmann::json instance_to_json(const Instance& instance);
// Throws InstanceError naming the missing or invalid field.
Instance instance_from_json(const nlohmann::json& doc);

nlohmann::json route_to_json(const Route& route);
nlohmann::json solution_to_json(const SarSolution& solution);
nlohmann::json cost_breakdown_to_json(const CostBreakdown& costs);
// `route_id` is the route's index in the solution.
nlohmann::json schedule_to_json(const RouteSchedule& schedule, int route_id,
                                const CostBreakdown* route_costs = nullptr);
nlohmann::json calibration_to_json(const CalibratedModel& model);

}  // namespace hsara
