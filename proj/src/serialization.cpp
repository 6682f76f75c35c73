#include "hsara/serialization.hpp"

#include <cmath>

namespace hsara {

using nlohmann::json;

namespace {

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.size(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

const json& field(const json& doc, const char* name, const char* where) {
  if (!doc.is_object()) throw InstanceError(std::string(where) + " must be a JSON object");
  auto it = doc.find(name);
  if (it == doc.end()) throw InstanceError(std::string("missing field '") + name + "' in " + where);
  return *it;
}

double number(const json& v, const std::string& what) {
  if (!v.is_number()) throw InstanceError(what + " must be a number");
  return v.get<double>();
}

std::vector<double> number_list(const json& v, const std::string& what) {
  if (!v.is_array()) throw InstanceError(what + " must be an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], what + "[" + std::to_string(i) + "]"));
  return out;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json instance_to_json(const Instance& inst) {
  json coords = json::array();
  for (const Point& p : inst.coords) coords.push_back({p.x, p.y});
  return {
      {"schema_version", kSchemaVersion},
      {"n", inst.n},
      {"coords", coords},
      {"travel_mean", matrix_to_json(inst.travel_mean)},
      {"service_mean", std::vector<double>(inst.service_mean.begin() + 1, inst.service_mean.end())},
      {"cancel_prob", std::vector<double>(inst.cancel_prob.begin() + 1, inst.cancel_prob.end())},
      {"L", inst.horizon},
      {"costs",
       {{"cf", inst.costs.hiring},
        {"ct", inst.costs.travel},
        {"co", inst.costs.overtime},
        {"ce", inst.costs.earliness},
        {"cd", inst.costs.delay}}},
  };
}

Instance instance_from_json(const json& doc) {
  constexpr const char* where = "instance";
  Instance inst;
  const json& n = field(doc, "n", where);
  if (!n.is_number_integer()) throw InstanceError("n must be an integer");
  inst.n = n.get<int>();
  if (inst.n < 1) throw InstanceError("n must be >= 1");

  const json& costs = field(doc, "costs", where);
  inst.costs.hiring = number(field(costs, "cf", "costs block"), "costs.cf");
  inst.costs.travel = number(field(costs, "ct", "costs block"), "costs.ct");
  inst.costs.overtime = number(field(costs, "co", "costs block"), "costs.co");
  inst.costs.earliness = number(field(costs, "ce", "costs block"), "costs.ce");
  inst.costs.delay = number(field(costs, "cd", "costs block"), "costs.cd");
  inst.horizon = number(field(doc, "L", where), "L");

  const auto service = number_list(field(doc, "service_mean", where), "service_mean");
  const auto cancel = number_list(field(doc, "cancel_prob", where), "cancel_prob");
  if (static_cast<int>(service.size()) != inst.n) throw InstanceError("service_mean must have n entries");
  if (static_cast<int>(cancel.size()) != inst.n) throw InstanceError("cancel_prob must have n entries");
  inst.service_mean = {0.0};
  inst.service_mean.insert(inst.service_mean.end(), service.begin(), service.end());
  inst.cancel_prob = {0.0};
  inst.cancel_prob.insert(inst.cancel_prob.end(), cancel.begin(), cancel.end());

  if (auto it = doc.find("coords"); it != doc.end() && !it->is_null()) {
    if (!it->is_array()) throw InstanceError("coords must be an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto xy = number_list((*it)[i], "coords[" + std::to_string(i) + "]");
      if (xy.size() != 2) throw InstanceError("coords entries must be [x, y]");
      inst.coords.push_back({xy[0], xy[1]});
    }
  }

  const json& travel = field(doc, "travel_mean", where);
  if (!travel.is_array() || static_cast<int>(travel.size()) != inst.n + 1)
    throw InstanceError("travel_mean must be an (n+1)x(n+1) array");
  inst.travel_mean = Matrix(inst.n + 1);
  for (int i = 0; i <= inst.n; ++i) {
    const auto row = number_list(travel[i], "travel_mean[" + std::to_string(i) + "]");
    if (static_cast<int>(row.size()) != inst.n + 1) throw InstanceError("travel_mean must be an (n+1)x(n+1) array");
    for (int j = 0; j <= inst.n; ++j) inst.travel_mean(i, j) = row[j];
  }
  validate(inst);
  return inst;
}

json route_to_json(const Route& r) {
  return {{"customers", r.customers},
          {"cost", r.cost},
          {"travel_time", r.travel_time},
          {"overtime", r.overtime},
          {"duration", r.duration}};
}

json solution_to_json(const SarSolution& s) {
  json routes = json::array();
  for (const Route& r : s.routes) routes.push_back(route_to_json(r));
  return {{"schema_version", kSchemaVersion},
          {"routes", routes},
          {"objective", s.objective},
          {"lower_bound", optional_number(s.lower_bound)},
          {"gap_percent", optional_number(s.gap_percent)},
          {"method", to_string(s.method)},
          {"wall_time_s", s.wall_time_s},
          {"cpu_time_s", s.cpu_time_s},
          {"iterations", s.iterations},
          {"columns", s.columns},
          {"converged", s.converged},
          {"ip_proven", s.ip_proven},
          {"gap_closed", s.gap_closed}};
}

json cost_breakdown_to_json(const CostBreakdown& c) {
  return {{"hiring", c.hiring},   {"travel", c.travel}, {"overtime", c.overtime},
          {"earliness", c.earliness}, {"delay", c.delay}, {"total", c.total}};
}

json schedule_to_json(const RouteSchedule& s, int route_id, const CostBreakdown* route_costs) {
  json appts = json::array();
  for (const Appointment& a : s.appointments) {
    json entry = {{"customer", a.customer}, {"w", a.time}, {"on_time_rate", a.on_time_rate}};
    if (a.all_cancelled) entry["all_cancelled"] = true;
    appts.push_back(std::move(entry));
  }
  json out = {{"schema_version", kSchemaVersion},
              {"route_id", route_id},
              {"appointments", appts},
              {"on_time_rate", s.on_time_rate},
              {"scheduled_return", s.scheduled_return}};
  out["cost_breakdown"] = route_costs ? cost_breakdown_to_json(*route_costs) : json(nullptr);
  return out;
}

json calibration_to_json(const CalibratedModel& m) {
  return {{"schema_version", kSchemaVersion},
          {"mu", matrix_to_json(m.mu)},
          {"sigma", matrix_to_json(m.sigma)},
          {"lambda", std::vector<double>(m.service_rate.begin() + 1, m.service_rate.end())},
          {"gamma", std::vector<double>(m.gamma.begin() + 1, m.gamma.end())}};
}

}  // namespace hsara
