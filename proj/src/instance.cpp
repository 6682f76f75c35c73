#include "hsara/instance.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "hsara/serialization.hpp"

namespace hsara {

namespace {

constexpr double kTriangleSlack = 1e-9;

void fail(const std::string& what) { throw InstanceError("invalid instance: " + what); }

}  // namespace

void validate(const Instance& instance, bool check_triangle) {
  const int n = instance.n;
  if (n < 1) fail("n must be >= 1");
  const auto nodes = static_cast<std::size_t>(n + 1);
  if (instance.travel_mean.size() != nodes) fail("travel_mean must be (n+1)x(n+1)");
  if (instance.service_mean.size() != nodes) fail("service_mean must have n entries");
  if (instance.cancel_prob.size() != nodes) fail("cancel_prob must have n entries");
  if (!instance.coords.empty() && instance.coords.size() != nodes) fail("coords must have n+1 entries");
  if (!(instance.horizon > 0.0) || !std::isfinite(instance.horizon)) fail("L must be positive");

  const CostParams& c = instance.costs;
  for (double v : {c.hiring, c.travel, c.overtime, c.earliness, c.delay})
    if (!(v >= 0.0) || !std::isfinite(v)) fail("cost coefficients must be finite and >= 0");

  for (std::size_t i = 1; i < nodes; ++i) {
    if (!(instance.service_mean[i] >= 0.0)) fail("service_mean[" + std::to_string(i) + "] < 0");
    const double p = instance.cancel_prob[i];
    if (!(p >= 0.0 && p <= 1.0))
      fail("cancel_prob[" + std::to_string(i) + "] = " + std::to_string(p) + " outside [0,1]");
  }
  for (std::size_t i = 0; i < nodes; ++i) {
    if (instance.travel_mean(i, i) != 0.0) fail("travel_mean diagonal must be zero");
    for (std::size_t j = 0; j < nodes; ++j) {
      const double t = instance.travel_mean(i, j);
      if (!(t >= 0.0) || !std::isfinite(t)) fail("travel_mean must be finite and >= 0");
    }
  }
  if (!check_triangle) return;
  for (std::size_t i = 0; i < nodes; ++i)
    for (std::size_t j = 0; j < nodes; ++j)
      for (std::size_t k = 0; k < nodes; ++k) {
        const double direct = instance.travel_mean(i, j);
        const double via = instance.travel_mean(i, k) + instance.travel_mean(k, j);
        if (direct > via + kTriangleSlack * (1.0 + direct))
          fail("triangle inequality violated on (" + std::to_string(i) + "," + std::to_string(j) +
               ") via " + std::to_string(k));
      }
}

Matrix euclidean_travel(const std::vector<Point>& coords, double speed) {
  Matrix m(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i)
    for (std::size_t j = 0; j < coords.size(); ++j)
      if (i != j) m(i, j) = std::hypot(coords[i].x - coords[j].x, coords[i].y - coords[j].y) / speed;
  return m;
}

Instance generate_instance(int n, std::uint64_t seed, const GeneratorParams& params) {
  if (n < 1) throw InstanceError("generate_instance: n must be >= 1");
  if (params.coords && params.coords->size() != static_cast<std::size_t>(n))
    throw InstanceError("generate_instance: injected coords must have n entries");

  std::mt19937_64 rng(seed);
  const double half = params.square_edge / 2.0;
  std::uniform_real_distribution<double> coord(-half, half);
  std::uniform_real_distribution<double> service(params.service_min, params.service_max);

  Instance inst;
  inst.n = n;
  inst.coords.reserve(n + 1);
  inst.coords.push_back({0.0, 0.0});
  inst.service_mean.assign(n + 1, 0.0);
  inst.cancel_prob.assign(n + 1, 0.0);
  for (int i = 1; i <= n; ++i) {
    // Coordinates are drawn even when injected so service draws do not shift.
    Point p{coord(rng), coord(rng)};
    if (params.coords) p = (*params.coords)[i - 1];
    inst.coords.push_back(p);
  }
  for (int i = 1; i <= n; ++i) {
    inst.service_mean[i] = service(rng);
    inst.cancel_prob[i] = params.cancel_prob;
  }
  inst.travel_mean = euclidean_travel(inst.coords, params.speed);
  inst.horizon = params.horizon;
  inst.costs = params.costs;
  return inst;
}

Instance read_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InstanceError("cannot open instance file " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InstanceError("malformed instance JSON in " + path.string() + ": " + e.what());
  }
  return instance_from_json(doc);
}

void write_instance(const Instance& instance, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InstanceError("cannot write instance file " + path.string());
  out << instance_to_json(instance).dump(2) << '\n';
}

Matrix read_travel_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InstanceError("cannot open travel CSV " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw InstanceError("travel CSV: non-numeric cell '" + cell + "' on row " +
                            std::to_string(rows.size() + 1));
      }
    }
    rows.push_back(std::move(row));
  }
  Matrix m(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size())
      throw InstanceError("travel CSV: row " + std::to_string(i + 1) + " has " +
                          std::to_string(rows[i].size()) + " cells, expected " +
                          std::to_string(rows.size()));
    for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

Instance subset_instance(const Instance& instance, const std::vector<int>& customers) {
  if (customers.empty()) throw InstanceError("customer subset must not be empty");
  std::vector<int> nodes{0};
  std::vector<bool> seen(instance.n + 1, false);
  for (int c : customers) {
    if (c < 1 || c > instance.n) throw InstanceError("customer " + std::to_string(c) + " out of range");
    if (seen[c]) throw InstanceError("customer " + std::to_string(c) + " listed twice");
    seen[c] = true;
    nodes.push_back(c);
  }
  Instance out;
  out.n = static_cast<int>(customers.size());
  out.travel_mean = Matrix(nodes.size());
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    if (!instance.coords.empty()) out.coords.push_back(instance.coords[nodes[a]]);
    out.service_mean.push_back(a == 0 ? 0.0 : instance.service_mean[nodes[a]]);
    out.cancel_prob.push_back(a == 0 ? 0.0 : instance.cancel_prob[nodes[a]]);
    for (std::size_t b = 0; b < nodes.size(); ++b)
      out.travel_mean(a, b) = instance.travel_mean(nodes[a], nodes[b]);
  }
  out.horizon = instance.horizon;
  out.costs = instance.costs;
  return out;
}

}  // namespace hsara
