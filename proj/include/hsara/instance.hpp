#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hsara {

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

// Cost coefficients. All per-minute except the fixed hiring cost.
struct CostParams {
  double hiring = 100.0;     // c_f
  double travel = 1.0;       // c_t
  double overtime = 2.0;     // c_o
  double earliness = 1.0;    // c_e
  double delay = 1.0;        // c_d
  bool operator==(const CostParams&) const = default;
};

// Dense row-major square matrix.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t size, double fill = 0.0)
      : size_(size), data_(size * size, fill) {}

  std::size_t size() const { return size_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * size_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * size_ + j]; }
  bool operator==(const Matrix&) const = default;

 private:
  std::size_t size_ = 0;
  std::vector<double> data_;
};

// A problem instance. Node 0 is the depot, nodes 1..n are customers. The
// return depot is the same physical node, so arcs into it read column 0.
// service_mean and cancel_prob are indexed by node; entry 0 is unused (0.0).
struct Instance {
  int n = 0;
  std::vector<Point> coords;
  Matrix travel_mean;
  std::vector<double> service_mean;
  std::vector<double> cancel_prob;
  double horizon = 250.0;
  CostParams costs;

  int node_count() const { return n + 1; }
  double travel(int i, int j) const { return travel_mean(i, j); }
  bool operator==(const Instance&) const = default;
};

class InstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GeneratorParams {
  double square_edge = 50.0;
  double speed = 1.0;  // km per minute
  double service_min = 30.0;
  double service_max = 60.0;
  double horizon = 250.0;
  double cancel_prob = 0.1;
  CostParams costs;
  // When set, replaces the random customer coordinates (size must be n).
  std::optional<std::vector<Point>> coords;
};

// Throws InstanceError describing the first violated invariant.
void validate(const Instance& instance, bool check_triangle = true);

Instance generate_instance(int n, std::uint64_t seed, const GeneratorParams& params = {});

// Rebuilds travel_mean as Euclidean distance / speed from coords.
Matrix euclidean_travel(const std::vector<Point>& coords, double speed = 1.0);

Instance read_instance(const std::filesystem::path& path);
void write_instance(const Instance& instance, const std::filesystem::path& path);

// Header-free row-major CSV of an (n+1)x(n+1) travel matrix.
Matrix read_travel_csv(const std::filesystem::path& path);

// Copy restricted to the given customers (in the given order), renumbered 1..k.
Instance subset_instance(const Instance& instance, const std::vector<int>& customers);

}  // namespace hsara
