#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hsara/instance.hpp"

namespace hsara {

class CalibrationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Sample moments that drive calibration. Per-node vectors leave entry 0 unused.
struct MomentEstimates {
  Matrix travel_mean;
  Matrix travel_variance;
  std::vector<double> service_mean;
  std::vector<double> cancel_prob;
};

// Linear mean/standard-deviation relation for travel times:
// sqrt(v) = -0.4736 + 0.9936 t. Below the root the deviation is clamped to 0
// and *clamped is set.
double variance_from_mean(double t_hat, bool* clamped = nullptr);

struct LognormalParams {
  double mu = 0.0;
  double sigma = 0.0;
};

LognormalParams lognormal_from_moments(double t_hat, double v_hat);
double exponential_from_mean(double s_hat);
double bernoulli_from_estimate(double p_hat);

// Generic method-of-moments hook: a family maps its first k raw moments
// E[X], E[X^2], ... to parameters.
struct MomentFamily {
  std::string name;
  int moment_count = 1;
  std::function<std::vector<double>(std::span<const double>)> fit;
};

MomentFamily lognormal_family();    // params {mu, sigma}
MomentFamily exponential_family();  // params {lambda}
MomentFamily bernoulli_family();    // params {gamma}

// (1/n) sum x^j for j = 1..k.
std::vector<double> raw_moments(std::span<const double> samples, int k);
std::vector<double> method_of_moments(const MomentFamily& family, std::span<const double> samples);

double lognormal_mean(const LognormalParams& p);
double lognormal_variance(const LognormalParams& p);

// Deterministic service replaces each draw with its mean; tests use it to
// make arrivals point masses.
enum class ServiceFamily { exponential, deterministic };

struct CalibratedModel {
  Matrix travel_mean;  // kept so zero-variance arcs reproduce the mean exactly
  Matrix mu;
  Matrix sigma;
  std::vector<double> service_rate;  // lambda_i per node, entry 0 unused
  ServiceFamily service_family = ServiceFamily::exponential;
  std::vector<double> gamma;         // cancellation probability per node

  int node_count() const { return static_cast<int>(travel_mean.size()); }
};

// Travel variance from the linear relation, service and cancellation from the instance.
MomentEstimates estimates_from_instance(const Instance& instance);
CalibratedModel calibrate(const MomentEstimates& estimates);
CalibratedModel calibrate(const Instance& instance);

// Independent random stream for one replica: seeded from (base_seed + replica, stream).
class ReplicaSampler {
 public:
  ReplicaSampler(const CalibratedModel& model, std::uint64_t base_seed, std::uint64_t replica,
                 std::uint64_t stream = 0);

  double travel(int i, int j);
  double service(int i);
  bool cancelled(int i);

 private:
  const CalibratedModel* model_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

// One full draw of every arc, service and cancellation.
struct Realization {
  Matrix travel;
  std::vector<double> service;
  std::vector<bool> cancelled;
};

Realization sample(const CalibratedModel& model, std::uint64_t seed);

}  // namespace hsara
