#include "hsara/stochastics.hpp"

#include <cmath>
#include <limits>

namespace hsara {

namespace {

constexpr double kStdIntercept = -0.4736;
constexpr double kStdSlope = 0.9936;

std::mt19937_64 replica_engine(std::uint64_t base_seed, std::uint64_t replica, std::uint64_t stream) {
  const std::uint64_t s = base_seed + replica;
  std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

double variance_from_mean(double t_hat, bool* clamped) {
  double sd = kStdIntercept + kStdSlope * t_hat;
  const bool clamp = sd < 0.0;
  if (clamp) sd = 0.0;
  if (clamped) *clamped = clamp;
  return sd * sd;
}

LognormalParams lognormal_from_moments(double t_hat, double v_hat) {
  if (!(t_hat > 0.0)) throw CalibrationError("lognormal fit needs a positive mean");
  if (!(v_hat >= 0.0)) throw CalibrationError("lognormal fit needs a non-negative variance");
  const double t2 = t_hat * t_hat;
  return {std::log(t2 / std::sqrt(v_hat + t2)), std::sqrt(std::log1p(v_hat / t2))};
}

double exponential_from_mean(double s_hat) {
  if (!(s_hat > 0.0)) throw CalibrationError("exponential fit needs a positive mean");
  return 1.0 / s_hat;
}

double bernoulli_from_estimate(double p_hat) {
  if (!(p_hat >= 0.0 && p_hat <= 1.0)) throw CalibrationError("Bernoulli parameter outside [0,1]");
  return p_hat;
}

MomentFamily lognormal_family() {
  return {"lognormal", 2, [](std::span<const double> m) {
            const auto p = lognormal_from_moments(m[0], std::max(0.0, m[1] - m[0] * m[0]));
            return std::vector<double>{p.mu, p.sigma};
          }};
}

MomentFamily exponential_family() {
  return {"exponential", 1,
          [](std::span<const double> m) { return std::vector<double>{exponential_from_mean(m[0])}; }};
}

MomentFamily bernoulli_family() {
  return {"bernoulli", 1,
          [](std::span<const double> m) { return std::vector<double>{bernoulli_from_estimate(m[0])}; }};
}

std::vector<double> raw_moments(std::span<const double> samples, int k) {
  if (samples.empty()) throw CalibrationError("method of moments needs at least one sample");
  std::vector<double> m(k, 0.0);
  for (double x : samples) {
    double p = 1.0;
    for (int j = 0; j < k; ++j) {
      p *= x;
      m[j] += p;
    }
  }
  for (double& v : m) v /= static_cast<double>(samples.size());
  return m;
}

std::vector<double> method_of_moments(const MomentFamily& family, std::span<const double> samples) {
  const auto m = raw_moments(samples, family.moment_count);
  return family.fit(m);
}

double lognormal_mean(const LognormalParams& p) { return std::exp(p.mu + 0.5 * p.sigma * p.sigma); }

double lognormal_variance(const LognormalParams& p) {
  const double s2 = p.sigma * p.sigma;
  return std::expm1(s2) * std::exp(2.0 * p.mu + s2);
}

MomentEstimates estimates_from_instance(const Instance& instance) {
  MomentEstimates e;
  const int nodes = instance.node_count();
  e.travel_mean = instance.travel_mean;
  e.travel_variance = Matrix(nodes);
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j)
      if (i != j) e.travel_variance(i, j) = variance_from_mean(instance.travel(i, j));
  e.service_mean = instance.service_mean;
  e.cancel_prob = instance.cancel_prob;
  return e;
}

CalibratedModel calibrate(const MomentEstimates& e) {
  CalibratedModel m;
  const std::size_t nodes = e.travel_mean.size();
  m.travel_mean = e.travel_mean;
  m.mu = Matrix(nodes);
  m.sigma = Matrix(nodes);
  for (std::size_t i = 0; i < nodes; ++i)
    for (std::size_t j = 0; j < nodes; ++j) {
      const double t = e.travel_mean(i, j);
      if (t <= 0.0) continue;  // diagonal or coincident points: point mass at 0
      const auto p = lognormal_from_moments(t, e.travel_variance(i, j));
      m.mu(i, j) = p.mu;
      m.sigma(i, j) = p.sigma;
    }
  m.service_rate.assign(nodes, 0.0);
  m.gamma.assign(nodes, 0.0);
  for (std::size_t i = 1; i < nodes; ++i) {
    // A zero mean is a point mass at zero: infinite rate, every draw 0.
    m.service_rate[i] = e.service_mean[i] == 0.0 ? std::numeric_limits<double>::infinity()
                                                 : exponential_from_mean(e.service_mean[i]);
    m.gamma[i] = bernoulli_from_estimate(e.cancel_prob[i]);
  }
  return m;
}

CalibratedModel calibrate(const Instance& instance) { return calibrate(estimates_from_instance(instance)); }

ReplicaSampler::ReplicaSampler(const CalibratedModel& model, std::uint64_t base_seed,
                               std::uint64_t replica, std::uint64_t stream)
    : model_(&model), rng_(replica_engine(base_seed, replica, stream)) {}

double ReplicaSampler::travel(int i, int j) {
  const double mean = model_->travel_mean(i, j);
  const double sigma = model_->sigma(i, j);
  if (mean <= 0.0 || sigma == 0.0) return mean;
  return std::exp(model_->mu(i, j) + sigma * normal_(rng_));
}

double ReplicaSampler::service(int i) {
  const double rate = model_->service_rate[i];
  if (model_->service_family == ServiceFamily::deterministic) return 1.0 / rate;
  return -std::log1p(-unit_(rng_)) / rate;
}

bool ReplicaSampler::cancelled(int i) {
  const double g = model_->gamma[i];
  if (g <= 0.0) return false;
  if (g >= 1.0) return true;
  return unit_(rng_) < g;
}

Realization sample(const CalibratedModel& model, std::uint64_t seed) {
  ReplicaSampler s(model, seed, 0);
  const int nodes = model.node_count();
  Realization r;
  r.travel = Matrix(nodes);
  r.service.assign(nodes, 0.0);
  r.cancelled.assign(nodes, false);
  for (int i = 1; i < nodes; ++i) r.cancelled[i] = s.cancelled(i);
  for (int i = 1; i < nodes; ++i) r.service[i] = s.service(i);
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j)
      if (i != j) r.travel(i, j) = s.travel(i, j);
  return r;
}

}  // namespace hsara
