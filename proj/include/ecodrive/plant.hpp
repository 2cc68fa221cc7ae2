#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "ecodrive/geometry.hpp"
#include "ecodrive/rng.hpp"

namespace ecodrive {

struct NoiseOutOfSupport : std::runtime_error {
  NoiseOutOfSupport() : std::runtime_error("measurement noise outside support") {}
};

/// Longitudinal state: position s (m) and speed v (m/s).
struct State {
  double s = 0.0;
  double v = 0.0;

  Eigen::Vector2d vec() const { return {s, v}; }
  static State from(const Eigen::Vector2d& x) { return {x[0], x[1]}; }
};

struct Measurement {
  double s = 0.0;  // position with localization error
  double v = 0.0;  // wheel-encoder speed, noise-free
};

/// Discrete double-integrator matrices at sampling time Ts. The continuous
/// model only fixes A's structure; B depends on the integration rule, so
/// both exact ZOH (default) and forward Euler are offered.
struct SystemMatrices {
  Eigen::Matrix2d A;
  Eigen::Vector2d B;
  Eigen::Matrix2d C;
  Eigen::Vector2d D;  // noise direction: position axis
  double Ts = 1.0;

  static SystemMatrices zoh(double Ts = 1.0);
  static SystemMatrices forward_euler(double Ts = 1.0);
};

State step_true(const State& x, double u, const SystemMatrices& sys);

/// Bounded localization-error law. Samples always land in [w_min, w_max]
/// (the truncated Gaussian resamples).
struct NoiseModel {
  enum class Kind { Uniform, TruncatedGaussian };
  Kind kind = Kind::Uniform;
  geom::AxisSegment support{-3.0, 3.0};
  double sigma = 1.5;  // TruncatedGaussian only

  double sample(Rng& rng) const;
  bool in_support(double w) const { return support.contains(w, 0.0); }
};

Measurement measure(const State& x, double w, const NoiseModel& noise);

/// Position-gain observer with exact speed channel. The estimate's speed
/// always equals the measured speed bit-for-bit.
struct Observer {
  double gain = 0.05;  // 0 < L < 1
  State estimate;

  static Observer from_first_measurement(const Measurement& y0, double gain);
  void update(double u, const Measurement& y_next, const SystemMatrices& sys);
};

/// Segment 2*L*i*W: the accumulated estimate-vs-nominal error bound after
/// i steps (i=1 gives the single-step lumped-noise bound 2*L*W).
geom::AxisSegment noise_bounds(double gain, const geom::AxisSegment& W, int i);

/// Per-step closed-loop record, enough to reconstruct estimation errors.
struct TrajectoryLog {
  std::vector<State> true_states;
  std::vector<State> estimates;
  std::vector<double> inputs;  // size = states - 1
};

struct EstimationErrors {
  std::vector<double> delta_s;      // s_k - s_hat_k, one per state
  std::vector<double> lumped_noise; // n_k reconstructed from the estimates
};

EstimationErrors estimation_error_trace(const TrajectoryLog& episode, const SystemMatrices& sys);

}  // namespace ecodrive
