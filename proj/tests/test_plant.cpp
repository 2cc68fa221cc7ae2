#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ecodrive/plant.hpp"

using namespace ecodrive;

TEST_CASE("true step: coasting, ZOH input, at rest") {
  const auto sys = SystemMatrices::zoh();
  State a = step_true({0, 5}, 0, sys);
  CHECK(a.s == doctest::Approx(5));
  CHECK(a.v == doctest::Approx(5));

  // Closed-form ZOH integration: s+ = s + v + u/2, v+ = v + u.
  State b = step_true({0, 5}, 1, sys);
  CHECK(b.s == doctest::Approx(5.5));
  CHECK(b.v == doctest::Approx(6));

  State c = step_true({10, 0}, 0, sys);
  CHECK(c.s == doctest::Approx(10));
  CHECK(c.v == doctest::Approx(0));

  const auto euler = SystemMatrices::forward_euler();
  State d = step_true({0, 5}, 1, euler);
  CHECK(d.s == doctest::Approx(5.0));
  CHECK(d.v == doctest::Approx(6));
}

TEST_CASE("measurement model") {
  NoiseModel noise;  // uniform [-3, 3]
  Measurement m = measure({100, 5}, 3, noise);
  CHECK(m.s == doctest::Approx(103));
  CHECK(m.v == doctest::Approx(5));

  Measurement z = measure({100, 5}, 0, noise);
  CHECK(z.s == doctest::Approx(100));

  Measurement lo = measure({0, 0}, -3, noise);
  CHECK(lo.s == doctest::Approx(-3));

  CHECK_THROWS_AS(measure({0, 0}, 3.01, noise), NoiseOutOfSupport);
}

TEST_CASE("observer update structure") {
  const auto sys = SystemMatrices::zoh();
  Observer obs = Observer::from_first_measurement({10, 2}, 0.05);
  CHECK(obs.estimate.s == doctest::Approx(10));
  CHECK(obs.estimate.v == doctest::Approx(2));

  // Zero innovation: estimate equals the prediction.
  const Eigen::Vector2d pred = sys.A * obs.estimate.vec() + sys.B * 1.0;
  Observer zero = obs;
  zero.update(1.0, {pred[0], pred[1]}, sys);
  CHECK(zero.estimate.s == doctest::Approx(pred[0]));
  CHECK(zero.estimate.v == doctest::Approx(pred[1]));

  // Position innovation delta corrects position by L*delta.
  Observer pos = obs;
  pos.update(1.0, {pred[0] + 2.0, pred[1]}, sys);
  CHECK(pos.estimate.s == doctest::Approx(pred[0] + 0.05 * 2.0));

  // Speed innovation snaps speed to the measurement, position untouched.
  Observer spd = obs;
  spd.update(1.0, {pred[0], pred[1] + 0.7}, sys);
  CHECK(spd.estimate.s == doctest::Approx(pred[0]));
  CHECK(spd.estimate.v == doctest::Approx(pred[1] + 0.7));
}

TEST_CASE("noise bound segments") {
  geom::AxisSegment W(-3, 3);
  auto b1 = noise_bounds(0.05, W, 1);
  CHECK(b1.lo == doctest::Approx(-0.3));
  CHECK(b1.hi == doctest::Approx(0.3));
  auto b0 = noise_bounds(0.05, W, 0);
  CHECK(b0.lo == doctest::Approx(0));
  CHECK(b0.hi == doctest::Approx(0));
  auto b5 = noise_bounds(0.05, W, 5);
  CHECK(b5.lo == doctest::Approx(-1.5));
  CHECK(b5.hi == doctest::Approx(1.5));
}

TEST_CASE("estimation error trace basics") {
  const auto sys = SystemMatrices::zoh();
  NoiseModel noise;

  // Noise-free episode: all delta_s = 0.
  TrajectoryLog log;
  State x{0, 0};
  Measurement y0 = measure(x, 0, noise);
  Observer obs = Observer::from_first_measurement(y0, 0.05);
  log.true_states.push_back(x);
  log.estimates.push_back(obs.estimate);
  for (int k = 0; k < 10; ++k) {
    const double u = 0.5;
    x = step_true(x, u, sys);
    obs.update(u, measure(x, 0, noise), sys);
    log.true_states.push_back(x);
    log.estimates.push_back(obs.estimate);
    log.inputs.push_back(u);
  }
  auto err = estimation_error_trace(log, sys);
  for (double d : err.delta_s) CHECK(std::abs(d) < 1e-12);
  for (double n : err.lumped_noise) CHECK(std::abs(n) < 1e-12);

  // w_0 = 3 makes delta_s_0 = -3.
  Observer o3 = Observer::from_first_measurement(measure({0, 0}, 3, noise), 0.05);
  CHECK(0.0 - o3.estimate.s == doctest::Approx(-3));
}

TEST_CASE("containment: delta_s in W and n in 2LW over long runs") {
  const auto sys = SystemMatrices::zoh();
  NoiseModel noise;
  const double L = 0.05;
  Rng rng(424242);

  State x{0, 1};
  Observer obs = Observer::from_first_measurement(measure(x, noise.sample(rng), noise), L);
  int violations = 0;
  for (int k = 0; k < 20000; ++k) {
    const double u = rng.uniform(-1, 1);
    const Eigen::Vector2d pred = sys.A * obs.estimate.vec() + sys.B * u;
    x = step_true(x, u, sys);
    obs.update(u, measure(x, noise.sample(rng), noise), sys);
    const double delta_s = x.s - obs.estimate.s;
    const double n_k = obs.estimate.s - pred[0];
    if (delta_s < -3 - 1e-12 || delta_s > 3 + 1e-12) ++violations;
    if (n_k < -2 * L * 3 - 1e-12 || n_k > 2 * L * 3 + 1e-12) ++violations;
    // Exact speed channel, bit for bit.
    CHECK(obs.estimate.v == x.v);
  }
  CHECK(violations == 0);
}
