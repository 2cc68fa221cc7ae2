#include "ecodrive/plant.hpp"

#include <cmath>

namespace ecodrive {

SystemMatrices SystemMatrices::zoh(double Ts) {
  SystemMatrices m;
  m.A << 1.0, Ts, 0.0, 1.0;
  m.B << 0.5 * Ts * Ts, Ts;
  m.C.setIdentity();
  m.D << 1.0, 0.0;
  m.Ts = Ts;
  return m;
}

SystemMatrices SystemMatrices::forward_euler(double Ts) {
  SystemMatrices m = zoh(Ts);
  m.B << 0.0, Ts;
  return m;
}

State step_true(const State& x, double u, const SystemMatrices& sys) {
  return State::from(sys.A * x.vec() + sys.B * u);
}

double NoiseModel::sample(Rng& rng) const {
  if (kind == Kind::Uniform) return rng.uniform(support.lo, support.hi);
  for (int i = 0; i < 256; ++i) {
    const double w = sigma * rng.normal();
    if (support.contains(w, 0.0)) return w;
  }
  return 0.5 * (support.lo + support.hi);  // sigma way above support width
}

Measurement measure(const State& x, double w, const NoiseModel& noise) {
  if (!noise.in_support(w)) throw NoiseOutOfSupport();
  return {x.s + w, x.v};
}

Observer Observer::from_first_measurement(const Measurement& y0, double gain) {
  Observer o;
  o.gain = gain;
  o.estimate = {y0.s, y0.v};
  return o;
}

void Observer::update(double u, const Measurement& y_next, const SystemMatrices& sys) {
  const Eigen::Vector2d pred = sys.A * estimate.vec() + sys.B * u;
  estimate.s = pred[0] + gain * (y_next.s - pred[0]);
  estimate.v = y_next.v;  // exact speed channel
}

geom::AxisSegment noise_bounds(double gain, const geom::AxisSegment& W, int i) {
  if (i < 0) throw std::invalid_argument("noise_bounds: negative step count");
  return W.scaled(2.0 * gain * i);
}

EstimationErrors estimation_error_trace(const TrajectoryLog& episode, const SystemMatrices& sys) {
  EstimationErrors out;
  const size_t n = episode.true_states.size();
  if (episode.estimates.size() != n || episode.inputs.size() + 1 != n) {
    throw std::invalid_argument("estimation_error_trace: inconsistent episode");
  }
  out.delta_s.reserve(n);
  for (size_t k = 0; k < n; ++k) {
    out.delta_s.push_back(episode.true_states[k].s - episode.estimates[k].s);
  }
  // n_k recovered from the observer recursion x__{k+1} = A x_ + B u + D n.
  out.lumped_noise.reserve(n - 1);
  for (size_t k = 0; k + 1 < n; ++k) {
    const Eigen::Vector2d pred = sys.A * episode.estimates[k].vec() + sys.B * episode.inputs[k];
    out.lumped_noise.push_back(episode.estimates[k + 1].s - pred[0]);
  }
  return out;
}

}  // namespace ecodrive
