#include "ecodrive/traffic.hpp"

#include <algorithm>
#include <cmath>

namespace ecodrive {

Phase TrafficLight::phase_at(int k) const {
  if (k < 0) throw std::invalid_argument("phase_at: negative step");
  const int t = (k + offset) % cycle();
  if (t < green) return Phase::Green;
  if (t < green + yellow) return Phase::Yellow;
  return Phase::Red;
}

int TrafficLight::next_green(int k) const {
  for (int t = k; t < k + cycle() + 1; ++t) {
    if (phase_at(t) == Phase::Green) return t;
  }
  throw DeadlineSearchFailed();  // zero green duration
}

void Route::validate() const {
  for (size_t i = 1; i < lights.size(); ++i) {
    if (lights[i].position <= lights[i - 1].position) {
      throw std::invalid_argument("Route: light positions not increasing");
    }
  }
  for (size_t i = 1; i < deadlines.size(); ++i) {
    if (deadlines[i] <= deadlines[i - 1]) {
      throw std::invalid_argument("Route: deadlines not increasing");
    }
  }
}

std::optional<int> Route::nearest_upcoming(double s) const {
  for (size_t l = 0; l < lights.size(); ++l) {
    if (s <= lights[l].position) return static_cast<int>(l);
  }
  return std::nullopt;
}

std::vector<int> green_wave_deadlines(const std::vector<TrafficLight>& lights, double flow_speed,
                                      int startup_steps, double v_max, bool yellow_is_green) {
  if (flow_speed <= 0) throw std::invalid_argument("green_wave_deadlines: flow_speed <= 0");
  std::vector<int> out;
  out.reserve(lights.size());
  int prev = 0;
  for (const auto& light : lights) {
    // Can't out-run the traffic ahead: average speed to the light is capped
    // by the flow, and physically by v_max.
    const int lb_flow = static_cast<int>(std::ceil(light.position / flow_speed)) + startup_steps;
    const int lb_vmax = static_cast<int>(std::ceil(light.position / v_max));
    int t = std::max({lb_flow, lb_vmax, prev + 1});
    const int cap = t + 2 * light.cycle();
    auto ok = [&](int step) {
      const Phase p = light.phase_at(step);
      return p == Phase::Green || (yellow_is_green && p == Phase::Yellow);
    };
    while (t <= cap && !ok(t)) ++t;
    if (t > cap) throw DeadlineSearchFailed();
    out.push_back(t);
    prev = t;
  }
  return out;
}

geom::Halfspace collision_halfspace(double s_pv, double v_pv, double d0, double ttc) {
  return geom::Halfspace(geom::Vec2(1.0, ttc), s_pv + ttc * v_pv - d0).normalized();
}

PrecedingTrack predict_preceding(double gap, double v_now, double est_pos,
                                 const std::vector<double>& speed_forecast, int horizon,
                                 int extension, double Ts) {
  PrecedingTrack t;
  t.gap = gap;
  t.speed = v_now;
  const int total = horizon + extension;
  t.positions.reserve(total + 1);
  t.speeds.reserve(total + 1);
  double pos = est_pos + gap;
  for (int i = 0; i <= total; ++i) {
    const double spd = i < static_cast<int>(speed_forecast.size())
                           ? speed_forecast[i]
                           : (speed_forecast.empty() ? v_now : speed_forecast.back());
    t.positions.push_back(pos);
    t.speeds.push_back(spd);
    pos += spd * Ts;
  }
  return t;
}

void LeadVehicle::step(double Ts) {
  double u = 0.0;
  if (mode == Mode::Cruise) {
    u = std::clamp(gain * (target_speed - v), a_min, a_max);
  }
  s += v * Ts + 0.5 * u * Ts * Ts;
  v = std::max(0.0, v + u * Ts);
}

}  // namespace ecodrive
