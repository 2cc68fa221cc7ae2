#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "ecodrive/geometry.hpp"
#include "ecodrive/rng.hpp"

namespace ecodrive {

struct DeadlineSearchFailed : std::runtime_error {
  DeadlineSearchFailed() : std::runtime_error("no feasible green crossing step") {}
};

enum class Phase { Green, Yellow, Red };

/// Deterministic cyclic signal. `offset` shifts the cycle start: phase at
/// step k is read at (k + offset) mod cycle with order green, yellow, red.
struct TrafficLight {
  double position = 0.0;  // m
  int green = 150;
  int yellow = 5;
  int red = 25;
  int offset = 0;

  int cycle() const { return green + yellow + red; }
  Phase phase_at(int k) const;
  /// First step >= k whose phase is green (yellow configurable upstream).
  int next_green(int k) const;
};

struct Route {
  std::vector<TrafficLight> lights;  // positions strictly increasing
  double length = 0.0;
  double flow_speed = 0.0;           // m/s, from V2I
  std::vector<int> deadlines;        // T_l, strictly increasing

  void validate() const;
  /// Nearest light with s <= position (boundary inclusive); nullopt past the
  /// last light.
  std::optional<int> nearest_upcoming(double s) const;
};

/// Crossing-step search on the 1 s grid. For each light, the earliest green
/// step at/after the flow-speed lower bound ceil(s_l / flow) + startup,
/// (the quadratic flow-deviation cost is decreasing toward that bound, so
/// the earliest feasible green step is the per-light minimizer), kept
/// strictly increasing across lights. `startup_steps` charges the standing
/// start; single-segment tasks use 1, multi-light routes 0.
std::vector<int> green_wave_deadlines(const std::vector<TrafficLight>& lights, double flow_speed,
                                      int startup_steps, double v_max,
                                      bool yellow_is_green = true);

/// TTC gap constraint as a halfspace on (s, v):
///   s + TTC v <= s_pv + TTC v_pv - d0.
geom::Halfspace collision_halfspace(double s_pv, double v_pv, double d0 = 5.0, double ttc = 1.0);

/// Lead-vehicle forecast: measured gap anchors the position chain, speeds
/// integrate at Ts, constant-speed extrapolation beyond the supplied horizon.
struct PrecedingTrack {
  double gap = 0.0;     // d_k (m)
  double speed = 0.0;   // v_pv at k
  std::vector<double> positions;  // predicted, index 0 = now
  std::vector<double> speeds;
};

PrecedingTrack predict_preceding(double gap, double v_now, double est_pos,
                                 const std::vector<double>& speed_forecast, int horizon,
                                 int extension, double Ts = 1.0);

/// Ground-truth lead simulation. Constant mode per the single-segment
/// experiments; cruise mode tracks the flow speed under accel limits.
struct LeadVehicle {
  enum class Mode { Constant, Cruise };
  Mode mode = Mode::Constant;
  double s = 0.0;
  double v = 0.0;
  double target_speed = 0.0;
  double a_min = -3.0;
  double a_max = 2.5;
  double gain = 0.6;

  void step(double Ts = 1.0);
};

}  // namespace ecodrive
