#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "ecodrive/energy.hpp"
#include "ecodrive/learning.hpp"
#include "ecodrive/plant.hpp"
#include "ecodrive/qp.hpp"
#include "ecodrive/traffic.hpp"

namespace ecodrive {

struct ControlFailure : std::runtime_error {
  explicit ControlFailure(const std::string& what) : std::runtime_error(what) {}
};
struct PolicyError : std::runtime_error {
  explicit PolicyError(const std::string& what) : std::runtime_error(what) {}
};
struct BaselineInfeasible : std::runtime_error {
  explicit BaselineInfeasible(const std::string& what) : std::runtime_error(what) {}
};

struct MpcConfig {
  int horizon = 5;               // N
  double slack_penalty = 1e4;    // M_f
  Limits lim;
  double observer_gain = 0.05;   // L = 1/(4N)
  geom::AxisSegment W{-3.0, 3.0};
  double d0 = 5.0;
  double ttc = 1.0;
  bool yellow_is_green = true;   // red-only constraints unless disabled
  double slack_tol = 1e-6;
  int relax_increment = 5;
  double target_forward_extent = 120.0;
};

enum class ControllerKind { Unified, Simplified, Cruise };

struct MpcResult {
  double u0 = 0.0;
  double slack = 0.0;
  std::vector<State> nominal;    // predicted nominal states 0..horizon
  double objective = 0.0;        // kJ including constant stage-cost terms
  qp::SolveStatus status = qp::SolveStatus::MaxIter;
  ControllerKind fired = ControllerKind::Unified;
  bool terminal_empty = false;   // no terminal face available (data gap)
  bool vf_fallback = false;      // value-function embedding dropped this step
  std::optional<int> t_red;
  int t_green = 0;
  int light_index = -1;
  int deadline = -1;
};

/// Lead-vehicle information as the controller sees it: measured gap and
/// speed plus the prediction-module forecast (defaults to constant speed).
struct LeadObservation {
  double gap = 0.0;
  double speed = 0.0;
  std::vector<double> forecast;  // speeds from now; empty = constant
};

/// Per-light crossing deadlines with the relaxation bookkeeping from the
/// infeasibility remark: a slacked step buys more time on the active light
/// and shifts the downstream deadlines to stay strictly increasing.
class DeadlineBook {
 public:
  DeadlineBook() = default;
  explicit DeadlineBook(std::vector<int> deadlines);

  int deadline(int light) const { return deadlines_.at(light); }
  int last() const { return deadlines_.empty() ? 0 : deadlines_.back(); }
  int relaxations() const { return relaxations_; }

  /// False once the cap (2x the original last deadline) is exhausted.
  bool relax(int light, int increment);

 private:
  std::vector<int> deadlines_;
  int cap_ = 0;
  int relaxations_ = 0;
};

/// The data-driven MPC policy: unified horizon-N controller while the
/// deadline is far, shrinking-horizon simplified controller close to it,
/// cruise tracking past the last light.
class ProposedController {
 public:
  ProposedController(const MpcConfig& config, const SystemMatrices& sys, const EnergyModel& model,
                     const Route& route, const Dataset* data, const ValueFunction* vf,
                     const NoiseDiscretization* nd);

  MpcResult step(int k, const State& estimate, const std::optional<LeadObservation>& lead);

  const DeadlineBook& deadlines() const { return deadlines_; }
  int slack_events() const { return slack_events_; }
  int vf_fallbacks() const { return vf_fallbacks_; }

  /// Thm-3-style audit: with zero slack, the terminal state reaches the
  /// crossing chain and every chain stage remains steerable one level down
  /// under worst-case lumped noise. Pure interval arithmetic, no solver.
  bool crossing_certificate(const MpcResult& r) const;

 private:
  struct TerminalFaces {
    std::vector<geom::Halfspace> faces;  // tightened, shifted to absolute frame
    bool empty_set = false;
  };

  MpcResult solve_unified(int k, const State& est, const std::optional<LeadObservation>& lead,
                          int light, int deadline);
  MpcResult solve_simplified(int k, const State& est, const std::optional<LeadObservation>& lead,
                             int light, int deadline);
  MpcResult solve_cruise(const State& est, double v_ref,
                         const std::optional<LeadObservation>& lead, int k,
                         std::optional<int> light);
  PrecedingTrack make_track(const State& est, const LeadObservation& lead, int length) const;

  MpcConfig cfg_;
  SystemMatrices sys_;
  EnergyModel model_;
  Route route_;
  const Dataset* data_;
  const ValueFunction* vf_;
  const NoiseDiscretization* nd_;
  DeadlineBook deadlines_;
  int slack_events_ = 0;
  int vf_fallbacks_ = 0;
  // Chain of the latest crossing-set recursion, for the certificate.
  std::vector<geom::Polygon> last_p_chain_;
};

/// Speed-tracking cruise controller (first baseline): short-horizon QP with
/// collision tightening and a hard red-light stop, no deadline awareness.
class CruiseController {
 public:
  CruiseController(const MpcConfig& config, const SystemMatrices& sys, const Route& route,
                   double v_ref);

  MpcResult step(int k, const State& estimate, const std::optional<LeadObservation>& lead);
  double v_ref() const { return v_ref_; }

 private:
  MpcConfig cfg_;
  SystemMatrices sys_;
  Route route_;
  double v_ref_;
};

/// Plan-then-track baseline (second baseline): one full-horizon minimum
/// energy plan at t = 0 under free-flow assumptions and the deadline/red
/// schedule, then cruise-style tracking of the planned speeds with collision
/// avoidance. No replanning.
class HierarchicalController {
 public:
  HierarchicalController(const MpcConfig& config, const SystemMatrices& sys,
                         const EnergyModel& model, const Route& route, const State& start_estimate);

  MpcResult step(int k, const State& estimate, const std::optional<LeadObservation>& lead);
  const std::vector<State>& plan() const { return plan_; }

 private:
  MpcConfig cfg_;
  SystemMatrices sys_;
  Route route_;
  std::vector<State> plan_;     // planned states 0..T_last
  std::vector<double> plan_u_;  // planned inputs
};

/// Shared helper for the builders: per-step stage-cost expansion of the
/// energy quadratic over the input sequence.
struct StageCostExpansion {
  Eigen::MatrixXd Q;     // over inputs
  Eigen::VectorXd q;
  double constant = 0.0;
};

StageCostExpansion expand_stage_costs(const EnergyModel& model, double v0, int horizon,
                                      const SystemMatrices& sys);

}  // namespace ecodrive
