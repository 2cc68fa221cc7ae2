#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ecodrive/energy.hpp"
#include "ecodrive/geometry.hpp"
#include "ecodrive/plant.hpp"
#include "ecodrive/traffic.hpp"

namespace ecodrive {

struct InitPlanInfeasible : std::runtime_error {
  InitPlanInfeasible() : std::runtime_error("initialization plan infeasible") {}
};

/// Speed/acceleration box (Eq.-17-style constraints).
struct Limits {
  double v_max = 20.0;
  double a_min = -3.0;
  double a_max = 2.5;
};

/// One dataset row: state shifted by its light position, applied input,
/// cost-to-go, and the augmentation iteration that produced it.
struct DatasetRow {
  double s_shift = 0.0;
  double v = 0.0;
  double u = 0.0;
  double J = 0.0;
  int iteration = 0;
};

class Dataset {
 public:
  const std::vector<DatasetRow>& rows() const { return rows_; }
  size_t size() const { return rows_.size(); }
  int iteration() const { return iteration_; }
  void set_iteration(int j) { iteration_ = j; }

  /// Appends with deduplication: rows within 1e-6 in (s_shift, v, u) merge,
  /// keeping the smaller cost-to-go.
  void append(const DatasetRow& row);

  /// Append without dedup; the initialization layout (three rows per plan
  /// step, Eq.-29 style) relies on positional indexing.
  void push_raw(const DatasetRow& row) { rows_.push_back(row); }
  std::vector<DatasetRow>& mutable_rows() { return rows_; }

  void save_csv(const std::string& path) const;
  static Dataset load_csv(const std::string& path);

 private:
  std::vector<DatasetRow> rows_;
  int iteration_ = 0;
};

/// Region at/after the light (shifted frame), zero cost-to-go everywhere.
/// Forward extent bounds the paper's at-the-light polytope so it has
/// vertices; anything reachable within one horizon past the light stays
/// inside.
struct TargetSetO {
  geom::Polygon region;             // shifted box [0, fwd] x [0, v_max]
  std::vector<geom::Vec2> vertices; // shifted, cost 0 each

  static TargetSetO make(double v_max, double forward_extent);
};

/// Suboptimal tube plan for dataset initialization: nominal trajectory from
/// the first estimate into O shrunk by the measurement tube, inputs
/// tie-broken by minimum input energy so the plan is deterministic.
struct InitPlan {
  std::vector<State> states;   // 0..T+1
  std::vector<double> inputs;  // 0..T
};

InitPlan init_tube_plan(const State& x0_est, double s_tl, int T, const Limits& lim,
                        const geom::AxisSegment& W, const SystemMatrices& sys);

/// Three rows per plan step: nominal and both tube extremes, shifted by the
/// light position, all carrying the step's input.
Dataset build_initial_dataset(const InitPlan& plan, const geom::AxisSegment& W, double s_tl);

/// Backward worst-case recursion over the plan tubes; assigns every row of
/// step k the same upper bound J_k.
void init_cost_to_go(Dataset* dataset, const InitPlan& plan, const geom::AxisSegment& W,
                     const EnergyModel& model);

/// Terminal-noise discretization: both support extremes plus up to M-2
/// interior points at empirical quantiles of the recorded samples. Interior
/// weights carry their histogram-bin mass; the extremes split the residual
/// tail mass equally.
struct NoiseDiscretization {
  std::vector<double> points;   // on the position axis, within 2LN*W
  std::vector<double> weights;  // nonnegative, sum 1

  void save_csv(const std::string& path, uint64_t seed) const;
  static NoiseDiscretization load_csv(const std::string& path);
};

NoiseDiscretization discretize_terminal_noise(std::vector<double> samples,
                                              const geom::AxisSegment& support, int M);

/// Simulated lumped-noise aggregation: runs the observer error recursion on
/// the configured noise law and returns sliding N-step sums of n_k.
std::vector<double> simulate_terminal_noise_samples(const NoiseModel& noise, double gain, int N,
                                                    int count, uint64_t seed);

/// Piecewise-affine terminal cost as the optimal value of the
/// convex-multiplier LP over dataset rows and the zero-cost target vertices.
/// Evaluation is Infeasible (nullopt) outside the shifted hull of
/// data + target vertices.
class ValueFunction {
 public:
  ValueFunction(const Dataset* data, const TargetSetO* target);

  /// Call after the dataset changed.
  void rebuild();

  std::optional<double> eval_shifted(const geom::Vec2& x_shifted) const;
  std::optional<double> eval(const State& x, double s_tl) const;

  const geom::Polygon& domain() const { return domain_; }
  /// Embedding hooks: all multiplier points (rows then target vertices) and
  /// their costs, in the order the MPC builder lays out lambda.
  const std::vector<geom::Vec2>& points() const { return points_; }
  const std::vector<double>& costs() const { return costs_; }

 private:
  const Dataset* data_;
  const TargetSetO* target_;
  std::vector<geom::Vec2> points_;
  std::vector<double> costs_;
  geom::Polygon domain_;
};

/// Eq.-35-style cost for one new row: stage cost plus the discretized
/// expectation of the previous value function one step ahead. nullopt when
/// any successor point leaves the previous domain (the row is dropped).
std::optional<double> update_cost_to_go(const DatasetRow& row, const ValueFunction& vf_prev,
                                        const NoiseDiscretization& nd, const EnergyModel& model,
                                        const SystemMatrices& sys);

struct AugmentStats {
  int appended = 0;
  int domain_misses = 0;
  int skipped_past_route = 0;
  int skipped_bounds = 0;
};

/// Closed-loop pairs become rows shifted by each state's nearest upcoming
/// light; costs come from update_cost_to_go against the pre-update value
/// function.
AugmentStats augment_dataset(Dataset* dataset, const std::vector<std::pair<State, double>>& pairs,
                             const Route& route, const ValueFunction& vf_prev,
                             const NoiseDiscretization& nd, const EnergyModel& model,
                             const SystemMatrices& sys, const Limits& lim);

struct RcsParams {
  double s_tl = 0.0;           // absolute anchor for the collision shift
  double gain = 0.05;          // observer gain L
  geom::AxisSegment W{-3, 3};
  Limits lim;
  double d0 = 5.0;
  double ttc = 1.0;
  int horizon = 5;             // N; lead indices run over [N, t+N]
};

/// Data-driven t-step robust controllable set (shifted frame). The returned
/// chain holds R_0..R_t; R_0 is the target intersected with the terminal
/// collision constraint. Empty sets propagate as explicit empties.
std::vector<geom::Polygon> robust_controllable_chain(const Dataset& data, int t,
                                                     const geom::Polygon& target_shifted,
                                                     const PrecedingTrack* lead,
                                                     const RcsParams& params,
                                                     const SystemMatrices& sys);

geom::Polygon robust_controllable_set(const Dataset& data, int t,
                                      const geom::Polygon& target_shifted,
                                      const PrecedingTrack* lead, const RcsParams& params,
                                      const SystemMatrices& sys);

/// Target regions behind/past the light, shrunk by the measurement tube
/// (shifted frame, halfspace form with the speed box).
geom::Polygon target_behind_light(const geom::AxisSegment& W, const Limits& lim);
geom::Polygon target_past_light(const geom::AxisSegment& W, const Limits& lim);

/// Terminal sets: S from the stay-behind target over t_red steps (when the
/// light is red at the horizon end), P from the get-past target over t_green
/// steps. nullopt S means the red constraint is vacuous.
struct TerminalSets {
  std::optional<geom::Polygon> stay_behind;  // S_{t_red}
  geom::Polygon cross_by_deadline;           // P_{t_green}
};

TerminalSets terminal_sets(std::optional<int> t_red, int t_green, const Dataset& data,
                           const PrecedingTrack* lead, const RcsParams& params,
                           const SystemMatrices& sys);

}  // namespace ecodrive
