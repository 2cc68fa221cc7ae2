#include "ecodrive/learning.hpp"

#include <algorithm>
#include <cmath>

#include "ecodrive/csv.hpp"
#include "ecodrive/qp.hpp"

namespace ecodrive {

void Dataset::append(const DatasetRow& row) {
  for (auto& r : rows_) {
    if (std::abs(r.s_shift - row.s_shift) <= 1e-6 && std::abs(r.v - row.v) <= 1e-6 &&
        std::abs(r.u - row.u) <= 1e-6) {
      r.J = std::min(r.J, row.J);
      return;
    }
  }
  rows_.push_back(row);
}

void Dataset::save_csv(const std::string& path) const {
  csv::Writer w(path, {"s_shift", "v", "u", "J", "iteration"});
  for (const auto& r : rows_) {
    w.row(std::vector<double>{r.s_shift, r.v, r.u, r.J, static_cast<double>(r.iteration)});
  }
}

Dataset Dataset::load_csv(const std::string& path) {
  csv::Table t = csv::read(path);
  Dataset d;
  const int cs = t.column("s_shift"), cv = t.column("v"), cu = t.column("u"),
            cj = t.column("J"), ci = t.column("iteration");
  for (const auto& r : t.rows) {
    d.rows_.push_back({r[cs], r[cv], r[cu], r[cj], static_cast<int>(r[ci])});
    d.iteration_ = std::max(d.iteration_, static_cast<int>(r[ci]));
  }
  return d;
}

TargetSetO TargetSetO::make(double v_max, double forward_extent) {
  TargetSetO o;
  o.region = geom::Polygon::box(0.0, forward_extent, 0.0, v_max);
  o.vertices = {{0.0, 0.0}, {forward_extent, 0.0}, {forward_extent, v_max}, {0.0, v_max}};
  return o;
}

InitPlan init_tube_plan(const State& x0_est, double s_tl, int T, const Limits& lim,
                        const geom::AxisSegment& W, const SystemMatrices& sys) {
  if (T < 1) throw InitPlanInfeasible();
  const int nu = T + 1;  // inputs 0..T, states 0..T+1

  // States are affine in the inputs; build position/speed rows.
  Eigen::MatrixXd Ps = Eigen::MatrixXd::Zero(T + 2, nu);  // position coefficients
  Eigen::MatrixXd Pv = Eigen::MatrixXd::Zero(T + 2, nu);  // speed coefficients
  Eigen::VectorXd cs = Eigen::VectorXd::Zero(T + 2);
  Eigen::VectorXd cv = Eigen::VectorXd::Zero(T + 2);
  cs[0] = x0_est.s;
  cv[0] = x0_est.v;
  for (int k = 1; k <= T + 1; ++k) {
    cs[k] = x0_est.s + k * sys.Ts * x0_est.v;
    cv[k] = x0_est.v;
    for (int j = 0; j < k; ++j) {
      // x_k = A^k x0 + sum_j A^{k-1-j} B u_j.
      const int steps_after = k - 1 - j;
      Ps(k, j) = sys.B[0] + steps_after * sys.Ts * sys.B[1];
      Pv(k, j) = sys.B[1];
    }
  }

  qp::ConvexProgram p;
  p.n = nu;
  p.Q = 2.0 * Eigen::MatrixXd::Identity(nu, nu);  // min sum u^2 tie-break
  p.q = Eigen::VectorXd::Zero(nu);
  p.lb = Eigen::VectorXd::Constant(nu, lim.a_min);
  p.ub = Eigen::VectorXd::Constant(nu, lim.a_max);

  // Speed box for k = 1..T+1 and the terminal position constraint
  // s_{T+1} >= s_tl - w_min (O shrunk by D*W).
  const int m = 2 * (T + 1) + 1;
  p.A_in = Eigen::MatrixXd::Zero(m, nu);
  p.b_in = Eigen::VectorXd::Zero(m);
  int r = 0;
  for (int k = 1; k <= T + 1; ++k) {
    p.A_in.row(r) = Pv.row(k);
    p.b_in[r++] = lim.v_max - cv[k];
    p.A_in.row(r) = -Pv.row(k);
    p.b_in[r++] = cv[k];
  }
  p.A_in.row(r) = -Ps.row(T + 1);
  p.b_in[r] = cs[T + 1] - (s_tl - W.lo);

  qp::Solution sol = qp::solve(p);
  if (sol.status != qp::SolveStatus::Optimal) throw InitPlanInfeasible();

  InitPlan plan;
  plan.inputs.assign(sol.x.data(), sol.x.data() + nu);
  plan.states.reserve(T + 2);
  State x = x0_est;
  plan.states.push_back(x);
  for (int k = 0; k <= T; ++k) {
    x = step_true(x, plan.inputs[k], sys);
    plan.states.push_back(x);
  }
  return plan;
}

Dataset build_initial_dataset(const InitPlan& plan, const geom::AxisSegment& W, double s_tl) {
  Dataset d;
  const int T = static_cast<int>(plan.inputs.size()) - 1;
  for (int k = 0; k <= T; ++k) {
    const State& x = plan.states[k];
    const double u = plan.inputs[k];
    d.push_raw({x.s - s_tl, x.v, u, 0.0, 0});
    d.push_raw({x.s + W.lo - s_tl, x.v, u, 0.0, 0});
    d.push_raw({x.s + W.hi - s_tl, x.v, u, 0.0, 0});
  }
  return d;
}

void init_cost_to_go(Dataset* dataset, const InitPlan& plan, const geom::AxisSegment& W,
                     const EnergyModel& model) {
  const int T = static_cast<int>(plan.inputs.size()) - 1;
  std::vector<double> J(T + 2, 0.0);
  for (int k = T; k >= 0; --k) {
    // Worst case over the tube vertices. The tube only shifts position and
    // the stage cost ignores it, so the maximizer is any vertex; enumerate
    // anyway to follow the vertex-maximization construction.
    double worst = -1.0;
    for (double w : {W.lo, W.hi}) {
      const State vertex{plan.states[k].s + w, plan.states[k].v};
      worst = std::max(worst, model.stage_cost(vertex.v, plan.inputs[k]));
    }
    J[k] = worst + J[k + 1];
  }
  auto& rows = dataset->mutable_rows();
  for (size_t i = 0; i < rows.size(); ++i) rows[i].J = J[i / 3];
}

NoiseDiscretization discretize_terminal_noise(std::vector<double> samples,
                                              const geom::AxisSegment& support, int M) {
  if (M < 2) throw std::invalid_argument("discretize_terminal_noise: M >= 2");
  NoiseDiscretization nd;
  std::sort(samples.begin(), samples.end());

  nd.points.push_back(support.lo);
  for (int j = 1; j <= M - 2; ++j) {
    double pt;
    if (samples.empty()) {
      pt = support.lo + support.width() * j / (M - 1);
    } else {
      const double q = static_cast<double>(j) / (M - 1);
      const double idx = q * (samples.size() - 1);
      const size_t i0 = static_cast<size_t>(idx);
      const double frac = idx - i0;
      pt = samples[i0] + frac * (samples[std::min(i0 + 1, samples.size() - 1)] - samples[i0]);
    }
    nd.points.push_back(std::clamp(pt, support.lo, support.hi));
  }
  nd.points.push_back(support.hi);
  std::sort(nd.points.begin(), nd.points.end());

  const int n = static_cast<int>(nd.points.size());
  nd.weights.assign(n, 0.0);
  if (n == 2 || samples.empty()) {
    // All mass is tail mass; the extremes split it.
    nd.weights.assign(n, 0.0);
    nd.weights.front() = 0.5;
    nd.weights.back() = 0.5;
    if (n > 2) {
      // No recorded mass to bin: spread evenly instead.
      const double w = 1.0 / n;
      nd.weights.assign(n, w);
    }
    return nd;
  }
  // Interior points take the empirical mass of their Voronoi cell.
  double interior_mass = 0.0;
  for (int i = 1; i + 1 < n; ++i) {
    const double left = 0.5 * (nd.points[i - 1] + nd.points[i]);
    const double right = 0.5 * (nd.points[i] + nd.points[i + 1]);
    const auto lo = std::lower_bound(samples.begin(), samples.end(), left);
    const auto hi = std::lower_bound(samples.begin(), samples.end(), right);
    nd.weights[i] = static_cast<double>(hi - lo) / samples.size();
    interior_mass += nd.weights[i];
  }
  const double tail = std::max(0.0, 1.0 - interior_mass);
  nd.weights.front() += 0.5 * tail;
  nd.weights.back() += 0.5 * tail;
  double sum = 0.0;
  for (double w : nd.weights) sum += w;
  for (double& w : nd.weights) w /= sum;
  return nd;
}

std::vector<double> simulate_terminal_noise_samples(const NoiseModel& noise, double gain, int N,
                                                    int count, uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out;
  out.reserve(count);
  double delta = -noise.sample(rng);  // delta_s_0 = -w_0
  std::vector<double> window;
  double running = 0.0;
  for (int k = 0; out.size() < static_cast<size_t>(count); ++k) {
    const double w_next = noise.sample(rng);
    const double n_k = gain * (delta + w_next);
    delta = (1.0 - gain) * delta - gain * w_next;
    window.push_back(n_k);
    running += n_k;
    if (static_cast<int>(window.size()) > N) {
      running -= window[window.size() - N - 1];
    }
    if (static_cast<int>(window.size()) >= N) out.push_back(running);
  }
  return out;
}

void NoiseDiscretization::save_csv(const std::string& path, uint64_t seed) const {
  csv::Writer w(path, {"point", "weight", "seed"});
  for (size_t i = 0; i < points.size(); ++i) {
    w.row(std::vector<double>{points[i], weights[i], static_cast<double>(seed)});
  }
}

NoiseDiscretization NoiseDiscretization::load_csv(const std::string& path) {
  csv::Table t = csv::read(path);
  NoiseDiscretization nd;
  const int cp = t.column("point"), cw = t.column("weight");
  for (const auto& r : t.rows) {
    nd.points.push_back(r[cp]);
    nd.weights.push_back(r[cw]);
  }
  return nd;
}

ValueFunction::ValueFunction(const Dataset* data, const TargetSetO* target)
    : data_(data), target_(target) {
  rebuild();
}

void ValueFunction::rebuild() {
  points_.clear();
  costs_.clear();
  points_.reserve(data_->size() + target_->vertices.size());
  for (const auto& r : data_->rows()) {
    points_.emplace_back(r.s_shift, r.v);
    costs_.push_back(r.J);
  }
  for (const auto& v : target_->vertices) {
    points_.push_back(v);
    costs_.push_back(0.0);
  }
  domain_ = geom::Polygon::from_points(points_);
}

std::optional<double> ValueFunction::eval_shifted(const geom::Vec2& x) const {
  if (!domain_.contains(x, 1e-7)) return std::nullopt;
  qp::BlockSimplexProgram bp;
  bp.Qw.resize(0, 0);
  bp.qw.resize(0);
  bp.Gw.resize(0, 0);
  bp.hw.resize(0);
  qp::BlockSimplexProgram::Block blk;
  const int n = static_cast<int>(points_.size());
  blk.cost = Eigen::Map<const Eigen::VectorXd>(costs_.data(), n);
  blk.E.resize(3, n);
  for (int i = 0; i < n; ++i) {
    blk.E(0, i) = points_[i].x();
    blk.E(1, i) = points_[i].y();
    blk.E(2, i) = 1.0;
  }
  blk.F.resize(3, 0);
  blk.d.resize(3);
  blk.d << x.x(), x.y(), 1.0;
  bp.blocks.push_back(std::move(blk));
  qp::Solution s = qp::solve_block(bp);
  if (s.status != qp::SolveStatus::Optimal) return std::nullopt;
  return s.objective;
}

std::optional<double> ValueFunction::eval(const State& x, double s_tl) const {
  return eval_shifted(geom::Vec2(x.s - s_tl, x.v));
}

std::optional<double> update_cost_to_go(const DatasetRow& row, const ValueFunction& vf_prev,
                                        const NoiseDiscretization& nd, const EnergyModel& model,
                                        const SystemMatrices& sys) {
  const Eigen::Vector2d succ = sys.A * Eigen::Vector2d(row.s_shift, row.v) + sys.B * row.u;
  double expect = 0.0;
  for (size_t m = 0; m < nd.points.size(); ++m) {
    const geom::Vec2 pt = succ + nd.points[m] * Eigen::Vector2d(sys.D);
    auto v = vf_prev.eval_shifted(pt);
    if (!v) return std::nullopt;
    expect += nd.weights[m] * *v;
  }
  return model.stage_cost(row.v, row.u) + expect;
}

AugmentStats augment_dataset(Dataset* dataset, const std::vector<std::pair<State, double>>& pairs,
                             const Route& route, const ValueFunction& vf_prev,
                             const NoiseDiscretization& nd, const EnergyModel& model,
                             const SystemMatrices& sys, const Limits& lim) {
  AugmentStats stats;
  if (pairs.empty()) return stats;
  std::vector<DatasetRow> fresh;
  for (const auto& [x, u] : pairs) {
    auto l = route.nearest_upcoming(x.s);
    if (!l) {
      ++stats.skipped_past_route;
      continue;
    }
    if (x.v < -1e-9 || x.v > lim.v_max + 1e-9 || u < lim.a_min - 1e-9 || u > lim.a_max + 1e-9) {
      ++stats.skipped_bounds;
      continue;
    }
    DatasetRow row{x.s - route.lights[*l].position, x.v, u, 0.0, dataset->iteration() + 1};
    auto J = update_cost_to_go(row, vf_prev, nd, model, sys);
    if (!J) {
      ++stats.domain_misses;
      continue;
    }
    row.J = *J;
    fresh.push_back(row);
  }
  for (const auto& r : fresh) {
    dataset->append(r);
    ++stats.appended;
  }
  dataset->set_iteration(dataset->iteration() + 1);
  return stats;
}

geom::Polygon target_behind_light(const geom::AxisSegment& W, const Limits& lim) {
  using geom::Halfspace;
  using geom::Vec2;
  return geom::Polygon::halfspace_region({Halfspace(Vec2(1, 0), -W.hi),
                                          Halfspace(Vec2(0, 1), lim.v_max),
                                          Halfspace(Vec2(0, -1), 0.0)});
}

geom::Polygon target_past_light(const geom::AxisSegment& W, const Limits& lim) {
  using geom::Halfspace;
  using geom::Vec2;
  return geom::Polygon::halfspace_region({Halfspace(Vec2(-1, 0), W.lo),
                                          Halfspace(Vec2(0, 1), lim.v_max),
                                          Halfspace(Vec2(0, -1), 0.0)});
}

std::vector<geom::Polygon> robust_controllable_chain(const Dataset& data, int t,
                                                     const geom::Polygon& target_shifted,
                                                     const PrecedingTrack* lead,
                                                     const RcsParams& params,
                                                     const SystemMatrices& sys) {
  if (t < 0) throw std::invalid_argument("robust_controllable_chain: t < 0");
  auto shifted_collision = [&](int idx) -> geom::Halfspace {
    const double s_pv = lead->positions.at(idx);
    const double v_pv = lead->speeds.at(idx);
    geom::Halfspace h = collision_halfspace(s_pv, v_pv, params.d0, params.ttc);
    h.b -= h.a.x() * params.s_tl;  // absolute -> shifted frame
    return h;
  };

  std::vector<geom::Polygon> chain;
  chain.reserve(t + 1);
  geom::Polygon r0 = target_shifted;
  if (lead) r0 = r0.intersect(shifted_collision(t + params.horizon));
  chain.push_back(r0);

  const geom::AxisSegment step_noise = params.W.scaled(2.0 * params.gain);
  for (int p = 0; p < t; ++p) {
    if (chain.back().is_empty()) {
      chain.push_back(geom::Polygon::empty_set());
      continue;
    }
    const geom::Polygon tightened = chain.back().pontryagin_diff(step_noise);
    std::vector<geom::Vec2> kept;
    if (!tightened.is_empty()) {
      std::optional<geom::Halfspace> coll;
      if (lead) coll = shifted_collision(t + params.horizon - p - 1);
      for (const auto& row : data.rows()) {
        const Eigen::Vector2d x(row.s_shift, row.v);
        const Eigen::Vector2d next = sys.A * x + sys.B * row.u;
        if (!tightened.contains(next, 1e-9)) continue;
        if (coll && coll->slack(x) < -1e-9) continue;
        kept.emplace_back(x);
      }
    }
    chain.push_back(kept.empty() ? geom::Polygon::empty_set() : geom::Polygon::from_points(kept));
  }
  return chain;
}

geom::Polygon robust_controllable_set(const Dataset& data, int t,
                                      const geom::Polygon& target_shifted,
                                      const PrecedingTrack* lead, const RcsParams& params,
                                      const SystemMatrices& sys) {
  return robust_controllable_chain(data, t, target_shifted, lead, params, sys).back();
}

TerminalSets terminal_sets(std::optional<int> t_red, int t_green, const Dataset& data,
                           const PrecedingTrack* lead, const RcsParams& params,
                           const SystemMatrices& sys) {
  TerminalSets out;
  if (t_red) {
    out.stay_behind = robust_controllable_set(data, *t_red, target_behind_light(params.W, params.lim),
                                              lead, params, sys);
  }
  out.cross_by_deadline = robust_controllable_set(data, t_green,
                                                  target_past_light(params.W, params.lim), lead,
                                                  params, sys);
  return out;
}

}  // namespace ecodrive
