#pragma once

// Test-only oracles, kept independent of the implementation paths they check.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "ecodrive/geometry.hpp"
#include "ecodrive/qp.hpp"
#include "ecodrive/rng.hpp"

namespace oracles {

using ecodrive::geom::AxisSegment;
using ecodrive::geom::Polygon;
using ecodrive::geom::Vec2;

// 1-D slice of a polygon along the position axis at a fixed speed:
// interval of positions {s : (s, v) in P}, derived straight from the
// halfspace inequalities (independent of vertex bookkeeping).
inline std::optional<std::pair<double, double>> position_slice(const Polygon& p, double v,
                                                               double tol = 1e-9) {
  if (p.is_empty()) return std::nullopt;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (const auto& h : p.halfspaces()) {
    const double rhs = h.b - h.a.y() * v;
    if (std::abs(h.a.x()) <= 1e-14) {
      if (rhs < -tol) return std::nullopt;
      continue;
    }
    if (h.a.x() > 0) {
      hi = std::min(hi, rhs / h.a.x());
    } else {
      lo = std::max(lo, rhs / h.a.x());
    }
  }
  if (lo > hi + tol) return std::nullopt;
  return std::make_pair(lo, hi);
}

// x in P (+) S  <=>  the interval [x.s - hi, x.s - lo] meets the slice of P
// at x.v (S acts on the position axis only).
inline bool minkowski_member(const Polygon& p, const AxisSegment& s, const Vec2& x,
                             double tol = 1e-9) {
  auto slice = position_slice(p, x.y(), tol);
  if (!slice) return false;
  return x.x() - s.lo >= slice->first - tol && x.x() - s.hi <= slice->second + tol;
}

// x in P (-) S  <=>  x + w e in P for both segment endpoints (convexity).
inline bool pontryagin_member(const Polygon& p, const AxisSegment& s, const Vec2& x,
                              double tol = 1e-9) {
  return p.contains(x + Vec2(s.lo, 0), tol) && p.contains(x + Vec2(s.hi, 0), tol);
}

// Brute-force QP oracle: enumerate active sets over the inequality rows,
// solve the equality KKT system for each, keep primal/dual feasible
// candidates, return the best objective. Dense and exponential; use only
// for small programs.
inline std::optional<double> active_set_enumeration(const ecodrive::qp::ConvexProgram& prog,
                                                    Eigen::VectorXd* arg = nullptr) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  const int n = prog.n;
  MatrixXd G = prog.A_in;
  VectorXd h = prog.b_in;
  // Fold explicit bounds into rows.
  if (prog.lb.size() == n) {
    for (int i = 0; i < n; ++i) {
      if (std::isfinite(prog.lb[i])) {
        G.conservativeResize(G.rows() + 1, n);
        G.row(G.rows() - 1).setZero();
        G(G.rows() - 1, i) = -1.0;
        h.conservativeResize(h.size() + 1);
        h[h.size() - 1] = -prog.lb[i];
      }
    }
  }
  if (prog.ub.size() == n) {
    for (int i = 0; i < n; ++i) {
      if (std::isfinite(prog.ub[i])) {
        G.conservativeResize(G.rows() + 1, n);
        G.row(G.rows() - 1).setZero();
        G(G.rows() - 1, i) = 1.0;
        h.conservativeResize(h.size() + 1);
        h[h.size() - 1] = prog.ub[i];
      }
    }
  }
  const int m = static_cast<int>(G.rows());
  const int me = static_cast<int>(prog.A_eq.rows());
  MatrixXd Q = prog.Q.size() ? prog.Q : MatrixXd::Zero(n, n);

  double best = std::numeric_limits<double>::infinity();
  VectorXd best_x;
  for (uint32_t mask = 0; mask < (1u << m); ++mask) {
    std::vector<int> act;
    for (int i = 0; i < m; ++i) {
      if (mask & (1u << i)) act.push_back(i);
    }
    const int ma = static_cast<int>(act.size());
    const int dim = n + me + ma;
    MatrixXd K = MatrixXd::Zero(dim, dim);
    VectorXd rhs = VectorXd::Zero(dim);
    K.topLeftCorner(n, n) = Q;
    rhs.head(n) = -prog.q;
    if (me) {
      K.block(n, 0, me, n) = prog.A_eq;
      K.block(0, n, n, me) = prog.A_eq.transpose();
      rhs.segment(n, me) = prog.b_eq;
    }
    for (int i = 0; i < ma; ++i) {
      K.block(n + me + i, 0, 1, n) = G.row(act[i]);
      K.block(0, n + me + i, n, 1) = G.row(act[i]).transpose();
      rhs[n + me + i] = h[act[i]];
    }
    Eigen::FullPivLU<MatrixXd> lu(K);
    if (!lu.isInvertible()) continue;
    VectorXd sol = lu.solve(rhs);
    VectorXd x = sol.head(n);
    VectorXd mu = sol.tail(ma);
    bool ok = true;
    for (int i = 0; i < m && ok; ++i) {
      if (G.row(i).dot(x) > h[i] + 1e-7) ok = false;
    }
    for (int i = 0; i < ma && ok; ++i) {
      if (mu[i] < -1e-7) ok = false;
    }
    if (!ok) continue;
    const double obj = 0.5 * x.dot(Q * x) + prog.q.dot(x);
    if (obj < best) {
      best = obj;
      best_x = x;
    }
  }
  if (!std::isfinite(best)) return std::nullopt;
  if (arg) *arg = best_x;
  return best;
}

// Scenario-tree robust-steering certificate. Decides whether a (shifted)
// state can be driven into `target` in t steps when the adversary picks the
// lumped noise from the extremes of 2L*W each step and the control may react
// to the noise history. Checks the speed box, input box, and per-stage
// collision halfspaces exactly as the backward recursion indexes them.
// Builds one feasibility LP over the 2^t - 1 tree inputs.
struct SteeringProblem {
  Eigen::Matrix2d A;
  Eigen::Vector2d B;
  Eigen::Vector2d D;
  double n_lo = 0.0, n_hi = 0.0;  // extremes of 2L*W
  double v_max = 20.0, a_min = -3.0, a_max = 2.5;
  const ecodrive::geom::Polygon* target = nullptr;           // shifted frame
  std::vector<ecodrive::geom::Halfspace> stage_collision;    // index d = 0..t, shifted; empty = none
};

inline bool tree_certificate(const Vec2& x0, int t, const SteeringProblem& sp) {
  if (t == 0) {
    if (!sp.stage_collision.empty() && sp.stage_collision.at(0).slack(x0) < -1e-7) return false;
    return sp.target->contains(x0, 1e-7);
  }
  const int n_nodes = (1 << t) - 1;  // inputs, heap order: node i children 2i+1, 2i+2
  ecodrive::qp::ConvexProgram p;
  p.n = n_nodes;
  p.q = Eigen::VectorXd::Zero(n_nodes);
  p.lb = Eigen::VectorXd::Constant(n_nodes, sp.a_min);
  p.ub = Eigen::VectorXd::Constant(n_nodes, sp.a_max);

  // State at a node is affine in the inputs along its root path plus the
  // accumulated noise (A D = D keeps noise on the position axis).
  struct NodeState {
    Eigen::Matrix<double, 2, Eigen::Dynamic> coef;
    Eigen::Vector2d cst;
  };
  std::vector<std::vector<std::pair<NodeState, int>>> levels;  // (state, node index or -1 at leaves)
  NodeState root;
  root.coef = Eigen::Matrix<double, 2, Eigen::Dynamic>::Zero(2, n_nodes);
  root.cst = x0;
  levels.push_back({{root, 0}});

  std::vector<Eigen::MatrixXd> rows;
  std::vector<double> rhs;
  auto add_row = [&](const Eigen::RowVectorXd& a, double b) {
    rows.push_back(a);
    rhs.push_back(b);
  };
  auto add_state_rows = [&](const NodeState& st, int depth) {
    // Speed box.
    add_row(st.coef.row(1), sp.v_max - st.cst[1]);
    add_row(-st.coef.row(1), st.cst[1]);
    if (!sp.stage_collision.empty()) {
      const auto& h = sp.stage_collision.at(depth);
      add_row(h.a.transpose() * st.coef, h.b - h.a.dot(st.cst));
    }
    if (depth == t) {
      for (const auto& h : sp.target->halfspaces()) {
        add_row(h.a.transpose() * st.coef, h.b - h.a.dot(st.cst));
      }
    }
  };
  // Root state is given; only collision/target rows matter at depth 0 and
  // they are constant checks.
  if (!sp.stage_collision.empty() && sp.stage_collision.at(0).slack(x0) < -1e-7) return false;
  if (x0[1] < -1e-7 || x0[1] > sp.v_max + 1e-7) return false;

  int next_node = 1;
  for (int depth = 1; depth <= t; ++depth) {
    std::vector<std::pair<NodeState, int>> level;
    for (const auto& [st, node] : levels.back()) {
      for (double n : {sp.n_lo, sp.n_hi}) {
        NodeState child;
        child.coef = sp.A * st.coef;
        child.coef.col(node) += sp.B;
        child.cst = sp.A * st.cst + sp.D * n;
        const int child_node = depth < t ? next_node++ : -1;
        add_state_rows(child, depth);
        level.emplace_back(child, child_node);
      }
    }
    // Assign fresh input indices breadth-first (already done via next_node).
    levels.push_back(std::move(level));
  }

  p.A_in.resize(static_cast<int>(rows.size()), n_nodes);
  p.b_in.resize(static_cast<int>(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    p.A_in.row(static_cast<int>(i)) = rows[i];
    p.b_in[static_cast<int>(i)] = rhs[i];
  }
  return ecodrive::qp::solve(p).status == ecodrive::qp::SolveStatus::Optimal;
}

// 2-variable LP oracle via vertex enumeration of the constraint set.
inline std::optional<double> lp2_vertex_enumeration(const ecodrive::qp::ConvexProgram& prog) {
  using Eigen::VectorXd;
  if (prog.n != 2 || prog.A_eq.rows() > 0) return std::nullopt;
  std::vector<ecodrive::geom::Halfspace> hs;
  for (int i = 0; i < prog.A_in.rows(); ++i) {
    hs.emplace_back(Vec2(prog.A_in(i, 0), prog.A_in(i, 1)), prog.b_in[i]);
  }
  Polygon feas = Polygon::from_halfspaces(hs);
  if (feas.is_empty() || !feas.bounded()) return std::nullopt;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& v : feas.vertices()) best = std::min(best, prog.q[0] * v.x() + prog.q[1] * v.y());
  return best;
}

}  // namespace oracles
