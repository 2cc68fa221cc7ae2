#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace ecodrive::qp {

struct MalformedProgram : std::runtime_error {
  explicit MalformedProgram(const std::string& what) : std::runtime_error(what) {}
};

/// Convex QP/LP in standard form:
///   min 1/2 x'Qx + q'x
///   s.t. A_eq x = b_eq,  A_in x <= b_in,  lb <= x <= ub (optional)
/// Q symmetric PSD (min eigenvalue >= -1e-8); Q may be empty for an LP.
struct ConvexProgram {
  int n = 0;
  Eigen::MatrixXd Q;
  Eigen::VectorXd q;
  Eigen::MatrixXd A_eq;
  Eigen::VectorXd b_eq;
  Eigen::MatrixXd A_in;
  Eigen::VectorXd b_in;
  Eigen::VectorXd lb;  // size 0 or n; +-inf entries allowed
  Eigen::VectorXd ub;

  void validate() const;  // throws MalformedProgram
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, MaxIter };

struct Solution {
  SolveStatus status = SolveStatus::MaxIter;
  Eigen::VectorXd x;
  double objective = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;
};

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Unbounded: return "Unbounded";
    default: return "MaxIter";
  }
}

/// Dense primal-dual interior point (Mehrotra predictor-corrector),
/// iteration cap 500, deterministic. Constraint rows and the cost are
/// rescaled to unit infinity norm before iterating; tolerances apply to the
/// scaled residuals.
Solution solve(const ConvexProgram& p);

/// Program with simplex-multiplier blocks coupled to a small core:
///   min 1/2 w'Qw w + qw'w + sum_m c_m' l_m
///   s.t. Gw w <= hw
///        E_m l_m + F_m w = d_m,   l_m >= 0
/// This is the unified MPC shape: w holds inputs and the slack, each l_m is
/// the convex-multiplier vector of one discretization point. Solved by the
/// same interior-point iteration with per-block elimination, so cost per
/// iteration is linear in the number of multiplier rows.
struct BlockSimplexProgram {
  Eigen::MatrixXd Qw;
  Eigen::VectorXd qw;
  Eigen::MatrixXd Gw;
  Eigen::VectorXd hw;
  struct Block {
    Eigen::VectorXd cost;  // c_m
    Eigen::MatrixXd E;     // rows x n_lambda
    Eigen::MatrixXd F;     // rows x n_w
    Eigen::VectorXd d;
  };
  std::vector<Block> blocks;

  int n_w() const { return static_cast<int>(qw.size()); }
  int n_total() const {
    int n = n_w();
    for (const auto& b : blocks) n += static_cast<int>(b.cost.size());
    return n;
  }
};

/// Solution layout: x = [w; l_1; ...; l_M].
Solution solve_block(const BlockSimplexProgram& p);

/// Expand a block program into the equivalent dense ConvexProgram
/// (testing hook for cross-checking the two solve paths).
ConvexProgram expand(const BlockSimplexProgram& p);

}  // namespace ecodrive::qp
