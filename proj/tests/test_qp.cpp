#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ecodrive/qp.hpp"
#include "ecodrive/rng.hpp"
#include "oracles.hpp"

using namespace ecodrive::qp;
using ecodrive::Rng;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

ConvexProgram random_feasible_qp(Rng& rng, int n_max = 12, int mi_max = 8, bool lp = false) {
  const int n = 2 + static_cast<int>(rng.next_u64() % (n_max - 1));
  const int me = static_cast<int>(rng.next_u64() % (n / 2 + 1));
  const int mi = 1 + static_cast<int>(rng.next_u64() % mi_max);

  ConvexProgram p;
  p.n = n;
  if (!lp) {
    MatrixXd m(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) m(i, j) = rng.uniform(-1, 1);
    }
    p.Q = m.transpose() * m + 0.1 * MatrixXd::Identity(n, n);
  }
  p.q = VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) p.q[i] = rng.uniform(-2, 2);

  // Interior point by construction keeps everything feasible.
  VectorXd x0(n);
  for (int i = 0; i < n; ++i) x0[i] = rng.uniform(-1, 1);

  p.A_eq.resize(me, n);
  p.b_eq.resize(me);
  for (int i = 0; i < me; ++i) {
    for (int j = 0; j < n; ++j) p.A_eq(i, j) = rng.uniform(-1, 1);
    p.b_eq[i] = p.A_eq.row(i).dot(x0);
  }
  p.A_in.resize(mi, n);
  p.b_in.resize(mi);
  for (int i = 0; i < mi; ++i) {
    for (int j = 0; j < n; ++j) p.A_in(i, j) = rng.uniform(-1, 1);
    p.b_in[i] = p.A_in.row(i).dot(x0) + rng.uniform(0.05, 2.0);
  }
  return p;
}

}  // namespace

TEST_CASE("analytic scalar QP") {
  // min x^2 s.t. x >= 1
  ConvexProgram p;
  p.n = 1;
  p.Q = MatrixXd::Constant(1, 1, 2.0);
  p.q = VectorXd::Zero(1);
  p.A_in = MatrixXd::Constant(1, 1, -1.0);
  p.b_in = VectorXd::Constant(1, -1.0);
  Solution s = solve(p);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.x[0] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(s.objective == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(s.kkt_residual <= 1e-6);
}

TEST_CASE("infeasible detection") {
  // min 0 s.t. x <= 0, x >= 1
  ConvexProgram p;
  p.n = 1;
  p.q = VectorXd::Zero(1);
  p.A_in.resize(2, 1);
  p.A_in << 1, -1;
  p.b_in.resize(2);
  p.b_in << 0, -1;
  CHECK(solve(p).status == SolveStatus::Infeasible);
}

TEST_CASE("malformed programs rejected") {
  ConvexProgram p;
  p.n = 2;
  p.q = VectorXd::Zero(2);
  p.A_in = MatrixXd::Ones(1, 3);  // wrong column count
  p.b_in = VectorXd::Zero(1);
  CHECK_THROWS_AS(solve(p), MalformedProgram);

  ConvexProgram bad;
  bad.n = 2;
  bad.q = VectorXd::Zero(2);
  bad.Q = MatrixXd::Zero(2, 2);
  bad.Q(0, 0) = -1.0;  // indefinite
  CHECK_THROWS_AS(solve(bad), MalformedProgram);
}

TEST_CASE("oracle: random QPs match active-set enumeration") {
  Rng rng(2024);
  int tested = 0;
  for (int trial = 0; trial < 100; ++trial) {
    ConvexProgram p = random_feasible_qp(rng);
    auto oracle = oracles::active_set_enumeration(p);
    REQUIRE(oracle.has_value());
    Solution s = solve(p);
    REQUIRE(s.status == SolveStatus::Optimal);
    const double denom = std::max(1.0, std::abs(*oracle));
    CHECK(std::abs(s.objective - *oracle) / denom <= 1e-5);
    ++tested;
  }
  CHECK(tested == 100);
}

TEST_CASE("oracle: 2-variable LPs match vertex enumeration") {
  Rng rng(55);
  for (int trial = 0; trial < 50; ++trial) {
    ConvexProgram p = random_feasible_qp(rng, 2, 6, /*lp=*/true);
    p.n = 2;
    // Box the problem so the LP is bounded and the oracle applies.
    p.A_eq.resize(0, 2);
    p.b_eq.resize(0);
    MatrixXd box(4, 2);
    box << 1, 0, -1, 0, 0, 1, 0, -1;
    VectorXd hbox(4);
    hbox << 20, 20, 20, 20;
    MatrixXd G(p.A_in.rows() + 4, 2);
    G << p.A_in, box;
    VectorXd h(p.b_in.size() + 4);
    h << p.b_in, hbox;
    p.A_in = G;
    p.b_in = h;
    auto oracle = oracles::lp2_vertex_enumeration(p);
    REQUIRE(oracle.has_value());
    Solution s = solve(p);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(std::abs(s.objective - *oracle) <= 1e-8 * std::max(1.0, std::abs(*oracle)));
  }
}

TEST_CASE("determinism: identical program, identical bytes") {
  Rng rng(7);
  ConvexProgram p = random_feasible_qp(rng);
  Solution a = solve(p);
  Solution b = solve(p);
  REQUIRE(a.x.size() == b.x.size());
  for (int i = 0; i < a.x.size(); ++i) CHECK(a.x[i] == b.x[i]);
  CHECK(a.objective == b.objective);
}

TEST_CASE("bounds folding") {
  // min (x-3)^2 with x <= 1
  ConvexProgram p;
  p.n = 1;
  p.Q = MatrixXd::Constant(1, 1, 2.0);
  p.q = VectorXd::Constant(1, -6.0);
  p.ub = VectorXd::Constant(1, 1.0);
  p.lb = VectorXd::Constant(1, -std::numeric_limits<double>::infinity());
  Solution s = solve(p);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.x[0] == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("block solver matches dense expansion") {
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const int nw = 3;
    const int M = 1 + static_cast<int>(rng.next_u64() % 3);
    BlockSimplexProgram bp;
    MatrixXd m(nw, nw);
    for (int i = 0; i < nw; ++i) {
      for (int j = 0; j < nw; ++j) m(i, j) = rng.uniform(-1, 1);
    }
    bp.Qw = m.transpose() * m + 0.2 * MatrixXd::Identity(nw, nw);
    bp.qw = VectorXd::Zero(nw);
    for (int i = 0; i < nw; ++i) bp.qw[i] = rng.uniform(-1, 1);
    bp.Gw.resize(2 * nw, nw);
    bp.Gw << MatrixXd::Identity(nw, nw), -MatrixXd::Identity(nw, nw);
    bp.hw = VectorXd::Constant(2 * nw, 2.0);

    for (int b = 0; b < M; ++b) {
      BlockSimplexProgram::Block blk;
      const int k = 4 + static_cast<int>(rng.next_u64() % 4);
      blk.cost.resize(k);
      for (int i = 0; i < k; ++i) blk.cost[i] = rng.uniform(0, 5);
      // Points in the plane plus the simplex row; target depends on w.
      blk.E.resize(3, k);
      for (int i = 0; i < k; ++i) {
        blk.E(0, i) = rng.uniform(-3, 3);
        blk.E(1, i) = rng.uniform(-3, 3);
        blk.E(2, i) = 1.0;
      }
      blk.F = MatrixXd::Zero(3, nw);
      blk.F(0, 0) = -0.1;  // target tracks w mildly
      blk.F(1, 1) = -0.1;
      blk.d = VectorXd::Zero(3);
      // Keep the equality satisfiable: centroid of the points.
      blk.d[0] = blk.E.row(0).mean();
      blk.d[1] = blk.E.row(1).mean();
      blk.d[2] = 1.0;
      bp.blocks.push_back(blk);
    }

    Solution dense = solve(expand(bp));
    Solution block = solve_block(bp);
    REQUIRE(dense.status == SolveStatus::Optimal);
    REQUIRE(block.status == SolveStatus::Optimal);
    CHECK(std::abs(dense.objective - block.objective) /
              std::max(1.0, std::abs(dense.objective)) <=
          1e-5);
  }
}

TEST_CASE("block solver: plain value-function LP (no core)") {
  // min J l s.t. X l = x, 1'l = 1, l >= 0 — interpolation of three points.
  BlockSimplexProgram bp;
  bp.Qw.resize(0, 0);
  bp.qw.resize(0);
  bp.Gw.resize(0, 0);
  bp.hw.resize(0);
  BlockSimplexProgram::Block blk;
  blk.cost.resize(3);
  blk.cost << 10.0, 2.0, 6.0;
  blk.E.resize(3, 3);
  blk.E << 0.0, 1.0, 2.0,   // s coordinates
           0.0, 0.0, 0.0,   // v coordinates
           1.0, 1.0, 1.0;   // simplex
  blk.F.resize(3, 0);
  blk.d.resize(3);
  blk.d << 1.5, 0.0, 1.0;
  bp.blocks.push_back(blk);
  Solution s = solve_block(bp);
  REQUIRE(s.status == SolveStatus::Optimal);
  // Lower envelope at s=1.5 interpolates (1,2) and (2,6): value 4.
  CHECK(s.objective == doctest::Approx(4.0).epsilon(1e-6));
}
