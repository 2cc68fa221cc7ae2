#include "ecodrive/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ecodrive::qp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr int kMaxIter = 500;
constexpr double kFeasTol = 1e-9;   // scaled primal/dual residual target
constexpr double kMuTol = 1e-10;    // complementarity target
constexpr double kReg = 1e-9;       // static KKT regularization

double max_step(const VectorXd& v, const VectorXd& dv) {
  double a = 1.0;
  for (int i = 0; i < v.size(); ++i) {
    if (dv[i] < 0) a = std::min(a, -v[i] / dv[i]);
  }
  return a;
}

struct Standard {
  // min 1/2 x'Qx + q'x  s.t.  A x = b,  G x <= h
  MatrixXd Q, A, G;
  VectorXd q, b, h;
  double cost_scale = 1.0;
};

Standard to_standard(const ConvexProgram& p) {
  Standard s;
  const int n = p.n;
  s.Q = p.Q.size() ? p.Q : MatrixXd::Zero(n, n);
  s.q = p.q;
  s.A = p.A_eq;
  s.b = p.b_eq;

  int extra = 0;
  if (p.lb.size() == n) {
    for (int i = 0; i < n; ++i) extra += std::isfinite(p.lb[i]) ? 1 : 0;
  }
  if (p.ub.size() == n) {
    for (int i = 0; i < n; ++i) extra += std::isfinite(p.ub[i]) ? 1 : 0;
  }
  const int mi = static_cast<int>(p.A_in.rows());
  s.G.resize(mi + extra, n);
  s.h.resize(mi + extra);
  if (mi) {
    s.G.topRows(mi) = p.A_in;
    s.h.head(mi) = p.b_in;
  }
  int r = mi;
  if (p.lb.size() == n) {
    for (int i = 0; i < n; ++i) {
      if (!std::isfinite(p.lb[i])) continue;
      s.G.row(r).setZero();
      s.G(r, i) = -1.0;
      s.h[r++] = -p.lb[i];
    }
  }
  if (p.ub.size() == n) {
    for (int i = 0; i < n; ++i) {
      if (!std::isfinite(p.ub[i])) continue;
      s.G.row(r).setZero();
      s.G(r, i) = 1.0;
      s.h[r++] = p.ub[i];
    }
  }

  // Row equilibration to unit infinity norm; cost scaled by its own magnitude.
  for (int i = 0; i < s.A.rows(); ++i) {
    const double nrm = s.A.row(i).lpNorm<Eigen::Infinity>();
    if (nrm > 1e-14) {
      s.A.row(i) /= nrm;
      s.b[i] /= nrm;
    }
  }
  for (int i = 0; i < s.G.rows(); ++i) {
    const double nrm = s.G.row(i).lpNorm<Eigen::Infinity>();
    if (nrm > 1e-14) {
      s.G.row(i) /= nrm;
      s.h[i] /= nrm;
    }
  }
  double cs = std::max(1.0, s.q.lpNorm<Eigen::Infinity>());
  if (s.Q.size()) cs = std::max(cs, s.Q.cwiseAbs().maxCoeff());
  s.Q /= cs;
  s.q /= cs;
  s.cost_scale = cs;
  return s;
}

struct IpmResult {
  SolveStatus status = SolveStatus::MaxIter;
  VectorXd x;
  double kkt = 0.0;
  int iters = 0;
  double primal_inf = 0.0;  // scaled primal residual at exit
};

// Mehrotra predictor-corrector on the standard form. Deterministic: fixed
// starting point, no randomized choices.
IpmResult ipm(const Standard& s) {
  const int n = static_cast<int>(s.q.size());
  const int me = static_cast<int>(s.A.rows());
  const int mi = static_cast<int>(s.G.rows());

  IpmResult out;
  VectorXd x = VectorXd::Zero(n);
  VectorXd y = VectorXd::Zero(me);

  if (me > 0) {
    // Least-norm equality-consistent start.
    MatrixXd K = MatrixXd::Zero(n + me, n + me);
    K.topLeftCorner(n, n) = MatrixXd::Identity(n, n);
    K.topRightCorner(n, me) = s.A.transpose();
    K.bottomLeftCorner(me, n) = s.A;
    K.bottomRightCorner(me, me) = -kReg * MatrixXd::Identity(me, me);
    VectorXd rhs = VectorXd::Zero(n + me);
    rhs.tail(me) = s.b;
    x = Eigen::PartialPivLU<MatrixXd>(K).solve(rhs).head(n);
    const double eq_resid = (s.A * x - s.b).lpNorm<Eigen::Infinity>();
    if (eq_resid > 1e-7 * (1.0 + s.b.lpNorm<Eigen::Infinity>())) {
      out.status = SolveStatus::Infeasible;
      out.x = x;
      return out;
    }
  }

  if (mi == 0) {
    // Pure equality QP: one KKT solve.
    MatrixXd K = MatrixXd::Zero(n + me, n + me);
    K.topLeftCorner(n, n) = s.Q + kReg * MatrixXd::Identity(n, n);
    if (me) {
      K.topRightCorner(n, me) = s.A.transpose();
      K.bottomLeftCorner(me, n) = s.A;
      K.bottomRightCorner(me, me) = -kReg * MatrixXd::Identity(me, me);
    }
    VectorXd rhs(n + me);
    rhs.head(n) = -s.q;
    if (me) rhs.tail(me) = s.b;
    VectorXd sol = Eigen::PartialPivLU<MatrixXd>(K).solve(rhs);
    out.x = sol.head(n);
    const double rd = (s.Q * out.x + s.q + (me ? VectorXd(s.A.transpose() * sol.tail(me))
                                               : VectorXd(VectorXd::Zero(n))))
                          .lpNorm<Eigen::Infinity>();
    out.kkt = rd;
    out.status = rd < 1e-6 ? SolveStatus::Optimal : SolveStatus::Unbounded;
    return out;
  }

  VectorXd sl(mi), z(mi);
  for (int i = 0; i < mi; ++i) {
    const double gap = s.h[i] - s.G.row(i).dot(x);
    sl[i] = std::max(1.0, std::abs(gap));
    z[i] = 1.0;
  }

  const double bn = 1.0 + s.b.lpNorm<Eigen::Infinity>();
  const double hn = 1.0 + s.h.lpNorm<Eigen::Infinity>();
  const double qn = 1.0 + s.q.lpNorm<Eigen::Infinity>();

  for (int iter = 0; iter < kMaxIter; ++iter) {
    out.iters = iter;
    const VectorXd r_d = s.Q * x + s.q + s.G.transpose() * z +
                         (me ? VectorXd(s.A.transpose() * y) : VectorXd(VectorXd::Zero(n)));
    const VectorXd r_p = me ? VectorXd(s.A * x - s.b) : VectorXd();
    const VectorXd r_g = s.G * x + sl - s.h;
    const double mu = sl.dot(z) / mi;

    const double pres = std::max(me ? r_p.lpNorm<Eigen::Infinity>() / bn : 0.0,
                                 r_g.lpNorm<Eigen::Infinity>() / hn);
    const double dres = r_d.lpNorm<Eigen::Infinity>() / qn;
    out.kkt = std::max({pres, dres, mu});
    out.primal_inf = pres;
    if (pres < kFeasTol && dres < kFeasTol && mu < kMuTol) {
      out.status = SolveStatus::Optimal;
      out.x = x;
      return out;
    }
    // Unboundedness: cost diverging while staying (nearly) feasible.
    const double obj = 0.5 * x.dot(s.Q * x) + s.q.dot(x);
    if (obj < -1e13 && pres < 1e-6) {
      out.status = SolveStatus::Unbounded;
      out.x = x;
      return out;
    }
    if (z.lpNorm<Eigen::Infinity>() > 1e12 || (me && y.lpNorm<Eigen::Infinity>() > 1e12)) {
      break;  // dual blow-up, classify below
    }

    const VectorXd w = z.cwiseQuotient(sl);  // diag weights
    MatrixXd K = MatrixXd::Zero(n + me, n + me);
    K.topLeftCorner(n, n) =
        s.Q + s.G.transpose() * w.asDiagonal() * s.G + kReg * MatrixXd::Identity(n, n);
    if (me) {
      K.topRightCorner(n, me) = s.A.transpose();
      K.bottomLeftCorner(me, n) = s.A;
      K.bottomRightCorner(me, me) = -kReg * MatrixXd::Identity(me, me);
    }
    Eigen::PartialPivLU<MatrixXd> lu(K);

    auto solve_dir = [&](const VectorXd& comp_rhs, VectorXd* dx, VectorXd* dy, VectorXd* dsl,
                         VectorXd* dz) {
      // comp_rhs is the complementarity right-hand side (Z ds + S dz = rc).
      VectorXd rhs(n + me);
      rhs.head(n) = -r_d - s.G.transpose() *
                               (comp_rhs.cwiseQuotient(sl) + w.cwiseProduct(r_g));
      if (me) rhs.tail(me) = -r_p;
      VectorXd sol = lu.solve(rhs);
      *dx = sol.head(n);
      if (me) *dy = sol.tail(me);
      *dsl = -r_g - s.G * (*dx);
      *dz = (comp_rhs - z.cwiseProduct(*dsl)).cwiseQuotient(sl);
    };

    // Affine predictor.
    VectorXd dx_a, dy_a, ds_a, dz_a;
    solve_dir(-sl.cwiseProduct(z), &dx_a, &dy_a, &ds_a, &dz_a);
    const double a_aff = std::min(max_step(sl, ds_a), max_step(z, dz_a));
    const double mu_aff = (sl + a_aff * ds_a).dot(z + a_aff * dz_a) / mi;
    const double sigma = std::pow(std::max(0.0, mu_aff / mu), 3.0);

    // Corrector.
    VectorXd comp = -sl.cwiseProduct(z) - ds_a.cwiseProduct(dz_a) +
                    VectorXd::Constant(mi, sigma * mu);
    VectorXd dx, dy, dsl, dz;
    solve_dir(comp, &dx, &dy, &dsl, &dz);

    const double alpha = 0.995 * std::min(max_step(sl, dsl), max_step(z, dz));
    x += alpha * dx;
    if (me) y += alpha * dy;
    sl += alpha * dsl;
    z += alpha * dz;
  }
  out.x = x;
  out.status = SolveStatus::MaxIter;
  return out;
}

// Phase-1 elastic LP used only to classify a failed solve:
//   min 1't  s.t.  A x = b,  G x - t <= h,  t >= 0.
bool phase1_infeasible(const Standard& s) {
  const int n = static_cast<int>(s.q.size());
  const int mi = static_cast<int>(s.G.rows());
  Standard p1;
  p1.Q = MatrixXd::Zero(n + mi, n + mi);
  p1.q = VectorXd::Zero(n + mi);
  p1.q.tail(mi).setOnes();
  p1.A.resize(s.A.rows(), n + mi);
  if (s.A.rows()) {
    p1.A << s.A, MatrixXd::Zero(s.A.rows(), mi);
  }
  p1.b = s.b;
  p1.G.resize(2 * mi, n + mi);
  p1.G << s.G, -MatrixXd::Identity(mi, mi), MatrixXd::Zero(mi, n), -MatrixXd::Identity(mi, mi);
  p1.h.resize(2 * mi);
  p1.h << s.h, VectorXd::Zero(mi);
  IpmResult r = ipm(p1);
  if (r.status != SolveStatus::Optimal) return false;  // cannot certify
  const double viol = r.x.tail(mi).maxCoeff();
  return viol > 1e-6 * (1.0 + s.h.lpNorm<Eigen::Infinity>());
}

}  // namespace

void ConvexProgram::validate() const {
  if (n <= 0) throw MalformedProgram("n must be positive");
  auto dim = [&](const MatrixXd& m, const VectorXd& v, const char* what) {
    if (m.rows() != v.size()) throw MalformedProgram(std::string(what) + ": rows/rhs mismatch");
    if (m.rows() > 0 && m.cols() != n) throw MalformedProgram(std::string(what) + ": cols != n");
  };
  dim(A_eq, b_eq, "A_eq");
  dim(A_in, b_in, "A_in");
  if (q.size() != n) throw MalformedProgram("q: size != n");
  if (Q.size()) {
    if (Q.rows() != n || Q.cols() != n) throw MalformedProgram("Q: not n x n");
    if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, Q.cwiseAbs().maxCoeff()))
      throw MalformedProgram("Q: not symmetric");
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(Q, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-8 * std::max(1.0, Q.cwiseAbs().maxCoeff()))
      throw MalformedProgram("Q: not PSD within tolerance");
  }
  if (lb.size() != 0 && lb.size() != n) throw MalformedProgram("lb: size != n");
  if (ub.size() != 0 && ub.size() != n) throw MalformedProgram("ub: size != n");
}

Solution solve(const ConvexProgram& p) {
  p.validate();
  Standard s = to_standard(p);
  IpmResult r = ipm(s);

  Solution sol;
  sol.iterations = r.iters;
  sol.x = r.x;
  sol.kkt_residual = r.kkt;
  if (r.status == SolveStatus::MaxIter ||
      (r.status == SolveStatus::Optimal && r.primal_inf > kFeasTol)) {
    // Distinguish "hard problem" from "no feasible point".
    if (phase1_infeasible(s)) {
      sol.status = SolveStatus::Infeasible;
      return sol;
    }
  }
  sol.status = r.status;
  if (sol.x.size() == p.n) {
    const MatrixXd& Q = p.Q.size() ? p.Q : MatrixXd();
    sol.objective = p.q.dot(sol.x) + (Q.size() ? 0.5 * sol.x.dot(Q * sol.x) : 0.0);
  }
  return sol;
}

// ---------------------------------------------------------------------------
// Block-simplex path
// ---------------------------------------------------------------------------

ConvexProgram expand(const BlockSimplexProgram& p) {
  const int nw = p.n_w();
  const int n = p.n_total();
  ConvexProgram c;
  c.n = n;
  c.Q = MatrixXd::Zero(n, n);
  c.Q.topLeftCorner(nw, nw) = p.Qw;
  c.q = VectorXd::Zero(n);
  c.q.head(nw) = p.qw;

  int me = 0, nl = 0;
  for (const auto& b : p.blocks) {
    me += static_cast<int>(b.E.rows());
    nl += static_cast<int>(b.cost.size());
  }
  c.A_eq = MatrixXd::Zero(me, n);
  c.b_eq = VectorXd::Zero(me);
  c.A_in = MatrixXd::Zero(p.Gw.rows() + nl, n);
  c.b_in = VectorXd::Zero(p.Gw.rows() + nl);
  if (p.Gw.rows()) {
    c.A_in.topLeftCorner(p.Gw.rows(), nw) = p.Gw;
    c.b_in.head(p.Gw.rows()) = p.hw;
  }
  int er = 0, col = nw, ir = static_cast<int>(p.Gw.rows());
  for (const auto& b : p.blocks) {
    const int k = static_cast<int>(b.cost.size());
    const int rows = static_cast<int>(b.E.rows());
    c.q.segment(col, k) = b.cost;
    c.A_eq.block(er, col, rows, k) = b.E;
    c.A_eq.block(er, 0, rows, nw) = b.F;
    c.b_eq.segment(er, rows) = b.d;
    c.A_in.block(ir, col, k, k) = -MatrixXd::Identity(k, k);
    er += rows;
    ir += k;
    col += k;
  }
  return c;
}

Solution solve_block(const BlockSimplexProgram& p) {
  const int nw = p.n_w();
  const int mw = static_cast<int>(p.Gw.rows());
  const int M = static_cast<int>(p.blocks.size());

  Solution out;
  VectorXd w = VectorXd::Zero(nw);
  VectorXd sw(mw), zw(mw);
  for (int i = 0; i < mw; ++i) {
    sw[i] = std::max(1.0, std::abs(p.hw[i]));
    zw[i] = 1.0;
  }
  std::vector<VectorXd> lam(M), zl(M), yb(M);
  for (int m = 0; m < M; ++m) {
    const int k = static_cast<int>(p.blocks[m].cost.size());
    lam[m] = VectorXd::Constant(k, 1.0 / std::max(1, k));
    zl[m] = VectorXd::Ones(k);
    yb[m] = VectorXd::Zero(p.blocks[m].E.rows());
  }

  int total_ineq = mw;
  for (int m = 0; m < M; ++m) total_ineq += static_cast<int>(lam[m].size());

  double scale = std::max(1.0, p.qw.lpNorm<Eigen::Infinity>());
  for (const auto& b : p.blocks) {
    if (b.cost.size()) scale = std::max(scale, b.cost.lpNorm<Eigen::Infinity>());
  }
  if (p.Qw.size()) scale = std::max(scale, p.Qw.cwiseAbs().maxCoeff());
  const MatrixXd Qw = p.Qw / scale;
  const VectorXd qw = p.qw / scale;

  const double hn = 1.0 + (mw ? p.hw.lpNorm<Eigen::Infinity>() : 0.0);
  double dn = 1.0;
  for (const auto& b : p.blocks) dn = std::max(dn, 1.0 + b.d.lpNorm<Eigen::Infinity>());

  for (int iter = 0; iter < kMaxIter; ++iter) {
    out.iterations = iter;
    // Residuals.
    VectorXd r_w = Qw * w + qw;
    if (mw) r_w += p.Gw.transpose() * zw;
    for (int m = 0; m < M; ++m) r_w += p.blocks[m].F.transpose() * yb[m];
    VectorXd r_gw = mw ? VectorXd(p.Gw * w + sw - p.hw) : VectorXd();
    double pres = mw ? r_gw.lpNorm<Eigen::Infinity>() / hn : 0.0;
    double dres = r_w.lpNorm<Eigen::Infinity>();
    double gap = mw ? sw.dot(zw) : 0.0;
    std::vector<VectorXd> r_l(M), r_pm(M);
    for (int m = 0; m < M; ++m) {
      const auto& b = p.blocks[m];
      r_l[m] = b.cost / scale + b.E.transpose() * yb[m] - zl[m];
      r_pm[m] = b.E * lam[m] + b.F * w - b.d;
      pres = std::max(pres, r_pm[m].lpNorm<Eigen::Infinity>() / dn);
      dres = std::max(dres, r_l[m].lpNorm<Eigen::Infinity>());
      gap += lam[m].dot(zl[m]);
    }
    const double mu = gap / std::max(1, total_ineq);
    out.kkt_residual = std::max({pres, dres, mu});
    if (pres < kFeasTol && dres < 1e-8 && mu < kMuTol) {
      out.status = SolveStatus::Optimal;
      break;
    }
    double dual_mag = mw ? zw.lpNorm<Eigen::Infinity>() : 0.0;
    for (int m = 0; m < M; ++m) {
      dual_mag = std::max(dual_mag, yb[m].lpNorm<Eigen::Infinity>());
    }
    if (dual_mag > 1e11) {
      out.status = SolveStatus::Infeasible;  // equality system unservable
      break;
    }

    // Per-block elimination pieces.
    const VectorXd Ww = mw ? VectorXd(zw.cwiseQuotient(sw)) : VectorXd();
    std::vector<VectorXd> theta_inv(M);
    std::vector<Eigen::LDLT<MatrixXd>> S_ldlt(M);
    MatrixXd Hw = Qw + kReg * MatrixXd::Identity(nw, nw);
    if (mw) Hw += p.Gw.transpose() * Ww.asDiagonal() * p.Gw;
    for (int m = 0; m < M; ++m) {
      const auto& b = p.blocks[m];
      theta_inv[m] = lam[m].cwiseQuotient(zl[m]);  // Theta^-1 = lam/z
      const int rows = static_cast<int>(b.E.rows());
      MatrixXd S = b.E * theta_inv[m].asDiagonal() * b.E.transpose() +
                   1e-11 * MatrixXd::Identity(rows, rows);
      S_ldlt[m].compute(S);
      const MatrixXd SinvF = S_ldlt[m].solve(b.F);
      Hw += b.F.transpose() * SinvF;
    }
    Eigen::LDLT<MatrixXd> Hw_ldlt;
    if (nw) Hw_ldlt.compute(Hw);

    auto solve_dir = [&](const std::vector<VectorXd>& rc_l, const VectorXd& rc_w, VectorXd* dw,
                         std::vector<VectorXd>* dlam, std::vector<VectorXd>* dy,
                         std::vector<VectorXd>* dzl, VectorXd* dsw, VectorXd* dzw) {
      // rc_*: complementarity right-hand sides.
      VectorXd rhs = -r_w;
      if (mw) {
        rhs -= p.Gw.transpose() * VectorXd(rc_w.cwiseQuotient(sw) + Ww.cwiseProduct(r_gw));
      }
      std::vector<VectorXd> t(M), g(M);
      for (int m = 0; m < M; ++m) {
        const auto& b = p.blocks[m];
        t[m] = -r_l[m] + rc_l[m].cwiseQuotient(lam[m]);
        g[m] = b.E * theta_inv[m].cwiseProduct(t[m]) + r_pm[m];
        rhs -= b.F.transpose() * S_ldlt[m].solve(g[m]);
      }
      *dw = nw ? VectorXd(Hw_ldlt.solve(rhs)) : VectorXd();
      dy->resize(M);
      dlam->resize(M);
      dzl->resize(M);
      for (int m = 0; m < M; ++m) {
        const auto& b = p.blocks[m];
        VectorXd fw = nw ? VectorXd(b.F * (*dw)) : VectorXd(VectorXd::Zero(b.E.rows()));
        (*dy)[m] = S_ldlt[m].solve(g[m] + fw);
        // Note: E lam + F w = d  =>  E dlam = -r_pm - F dw; with
        // dlam = Theta^-1 (t - E' dy).
        (*dlam)[m] = theta_inv[m].cwiseProduct(t[m] - b.E.transpose() * (*dy)[m]);
        (*dzl)[m] = (rc_l[m] - zl[m].cwiseProduct((*dlam)[m])).cwiseQuotient(lam[m]);
      }
      if (mw) {
        *dsw = -r_gw - p.Gw * (*dw);
        *dzw = (rc_w - zw.cwiseProduct(*dsw)).cwiseQuotient(sw);
      }
    };

    // Affine predictor.
    std::vector<VectorXd> rc_l_aff(M);
    for (int m = 0; m < M; ++m) rc_l_aff[m] = -lam[m].cwiseProduct(zl[m]);
    VectorXd rc_w_aff = mw ? VectorXd(-sw.cwiseProduct(zw)) : VectorXd();
    VectorXd dw_a, dsw_a, dzw_a;
    std::vector<VectorXd> dlam_a, dy_a, dzl_a;
    solve_dir(rc_l_aff, rc_w_aff, &dw_a, &dlam_a, &dy_a, &dzl_a, &dsw_a, &dzw_a);

    double a_aff = 1.0;
    if (mw) a_aff = std::min({a_aff, max_step(sw, dsw_a), max_step(zw, dzw_a)});
    for (int m = 0; m < M; ++m) {
      a_aff = std::min({a_aff, max_step(lam[m], dlam_a[m]), max_step(zl[m], dzl_a[m])});
    }
    double gap_aff = mw ? (sw + a_aff * dsw_a).dot(zw + a_aff * dzw_a) : 0.0;
    for (int m = 0; m < M; ++m) {
      gap_aff += (lam[m] + a_aff * dlam_a[m]).dot(zl[m] + a_aff * dzl_a[m]);
    }
    const double mu_aff = gap_aff / std::max(1, total_ineq);
    const double sigma = std::pow(std::max(0.0, mu_aff / std::max(mu, 1e-300)), 3.0);

    // Corrector.
    std::vector<VectorXd> rc_l(M);
    for (int m = 0; m < M; ++m) {
      rc_l[m] = -lam[m].cwiseProduct(zl[m]) - dlam_a[m].cwiseProduct(dzl_a[m]) +
                VectorXd::Constant(lam[m].size(), sigma * mu);
    }
    VectorXd rc_w;
    if (mw) {
      rc_w = -sw.cwiseProduct(zw) - dsw_a.cwiseProduct(dzw_a) + VectorXd::Constant(mw, sigma * mu);
    }
    VectorXd dw, dsw, dzw;
    std::vector<VectorXd> dlam, dy, dzl;
    solve_dir(rc_l, rc_w, &dw, &dlam, &dy, &dzl, &dsw, &dzw);

    double alpha = 1.0;
    if (mw) alpha = std::min({alpha, max_step(sw, dsw), max_step(zw, dzw)});
    for (int m = 0; m < M; ++m) {
      alpha = std::min({alpha, max_step(lam[m], dlam[m]), max_step(zl[m], dzl[m])});
    }
    alpha *= 0.995;

    if (nw) w += alpha * dw;
    if (mw) {
      sw += alpha * dsw;
      zw += alpha * dzw;
    }
    for (int m = 0; m < M; ++m) {
      lam[m] += alpha * dlam[m];
      zl[m] += alpha * dzl[m];
      yb[m] += alpha * dy[m];
    }
  }

  if (out.status != SolveStatus::Optimal && out.status != SolveStatus::Infeasible) {
    out.status = out.kkt_residual < 1e-6 ? SolveStatus::Optimal : SolveStatus::MaxIter;
  }
  VectorXd x(p.n_total());
  if (nw) x.head(nw) = w;
  int col = nw;
  double obj = p.qw.dot(w) + 0.5 * w.dot(p.Qw * w);
  for (int m = 0; m < M; ++m) {
    x.segment(col, lam[m].size()) = lam[m];
    obj += p.blocks[m].cost.dot(lam[m]);
    col += static_cast<int>(lam[m].size());
  }
  out.x = x;
  out.objective = obj;
  return out;
}

}  // namespace ecodrive::qp
