#include "ecodrive/energy.hpp"

#include <cmath>
#include <stdexcept>

#include "ecodrive/csv.hpp"

namespace ecodrive {

namespace {

Eigen::Vector3d feature(double v, double u) { return {v, u, 1.0}; }

// Upper-triangular R packed as (r00, r01, r02, r11, r12, r22).
Eigen::Matrix3d unpack_R(const Eigen::Matrix<double, 6, 1>& r) {
  Eigen::Matrix3d R = Eigen::Matrix3d::Zero();
  R(0, 0) = r[0];
  R(0, 1) = r[1];
  R(0, 2) = r[2];
  R(1, 1) = r[3];
  R(1, 2) = r[4];
  R(2, 2) = r[5];
  return R;
}

}  // namespace

EnergyModel::EnergyModel(const Eigen::Matrix3d& P) : P_(0.5 * (P + P.transpose())) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(P_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9) {
    throw std::invalid_argument("EnergyModel: P not PSD");
  }
}

EnergyModel EnergyModel::default_synthetic() {
  Eigen::Matrix3d P;
  // Rolling/drag quadratic in v, drivetrain loss coupling v*u, actuation
  // loss in u^2, idle draw in the constant.
  P << 0.045, 0.150, 0.080,
       0.150, 0.900, 0.100,
       0.080, 0.100, 0.350;
  return EnergyModel(P);
}

EnergyModel fit_energy_model(const std::vector<EnergySample>& samples, FitReport* report) {
  if (samples.size() < 6) throw std::invalid_argument("fit_energy_model: need >= 6 samples");
  const int n = static_cast<int>(samples.size());

  // Unconstrained least squares on the 6 symmetric-P monomials.
  Eigen::MatrixXd Phi(n, 6);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    const double v = samples[i].v, u = samples[i].u;
    Phi.row(i) << v * v, 2 * v * u, 2 * v, u * u, 2 * u, 1.0;
    rhs[i] = samples[i].dE;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Phi, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double rank_tol = 1e-8 * svd.singularValues().maxCoeff();
  const bool degenerate = svd.singularValues().minCoeff() < rank_tol;
  svd.setThreshold(1e-8);
  Eigen::VectorXd p = svd.solve(rhs);  // pseudo-inverse when rank deficient

  Eigen::Matrix3d P0;
  P0 << p[0], p[1], p[2], p[1], p[3], p[4], p[2], p[4], p[5];
  P0 = 0.5 * (P0 + P0.transpose());

  // Projection onto the PSD cone, then Cholesky-style factor as the start.
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(P0);
  Eigen::Vector3d ev = es.eigenvalues().cwiseMax(1e-12);
  Eigen::Matrix3d P_proj =
      es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  Eigen::LLT<Eigen::Matrix3d> llt(P_proj + 1e-12 * Eigen::Matrix3d::Identity());
  Eigen::Matrix3d L = llt.matrixL();
  Eigen::Matrix<double, 6, 1> r;
  // R = L' is upper triangular.
  r << L(0, 0), L(1, 0), L(2, 0), L(1, 1), L(2, 1), L(2, 2);

  // Gauss-Newton with Levenberg damping on residuals dE - |R z|^2.
  double lambda = 1e-6;
  int iters = 0;
  for (int it = 0; it < 200; ++it) {
    iters = it + 1;
    Eigen::Matrix3d R = unpack_R(r);
    Eigen::Matrix<double, 6, 6> JtJ = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> Jtr = Eigen::Matrix<double, 6, 1>::Zero();
    double sse = 0.0;
    for (const auto& smp : samples) {
      const Eigen::Vector3d z = feature(smp.v, smp.u);
      const Eigen::Vector3d Rz = R * z;
      const double resid = smp.dE - Rz.squaredNorm();
      sse += resid * resid;
      // d|Rz|^2 / dR_ij = 2 (Rz)_i z_j for the packed upper triangle.
      Eigen::Matrix<double, 6, 1> g;
      g << 2 * Rz[0] * z[0], 2 * Rz[0] * z[1], 2 * Rz[0] * z[2],
           2 * Rz[1] * z[1], 2 * Rz[1] * z[2], 2 * Rz[2] * z[2];
      JtJ += g * g.transpose();
      Jtr += g * resid;
    }
    if (Jtr.lpNorm<Eigen::Infinity>() < 1e-10) break;
    const Eigen::Matrix<double, 6, 1> step =
        (JtJ + lambda * Eigen::Matrix<double, 6, 6>::Identity()).ldlt().solve(Jtr);
    const Eigen::Matrix<double, 6, 1> r_new = r + step;

    Eigen::Matrix3d R_new = unpack_R(r_new);
    double sse_new = 0.0;
    for (const auto& smp : samples) {
      const Eigen::Vector3d z = feature(smp.v, smp.u);
      const double resid = smp.dE - (R_new * z).squaredNorm();
      sse_new += resid * resid;
    }
    if (sse_new <= sse) {
      r = r_new;
      lambda = std::max(1e-12, lambda * 0.5);
    } else {
      lambda *= 10.0;
      if (lambda > 1e8) break;
    }
  }

  Eigen::Matrix3d R = unpack_R(r);
  Eigen::Matrix3d P = R.transpose() * R;
  double sse = 0.0;
  for (const auto& smp : samples) {
    const Eigen::Vector3d z = feature(smp.v, smp.u);
    const double resid = smp.dE - z.dot(P * z);
    sse += resid * resid;
  }
  if (report) {
    report->residual_rms = std::sqrt(sse / n);
    report->degenerate = degenerate;
    report->iterations = iters;
  }
  return EnergyModel(P);
}

EnergyTrace accumulate(const EnergyModel& m, const std::vector<std::pair<double, double>>& vu) {
  EnergyTrace t;
  t.per_step.reserve(vu.size());
  for (const auto& [v, u] : vu) {
    const double de = m.stage_cost(v, u);
    t.per_step.push_back(de);
    t.cumulative += de;
  }
  return t;
}

void EnergyModel::save_csv(const std::string& path, double residual) const {
  csv::Writer w(path, {"p00", "p01", "p02", "p11", "p12", "p22", "residual_rms"});
  w.row(std::vector<double>{P_(0, 0), P_(0, 1), P_(0, 2), P_(1, 1), P_(1, 2), P_(2, 2), residual});
}

EnergyModel EnergyModel::load_csv(const std::string& path) {
  csv::Table t = csv::read(path);
  if (t.rows.empty()) throw std::runtime_error("energy model file empty: " + path);
  const auto& r = t.rows[0];
  Eigen::Matrix3d P;
  P << r[0], r[1], r[2], r[1], r[3], r[4], r[2], r[4], r[5];
  return EnergyModel(P);
}

void EnergyTrace::save_csv(const std::string& path) const {
  csv::Writer w(path, {"step", "dE_kJ", "cumulative_kJ"});
  double cum = 0.0;
  for (size_t k = 0; k < per_step.size(); ++k) {
    cum += per_step[k];
    w.row(std::vector<double>{static_cast<double>(k), per_step[k], cum});
  }
}

std::vector<EnergySample> load_samples_csv(const std::string& path) {
  csv::Table t = csv::read(path);
  const int cv = t.column("v");
  const int cu = t.column("u");
  const int ce = t.column("dE");
  std::vector<EnergySample> out;
  out.reserve(t.rows.size());
  for (const auto& r : t.rows) out.push_back({r[cv], r[cu], r[ce]});
  return out;
}

void save_samples_csv(const std::string& path, const std::vector<EnergySample>& samples) {
  csv::Writer w(path, {"t", "v", "u", "dE"});
  for (size_t i = 0; i < samples.size(); ++i) {
    w.row(std::vector<double>{static_cast<double>(i), samples[i].v, samples[i].u, samples[i].dE});
  }
}

}  // namespace ecodrive
