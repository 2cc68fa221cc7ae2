#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace ecodrive {

/// Per-step consumption sample: speed, acceleration, measured energy drop.
struct EnergySample {
  double v = 0.0;
  double u = 0.0;
  double dE = 0.0;  // kJ
};

struct FitReport {
  double residual_rms = 0.0;
  bool degenerate = false;  // rank-deficient design, pseudo-inverse fallback
  int iterations = 0;
};

/// Quadratic consumption model l(v, u) = [v u 1] P [v u 1]', P symmetric PSD.
/// Position never enters, so the cost of a state equals the cost of its
/// estimate.
class EnergyModel {
 public:
  EnergyModel() : P_(Eigen::Matrix3d::Zero()) {}
  explicit EnergyModel(const Eigen::Matrix3d& P);

  double stage_cost(double v, double u) const {
    const Eigen::Vector3d z(v, u, 1.0);
    return z.dot(P_ * z);
  }

  const Eigen::Matrix3d& P() const { return P_; }

  /// Documented synthetic ground truth, sized so a 200 m / 20 s stop-to-stop
  /// trip lands in the hundreds-of-kJ range.
  static EnergyModel default_synthetic();

  void save_csv(const std::string& path, double residual = 0.0) const;
  static EnergyModel load_csv(const std::string& path);

 private:
  Eigen::Matrix3d P_;
};

/// PSD-constrained least squares for P: factorize P = R'R and run
/// Gauss-Newton on R (200 iterations, gradient tolerance 1e-10), started
/// from the PSD projection of the unconstrained solution. Deterministic.
EnergyModel fit_energy_model(const std::vector<EnergySample>& samples, FitReport* report = nullptr);

struct EnergyTrace {
  std::vector<double> per_step;  // dE_k
  double cumulative = 0.0;

  void save_csv(const std::string& path) const;
};

EnergyTrace accumulate(const EnergyModel& m, const std::vector<std::pair<double, double>>& vu);

std::vector<EnergySample> load_samples_csv(const std::string& path);
void save_samples_csv(const std::string& path, const std::vector<EnergySample>& samples);

}  // namespace ecodrive
