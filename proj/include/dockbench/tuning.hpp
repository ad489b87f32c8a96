#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

#include "dockbench/config.hpp"
#include "dockbench/control.hpp"

namespace dockbench {

/// Search box over the tunable gains (kp_pos, ki_pos, kd_pos, kp_yaw).
struct GainBounds {
  Eigen::Vector4d lower = Eigen::Vector4d(0.5, 0.0, 0.5, 0.5);
  Eigen::Vector4d upper = Eigen::Vector4d(12.0, 2.0, 8.0, 8.0);
};

struct BoConfig {
  int budget = 40;                  // total objective evaluations
  int n_init = 10;                  // Latin-hypercube warmup samples
  Eigen::VectorXd kernel_lengthscale;  // per dim, unit-box units ([] -> 0.3)
  double kernel_variance = 4.0;     // objective units^2
  double noise_floor = 1e-6;        // observation noise variance
  int acquisition_restarts = 1000;  // random acquisition candidates per round
  std::uint64_t seed = 0;
};

/// Exact squared-exponential GP posterior over unit-box inputs, with jittered
/// Cholesky and mean-centered targets.
class GpPosterior {
 public:
  GpPosterior() = default;

  /// (mean, variance) of the latent function at x.
  std::pair<double, double> predict(const Eigen::VectorXd& x) const;

  int size() const { return static_cast<int>(y_.size()); }

 private:
  friend GpPosterior gp_fit(const std::vector<std::pair<Eigen::VectorXd, double>>&,
                            const BoConfig&);

  double kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;

  Eigen::MatrixXd points_;       // n x d
  Eigen::VectorXd y_;            // centered targets
  double y_mean_ = 0.0;
  Eigen::VectorXd alpha_;        // K^-1 y
  Eigen::LLT<Eigen::MatrixXd> chol_;
  Eigen::VectorXd lengthscale_;
  double variance_ = 1.0;
};

/// Fits the exact GP. Needs at least two observations; throws NumericError
/// if the kernel matrix cannot be factorized even with jitter.
GpPosterior gp_fit(const std::vector<std::pair<Eigen::VectorXd, double>>& observations,
                   const BoConfig& cfg);

/// Expected improvement below `best` for a Gaussian with the given moments.
/// Degenerates to max(0, best - mean) at zero standard deviation.
double expected_improvement(double mean, double std_dev, double best);

struct BoResult {
  Eigen::VectorXd best_point;
  double best_value = 0.0;
  std::vector<std::pair<Eigen::VectorXd, double>> history;  // evaluation order
};

/// Generic sequential Bayesian minimization over a box: Latin-hypercube
/// warmup, then fit -> maximize EI over random candidates -> evaluate.
/// Deterministic in cfg.seed. Failed GP fits fall back to a random candidate.
BoResult bo_minimize(const std::function<double(const Eigen::VectorXd&)>& objective,
                     const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                     const BoConfig& cfg);

/// Closed-loop step-response cost of a gain set on the noise-free plant:
/// w_settle * settling_time + w_overshoot * overshoot + w_itae * itae,
/// averaged over the stepped axes (1 m lateral + 0.5 m climb). Divergence
/// out of the geofence costs a flat 1e3.
double tuning_objective(const PidGains& gains, const TrialConfig& scenario);

struct ObjectiveWeights {
  double settle = 1.0;
  double overshoot = 5.0;
  double itae = 2.0;
};

double objective_from_metrics(const StepMetrics& metrics, const ObjectiveWeights& w);

struct TuneResult {
  PidGains best_gains;
  double best_objective = 0.0;
  std::vector<std::pair<Eigen::Vector4d, double>> history;
};

/// Tunes (kp_pos, ki_pos, kd_pos, kp_yaw) against the step scenario.
/// i_limit is taken from the scenario's leader gains.
TuneResult bo_tune(const TrialConfig& scenario, const GainBounds& bounds,
                   const BoConfig& cfg);

}  // namespace dockbench
