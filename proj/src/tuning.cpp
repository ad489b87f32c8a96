#include "dockbench/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dockbench/random.hpp"
#include "dockbench/world.hpp"

namespace dockbench {

namespace {

Eigen::VectorXd effective_lengthscale(const BoConfig& cfg, Eigen::Index dim) {
  if (cfg.kernel_lengthscale.size() == dim) return cfg.kernel_lengthscale;
  return Eigen::VectorXd::Constant(dim, 0.3);
}

double standard_normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// Stratified-per-dimension space filling over the unit box.
std::vector<Eigen::VectorXd> latin_hypercube(int n, Eigen::Index dim, Rng& rng) {
  std::vector<Eigen::VectorXd> points(static_cast<std::size_t>(n),
                                      Eigen::VectorXd::Zero(dim));
  std::vector<int> strata(static_cast<std::size_t>(n));
  for (Eigen::Index d = 0; d < dim; ++d) {
    for (int i = 0; i < n; ++i) strata[static_cast<std::size_t>(i)] = i;
    std::shuffle(strata.begin(), strata.end(), rng);
    for (int i = 0; i < n; ++i)
      points[static_cast<std::size_t>(i)][d] =
          (strata[static_cast<std::size_t>(i)] + draw_uniform(rng)) / n;
  }
  return points;
}

}  // namespace

double GpPosterior::kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  const Eigen::VectorXd scaled = (a - b).cwiseQuotient(lengthscale_);
  return variance_ * std::exp(-0.5 * scaled.squaredNorm());
}

std::pair<double, double> GpPosterior::predict(const Eigen::VectorXd& x) const {
  const Eigen::Index n = y_.size();
  Eigen::VectorXd k_star(n);
  for (Eigen::Index i = 0; i < n; ++i)
    k_star[i] = kernel(points_.row(i).transpose(), x);
  const double mean = y_mean_ + k_star.dot(alpha_);
  const double reduction = k_star.dot(chol_.solve(k_star));
  const double variance = std::max(0.0, variance_ - reduction);
  return {mean, variance};
}

GpPosterior gp_fit(const std::vector<std::pair<Eigen::VectorXd, double>>& observations,
                   const BoConfig& cfg) {
  const Eigen::Index n = static_cast<Eigen::Index>(observations.size());
  if (n < 2) throw std::invalid_argument("gp_fit: need at least 2 observations");
  const Eigen::Index dim = observations.front().first.size();

  GpPosterior gp;
  gp.lengthscale_ = effective_lengthscale(cfg, dim);
  gp.variance_ = cfg.kernel_variance;
  gp.points_.resize(n, dim);
  gp.y_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    gp.points_.row(i) = observations[static_cast<std::size_t>(i)].first;
    gp.y_[i] = observations[static_cast<std::size_t>(i)].second;
  }
  gp.y_mean_ = gp.y_.mean();
  gp.y_.array() -= gp.y_mean_;

  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double k =
          gp.kernel(gp.points_.row(i).transpose(), gp.points_.row(j).transpose());
      K(i, j) = k;
      K(j, i) = k;
    }
  K.diagonal().array() += cfg.noise_floor;

  double jitter = 0.0;
  for (int attempt = 0; attempt < 8; ++attempt) {
    gp.chol_.compute(K + jitter * Eigen::MatrixXd::Identity(n, n));
    if (gp.chol_.info() == Eigen::Success) {
      gp.alpha_ = gp.chol_.solve(gp.y_);
      return gp;
    }
    jitter = jitter == 0.0 ? 1e-10 * cfg.kernel_variance : jitter * 10.0;
  }
  throw NumericError("gp_fit: Cholesky factorization failed after max jitter");
}

double expected_improvement(double mean, double std_dev, double best) {
  if (std_dev < 0.0) throw std::invalid_argument("expected_improvement: std < 0");
  const double gap = best - mean;
  if (std_dev == 0.0) return std::max(0.0, gap);
  const double z = gap / std_dev;
  return gap * standard_normal_cdf(z) + std_dev * standard_normal_pdf(z);
}

BoResult bo_minimize(const std::function<double(const Eigen::VectorXd&)>& objective,
                     const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                     const BoConfig& cfg) {
  const Eigen::Index dim = lower.size();
  if (upper.size() != dim || !((lower.array() < upper.array()).all()))
    throw std::invalid_argument("bo_minimize: need lower < upper elementwise");
  if (cfg.n_init < 2 || cfg.budget < cfg.n_init)
    throw std::invalid_argument("bo_minimize: need budget >= n_init >= 2");

  Rng rng(cfg.seed);
  const Eigen::VectorXd span = upper - lower;
  auto denormalize = [&](const Eigen::VectorXd& u) -> Eigen::VectorXd {
    return lower + u.cwiseProduct(span);
  };

  BoResult result;
  std::vector<std::pair<Eigen::VectorXd, double>> unit_history;  // unit-box points
  result.best_value = std::numeric_limits<double>::infinity();

  auto evaluate = [&](const Eigen::VectorXd& u) {
    const Eigen::VectorXd x = denormalize(u);
    const double value = objective(x);
    unit_history.emplace_back(u, value);
    result.history.emplace_back(x, value);
    if (value < result.best_value) {
      result.best_value = value;
      result.best_point = x;
    }
  };

  for (const Eigen::VectorXd& u : latin_hypercube(cfg.n_init, dim, rng)) evaluate(u);

  for (int it = cfg.n_init; it < cfg.budget; ++it) {
    Eigen::VectorXd candidate(dim);
    bool from_acquisition = false;
    try {
      const GpPosterior gp = gp_fit(unit_history, cfg);
      double best_ei = -1.0;
      for (int c = 0; c < cfg.acquisition_restarts; ++c) {
        Eigen::VectorXd u(dim);
        for (Eigen::Index d = 0; d < dim; ++d) u[d] = draw_uniform(rng);
        const auto [mean, variance] = gp.predict(u);
        const double ei = expected_improvement(mean, std::sqrt(variance),
                                               result.best_value);
        if (ei > best_ei) {
          best_ei = ei;
          candidate = u;
        }
      }
      from_acquisition = true;
    } catch (const NumericError&) {
      // fall through to a random candidate
    }
    if (!from_acquisition)
      for (Eigen::Index d = 0; d < dim; ++d) candidate[d] = draw_uniform(rng);
    evaluate(candidate);
  }
  return result;
}

double objective_from_metrics(const StepMetrics& metrics, const ObjectiveWeights& w) {
  return w.settle * metrics.settling_time + w.overshoot * metrics.overshoot +
         w.itae * metrics.itae;
}

double tuning_objective(const PidGains& gains, const TrialConfig& scenario) {
  const double dt = scenario.dt;
  const double duration = 12.0;
  const Eigen::Vector3d start(0.0, 0.0, 1.0);
  const Eigen::Vector3d target(1.0, 0.0, 1.5);  // 1 m lateral + 0.5 m climb

  RigidState truth;
  truth.position = start;
  ControllerState ctrl;
  std::vector<double> x_series, z_series;
  x_series.reserve(static_cast<std::size_t>(duration / dt));
  z_series.reserve(static_cast<std::size_t>(duration / dt));

  const long steps = static_cast<long>(std::llround(duration / dt));
  for (long k = 0; k < steps; ++k) {
    EstimatedState est;  // noise-free plant: controller sees the truth
    est.x.head<3>() = truth.position;
    est.x.segment<3>(3) = truth.velocity;
    est.x[6] = truth.yaw;
    est.stamp = static_cast<double>(k) * dt;

    auto [cmd, next_ctrl] = pid_step(est, target, 0.0, gains, ctrl, dt);
    ctrl = next_ctrl;
    truth = step_vehicle(truth, cmd, scenario.world, Eigen::Vector3d::Zero(), dt);

    if ((truth.position.array() < scenario.safety.geofence_min.array()).any() ||
        (truth.position.array() > scenario.safety.geofence_max.array()).any())
      return 1e3;

    x_series.push_back(truth.position.x() - start.x());
    z_series.push_back(truth.position.z() - start.z());
  }

  const StepMetrics mx = step_response_metrics(x_series, target.x() - start.x(), dt);
  const StepMetrics mz = step_response_metrics(z_series, target.z() - start.z(), dt);
  StepMetrics avg;
  avg.overshoot = 0.5 * (mx.overshoot + mz.overshoot);
  avg.settling_time = 0.5 * (mx.settling_time + mz.settling_time);
  avg.itae = 0.5 * (mx.itae + mz.itae);
  return objective_from_metrics(avg, ObjectiveWeights{});
}

TuneResult bo_tune(const TrialConfig& scenario, const GainBounds& bounds,
                   const BoConfig& cfg) {
  if (!((bounds.lower.array() >= 0.0).all()))
    throw std::invalid_argument("bo_tune: gain bounds must be non-negative");

  const double i_limit = scenario.gains_leader.i_limit;
  auto objective = [&](const Eigen::VectorXd& x) {
    const PidGains gains = PidGains::uniform(x[0], x[1], x[2], x[3], i_limit);
    return tuning_objective(gains, scenario);
  };

  const BoResult raw = bo_minimize(objective, bounds.lower, bounds.upper, cfg);

  TuneResult result;
  result.best_gains = PidGains::uniform(raw.best_point[0], raw.best_point[1],
                                        raw.best_point[2], raw.best_point[3], i_limit);
  result.best_objective = raw.best_value;
  result.history.reserve(raw.history.size());
  for (const auto& [x, value] : raw.history)
    result.history.emplace_back(Eigen::Vector4d(x[0], x[1], x[2], x[3]), value);
  return result;
}

}  // namespace dockbench
