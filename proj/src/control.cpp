#include "dockbench/control.hpp"

#include <cmath>

#include "dockbench/angles.hpp"

namespace dockbench {

std::pair<ControlCommand, ControllerState> pid_step(
    const EstimatedState& est, const Eigen::Vector3d& target_pos, double target_yaw,
    const PidGains& gains, const ControllerState& state, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("pid_step: dt must be > 0");
  if (!est.x.allFinite() || !target_pos.allFinite() || !std::isfinite(target_yaw))
    throw std::invalid_argument("pid_step: non-finite input");

  const Eigen::Vector3d error = target_pos - est.position();

  ControllerState next = state;
  next.integrator = (state.integrator + error * dt)
                        .cwiseMax(-gains.i_limit)
                        .cwiseMin(gains.i_limit);
  next.prev_error = error;

  ControlCommand cmd;
  cmd.accel = gains.kp_pos.cwiseProduct(error) +
              gains.ki_pos.cwiseProduct(next.integrator) -
              gains.kd_pos.cwiseProduct(est.velocity());
  cmd.yaw_rate = gains.kp_yaw * angle_diff(target_yaw, est.yaw());
  return {cmd, next};
}

StepMetrics step_response_metrics(const std::vector<double>& trajectory, double step,
                                  double dt) {
  if (trajectory.empty())
    throw std::invalid_argument("step_response_metrics: empty trajectory");
  if (step == 0.0) throw std::invalid_argument("step_response_metrics: zero step");
  if (!(dt > 0.0)) throw std::invalid_argument("step_response_metrics: dt must be > 0");

  const double magnitude = std::abs(step);
  const double sign = step > 0.0 ? 1.0 : -1.0;
  const double band = 0.02 * magnitude;

  StepMetrics m;
  double peak_past_target = 0.0;
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    const double t = static_cast<double>(k + 1) * dt;
    const double error = trajectory[k] - step;
    peak_past_target = std::max(peak_past_target, sign * error);
    if (std::abs(error) > band) m.settling_time = t;
    m.itae += t * std::abs(error) * dt;
  }
  m.overshoot = std::max(0.0, peak_past_target / magnitude);
  return m;
}

}  // namespace dockbench
