#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "dockbench/estimation.hpp"
#include "dockbench/types.hpp"

namespace dockbench {

/// Position PID gains, per world axis (x/y usually identical, z may differ),
/// plus proportional yaw gain and the integrator clamp.
struct PidGains {
  Eigen::Vector3d kp_pos = Eigen::Vector3d::Constant(4.0);  // [1/s^2]
  Eigen::Vector3d ki_pos = Eigen::Vector3d::Constant(0.2);  // [1/s^3]
  Eigen::Vector3d kd_pos = Eigen::Vector3d::Constant(2.5);  // [1/s]
  double kp_yaw = 3.0;                                      // [1/s]
  double i_limit = 1.0;                                     // [m s]

  static PidGains uniform(double kp, double ki, double kd, double kp_yaw,
                          double i_limit) {
    PidGains g;
    g.kp_pos.setConstant(kp);
    g.ki_pos.setConstant(ki);
    g.kd_pos.setConstant(kd);
    g.kp_yaw = kp_yaw;
    g.i_limit = i_limit;
    return g;
  }
};

struct ControllerState {
  Eigen::Vector3d integrator = Eigen::Vector3d::Zero();  // [m s]
  Eigen::Vector3d prev_error = Eigen::Vector3d::Zero();  // [m]
};

/// One PID step on the estimated state. Derivative acts on the measured
/// velocity (no setpoint kick); the integrator is clamped per axis.
/// Yaw command is proportional on the wrapped yaw error.
std::pair<ControlCommand, ControllerState> pid_step(
    const EstimatedState& est, const Eigen::Vector3d& target_pos, double target_yaw,
    const PidGains& gains, const ControllerState& state, double dt);

/// Scalar step-response quality: overshoot fraction, 2%-band settling time,
/// and time-weighted absolute error integral.
struct StepMetrics {
  double overshoot = 0.0;      // fraction of |step|
  double settling_time = 0.0;  // [s]
  double itae = 0.0;           // [m s^2]
};

/// Metrics over a trajectory sampled at dt, starting one sample after the
/// step is applied. settling_time is the last instant the signal sits
/// outside the +/-2% band around the step target.
StepMetrics step_response_metrics(const std::vector<double>& trajectory, double step,
                                  double dt);

}  // namespace dockbench
