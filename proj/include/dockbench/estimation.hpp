#pragma once

#include <Eigen/Dense>

#include "dockbench/sensing.hpp"
#include "dockbench/types.hpp"

namespace dockbench {

using Vector7d = Eigen::Matrix<double, 7, 1>;
using Matrix7d = Eigen::Matrix<double, 7, 7>;

/// Reduced per-vehicle estimate: [x, y, z, vx, vy, vz, yaw] with covariance.
struct EstimatedState {
  Vector7d x = Vector7d::Zero();
  Matrix7d cov = Matrix7d::Identity();
  double stamp = 0.0;

  Eigen::Vector3d position() const { return x.head<3>(); }
  Eigen::Vector3d velocity() const { return x.segment<3>(3); }
  double yaw() const { return x[6]; }
};

struct EkfParams {
  double q_accel = 0.3;    // velocity-driving process noise [m/s^2]
  double q_yaw = 0.05;     // yaw process noise [rad/s]
  double r_pos = 0.002;    // mocap position measurement std [m]
  double r_yaw = 0.005;    // mocap yaw measurement std [rad]
  double p0 = 0.05;        // initial covariance diagonal
  double gate_sigma = 5.0; // innovation gate, per measurement axis
};

/// Filter start from the first delivered pose: measured position/yaw,
/// zero velocity, diagonal p0 covariance.
EstimatedState ekf_init(const MocapSample& z, const EkfParams& params);

/// Constant-velocity prediction with the IMU acceleration as control input;
/// yaw propagates from the gyro. Covariance picks up white-acceleration
/// process noise scaled by dt. Throws NumericError if the propagated
/// covariance loses positive definiteness.
EstimatedState ekf_predict(const EstimatedState& est, const ImuSample& imu,
                           const EkfParams& params, double dt);

struct UpdateInfo {
  bool applied = false;
  bool rejected_stale = false;
  bool rejected_gate = false;
};

/// Joseph-form position/yaw update with wrapped yaw innovation. Samples
/// older than the estimate or beyond the innovation gate leave the estimate
/// unchanged (reported through `info` when provided).
EstimatedState ekf_update_mocap(const EstimatedState& est, const MocapSample& z,
                                const EkfParams& params, UpdateInfo* info = nullptr);

/// Normalized estimation error squared against ground truth (yaw error
/// wrapped). Chi-square distributed with 7 dof for a consistent filter.
double nees(const EstimatedState& est, const RigidState& truth);

}  // namespace dockbench
