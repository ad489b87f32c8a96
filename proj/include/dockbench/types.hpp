#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace dockbench {

/// Thrown when a caller breaks an operation's preconditions (e.g. stepping a
/// latched-pair update while the pair is not latched).
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

/// Thrown when linear algebra goes numerically bad (indefinite covariance,
/// failed factorization). Trial runners convert this into a safety abort.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Ground-truth state of one vehicle. Positions in meters, velocities in
/// m/s, yaw wrapped to (-pi, pi], yaw rate in rad/s.
struct RigidState {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  double yaw = 0.0;
  double yaw_rate = 0.0;

  bool finite() const {
    return position.allFinite() && velocity.allFinite() &&
           std::isfinite(yaw) && std::isfinite(yaw_rate);
  }
};

/// Outer-loop command: world-frame acceleration setpoint plus yaw rate.
struct ControlCommand {
  Eigen::Vector3d accel = Eigen::Vector3d::Zero();
  double yaw_rate = 0.0;

  bool finite() const { return accel.allFinite() && std::isfinite(yaw_rate); }
};

inline void require_finite(const RigidState& s, const char* what) {
  if (!s.finite()) throw std::invalid_argument(std::string(what) + ": non-finite state");
}

inline void require_finite(const ControlCommand& c, const char* what) {
  if (!c.finite()) throw std::invalid_argument(std::string(what) + ": non-finite command");
}

}  // namespace dockbench
