#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <numbers>

#include "dockbench/angles.hpp"

namespace dockbench {

/// Leader-follower formation geometry. The docking baseline is fixed along
/// the world x-axis; the follower sits on the +x side of the center.
struct FormationSpec {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();  // desired formation center [m]
  double d_dock = 0.46;                              // docking separation [m]
  double v_form_leader = 0.5;                        // capability speed [m/s]
  double v_form_follower = 0.5;                      // capability speed [m/s]
  double t_usr = 120.0;                              // user timeout cap [s]
};

struct FormationTargets {
  Eigen::Vector3d p_leader;
  Eigen::Vector3d p_follower;
  double yaw_leader;
  double yaw_follower;
};

/// Synchronized docking targets: the pair straddles the center along x at
/// the commanded separation, facing each other.
inline FormationTargets formation_targets(const FormationSpec& spec) {
  const Eigen::Vector3d half_baseline(0.5 * spec.d_dock, 0.0, 0.0);
  FormationTargets t;
  t.p_leader = spec.center - half_baseline;
  t.p_follower = spec.center + half_baseline;
  t.yaw_leader = 0.0;
  t.yaw_follower = std::numbers::pi;
  return t;
}

/// Shared cruise speed, chosen conservatively below both capability speeds
/// so neither vehicle saturates while tracking synchronized setpoints.
inline double sync_speed(const FormationSpec& spec) {
  return 0.8 * std::min(spec.v_form_leader, spec.v_form_follower);
}

/// Mission timeout from the commanded formation-center displacement: twice
/// the nominal transit time, floored at 30 s and capped by the user limit.
/// A user cap below the floor wins (it is a safety bound); callers are
/// expected to flag that configuration.
inline double mission_timeout(const FormationSpec& spec,
                              const Eigen::Vector3d& p_leader,
                              const Eigen::Vector3d& p_follower) {
  constexpr double kFloor = 30.0;
  const Eigen::Vector3d current_center = 0.5 * (p_leader + p_follower);
  const double transit = (spec.center - current_center).norm() / sync_speed(spec);
  if (spec.t_usr < kFloor) return spec.t_usr;
  return std::clamp(2.0 * transit, kFloor, spec.t_usr);
}

/// Baseline error: inter-vehicle distance minus the commanded separation.
inline double baseline_error(const Eigen::Vector3d& p_leader,
                             const Eigen::Vector3d& p_follower,
                             double d_dock) {
  return (p_follower - p_leader).norm() - d_dock;
}

/// Opposing-yaw error: deviation of the yaw difference from pi, wrapped.
inline double yaw_error(double yaw_leader, double yaw_follower) {
  return wrap_angle((yaw_follower - yaw_leader) - std::numbers::pi);
}

inline double relative_speed(const Eigen::Vector3d& v_leader,
                             const Eigen::Vector3d& v_follower) {
  return (v_follower - v_leader).norm();
}

}  // namespace dockbench
