#pragma once

#include <Eigen/Dense>
#include <utility>

#include "dockbench/random.hpp"
#include "dockbench/types.hpp"

namespace dockbench {

/// Passive magnetic latch model. Capture succeeds only when the faces are
/// within engagement range at low relative speed and small yaw mismatch;
/// anything else at first contact is a bounce-off. After a bounce the faces
/// must separate beyond rearm_distance before another capture attempt can
/// be classified.
struct LatchParams {
  double engage_distance = 0.003;  // face gap below which magnets can act [m]
  double max_latch_speed = 0.06;   // closing-speed capture limit [m/s]
  double max_latch_yaw = 0.1745;   // yaw-misalignment capture limit [rad]
  bool hold_rigid = true;          // kinematic coupling after capture
  double restitution = 0.5;        // bounce-off velocity reflection factor
  double rearm_distance = 0.03;    // separation required to re-arm contact [m]
};

/// Ornstein-Uhlenbeck acceleration disturbance (wind-like colored noise).
struct OuParams {
  double sigma = 0.0;  // intensity [m/s^2]
  double theta = 4.0;  // mean-reversion rate [1/s]
};

struct WorldParams {
  double max_accel = 5.0;     // per-axis command saturation [m/s^2]
  double max_speed = 2.0;     // per-axis speed clamp [m/s]
  double drag_coeff = 0.3;    // linear velocity drag [1/s]
  double max_yaw_rate = 2.0;  // yaw-rate command clamp [rad/s]
  LatchParams latch;
  OuParams disturbance;
};

enum class ContactOutcome { NoContact, Latched, BounceOff };

/// Latch bookkeeping owned by the trial loop. `engaged` gates the coupled
/// stepping; the captured geometry is kept for diagnostics.
struct LatchState {
  bool engaged = false;
  double gap_at_latch = 0.0;
  double rel_yaw_at_latch = 0.0;
  double t_latch = 0.0;
};

/// Advances one vehicle by a semi-implicit Euler step: the commanded
/// acceleration is saturated per axis, drag and disturbance are applied,
/// the new velocity is clamped per axis and then integrates position.
RigidState step_vehicle(const RigidState& state, const ControlCommand& cmd,
                        const WorldParams& params,
                        const Eigen::Vector3d& disturbance_accel, double dt);

/// Classifies contact between the two vehicles given the commanded docking
/// separation. Face gap = center distance - d_dock.
ContactOutcome check_contact(const RigidState& leader, const RigidState& follower,
                             const LatchParams& params, double d_dock);

/// Advances a rigidly latched pair. Equal masses: the pair translates under
/// the mean of the two saturated acceleration commands and rotates about its
/// midpoint at the mean commanded yaw rate, so inter-vehicle distance and
/// relative yaw are preserved exactly.
std::pair<RigidState, RigidState> step_latched_pair(
    const RigidState& leader, const RigidState& follower, const LatchState& latch,
    const ControlCommand& cmd_leader, const ControlCommand& cmd_follower,
    const WorldParams& params, double dt);

/// Post-capture inelastic merge: both vehicles take the momentum-conserving
/// common velocity.
std::pair<RigidState, RigidState> merge_latched_velocities(const RigidState& leader,
                                                           const RigidState& follower);

/// Bounce-off impulse: reflects the closing component of the relative
/// velocity along the baseline axis with the configured restitution.
std::pair<RigidState, RigidState> resolve_bounce(const RigidState& leader,
                                                 const RigidState& follower,
                                                 const LatchParams& params);

/// One Ornstein-Uhlenbeck step per axis:
///   d' = d * (1 - theta*dt) + sigma * sqrt(dt) * n,  n ~ N(0,1).
Eigen::Vector3d sample_disturbance(const Eigen::Vector3d& prev, const OuParams& params,
                                   double dt, Rng& rng);

}  // namespace dockbench
