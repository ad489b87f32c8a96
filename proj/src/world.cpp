#include "dockbench/world.hpp"

#include <cmath>

#include "dockbench/angles.hpp"
#include "dockbench/formation.hpp"

namespace dockbench {

namespace {

Eigen::Vector3d clamp_per_axis(const Eigen::Vector3d& v, double limit) {
  return v.cwiseMax(-limit).cwiseMin(limit);
}

void require_step_dt(double dt) {
  if (!(dt > 0.0) || dt > 0.05)
    throw std::invalid_argument("world step: dt must be in (0, 0.05] s");
}

}  // namespace

RigidState step_vehicle(const RigidState& state, const ControlCommand& cmd,
                        const WorldParams& params,
                        const Eigen::Vector3d& disturbance_accel, double dt) {
  require_step_dt(dt);
  require_finite(state, "step_vehicle");
  require_finite(cmd, "step_vehicle");
  if (!disturbance_accel.allFinite())
    throw std::invalid_argument("step_vehicle: non-finite disturbance");

  const Eigen::Vector3d accel = clamp_per_axis(cmd.accel, params.max_accel) -
                                params.drag_coeff * state.velocity +
                                disturbance_accel;

  RigidState next;
  next.velocity = clamp_per_axis(state.velocity + accel * dt, params.max_speed);
  next.position = state.position + next.velocity * dt;
  next.yaw_rate = std::clamp(cmd.yaw_rate, -params.max_yaw_rate, params.max_yaw_rate);
  next.yaw = wrap_angle(state.yaw + next.yaw_rate * dt);
  return next;
}

ContactOutcome check_contact(const RigidState& leader, const RigidState& follower,
                             const LatchParams& params, double d_dock) {
  require_finite(leader, "check_contact");
  require_finite(follower, "check_contact");

  const double gap = baseline_error(leader.position, follower.position, d_dock);
  if (gap > params.engage_distance) return ContactOutcome::NoContact;

  const double closing_speed = relative_speed(leader.velocity, follower.velocity);
  const double yaw_mismatch = std::abs(yaw_error(leader.yaw, follower.yaw));
  if (closing_speed <= params.max_latch_speed && yaw_mismatch <= params.max_latch_yaw)
    return ContactOutcome::Latched;
  return ContactOutcome::BounceOff;
}

std::pair<RigidState, RigidState> step_latched_pair(
    const RigidState& leader, const RigidState& follower, const LatchState& latch,
    const ControlCommand& cmd_leader, const ControlCommand& cmd_follower,
    const WorldParams& params, double dt) {
  require_step_dt(dt);
  if (!latch.engaged)
    throw ContractViolation("step_latched_pair: pair is not latched");
  if (!params.latch.hold_rigid)
    throw ContractViolation("step_latched_pair: hold_rigid is disabled");
  require_finite(leader, "step_latched_pair");
  require_finite(follower, "step_latched_pair");
  require_finite(cmd_leader, "step_latched_pair");
  require_finite(cmd_follower, "step_latched_pair");

  const Eigen::Vector3d mean_cmd_accel =
      0.5 * (clamp_per_axis(cmd_leader.accel, params.max_accel) +
             clamp_per_axis(cmd_follower.accel, params.max_accel));
  const Eigen::Vector3d v_common = 0.5 * (leader.velocity + follower.velocity);
  const Eigen::Vector3d accel = mean_cmd_accel - params.drag_coeff * v_common;

  const Eigen::Vector3d v_next =
      clamp_per_axis(v_common + accel * dt, params.max_speed);
  const Eigen::Vector3d center =
      0.5 * (leader.position + follower.position) + v_next * dt;

  const double mean_yaw_rate =
      std::clamp(0.5 * (cmd_leader.yaw_rate + cmd_follower.yaw_rate),
                 -params.max_yaw_rate, params.max_yaw_rate);
  const double dyaw = mean_yaw_rate * dt;

  // Rotate the half-baseline about the vertical axis through the midpoint;
  // rotation is an isometry, so the captured geometry is preserved.
  Eigen::Vector3d half_offset = 0.5 * (follower.position - leader.position);
  const double c = std::cos(dyaw), s = std::sin(dyaw);
  half_offset = Eigen::Vector3d(c * half_offset.x() - s * half_offset.y(),
                                s * half_offset.x() + c * half_offset.y(),
                                half_offset.z());
  const Eigen::Vector3d spin_vel =
      mean_yaw_rate * Eigen::Vector3d(-half_offset.y(), half_offset.x(), 0.0);

  RigidState next_leader;
  next_leader.position = center - half_offset;
  next_leader.velocity = v_next - spin_vel;
  next_leader.yaw = wrap_angle(leader.yaw + dyaw);
  next_leader.yaw_rate = mean_yaw_rate;

  RigidState next_follower;
  next_follower.position = center + half_offset;
  next_follower.velocity = v_next + spin_vel;
  next_follower.yaw = wrap_angle(follower.yaw + dyaw);
  next_follower.yaw_rate = mean_yaw_rate;

  return {next_leader, next_follower};
}

std::pair<RigidState, RigidState> merge_latched_velocities(const RigidState& leader,
                                                           const RigidState& follower) {
  const Eigen::Vector3d v_common = 0.5 * (leader.velocity + follower.velocity);
  RigidState l = leader;
  RigidState f = follower;
  l.velocity = v_common;
  f.velocity = v_common;
  return {l, f};
}

std::pair<RigidState, RigidState> resolve_bounce(const RigidState& leader,
                                                 const RigidState& follower,
                                                 const LatchParams& params) {
  const Eigen::Vector3d baseline = follower.position - leader.position;
  const double dist = baseline.norm();
  if (dist <= 0.0) return {leader, follower};
  const Eigen::Vector3d axis = baseline / dist;

  const Eigen::Vector3d v_rel = follower.velocity - leader.velocity;
  const double closing = v_rel.dot(axis);  // negative when approaching
  if (closing >= 0.0) return {leader, follower};

  const Eigen::Vector3d impulse = -(1.0 + params.restitution) * closing * axis;
  RigidState l = leader;
  RigidState f = follower;
  f.velocity += 0.5 * impulse;
  l.velocity -= 0.5 * impulse;
  return {l, f};
}

Eigen::Vector3d sample_disturbance(const Eigen::Vector3d& prev, const OuParams& params,
                                   double dt, Rng& rng) {
  if (!(dt > 0.0)) throw std::invalid_argument("sample_disturbance: dt must be > 0");
  const double decay = 1.0 - params.theta * dt;
  const double scale = params.sigma * std::sqrt(dt);
  Eigen::Vector3d next;
  for (int i = 0; i < 3; ++i) next[i] = prev[i] * decay + scale * draw_normal(rng);
  return next;
}

}  // namespace dockbench
