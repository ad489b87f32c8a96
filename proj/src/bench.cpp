#include "dockbench/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <numbers>
#include <thread>

#include "dockbench/angles.hpp"
#include "dockbench/control.hpp"
#include "dockbench/formation.hpp"
#include "dockbench/world.hpp"

namespace dockbench {

namespace {

constexpr double kEps = 1e-12;

struct VehicleSim {
  RigidState truth;
  RigidState prev_truth;
  Eigen::Vector3d disturbance = Eigen::Vector3d::Zero();
  Eigen::Vector3d applied_accel = Eigen::Vector3d::Zero();
  std::optional<EstimatedState> est;
  ControllerState ctrl;
  MocapDelayQueue mocap_queue;
  long next_imu = 0;
  long next_mocap = 0;
};

struct SensorEvent {
  double stamp = 0.0;  // host clock
  int kind = 0;        // 0: imu (predict), 1: mocap (update)
  int vehicle = 0;     // 0: leader, 1: follower
  ImuSample imu;
  MocapSample mocap;
};

/// Truth between steps: position advances at the post-step velocity, so the
/// interpolant agrees with the integrator at both interval ends.
RigidState truth_between(const RigidState& prev, const RigidState& cur, double t0,
                         double ts) {
  const double tau = ts - t0;
  RigidState s = cur;
  s.position = prev.position + cur.velocity * tau;
  s.yaw = wrap_angle(prev.yaw + cur.yaw_rate * tau);
  return s;
}

// Setpoint glides decelerate near the goal so tracking never has to brake
// through it: the rate tapers proportionally inside the taper band.
constexpr double kGlideTaper = 1.5;       // [1/s]
constexpr double kGlideFloor = 0.01;      // [m/s]

double taper_rate(double rate, double dist) {
  return std::min(rate, kGlideTaper * dist + kGlideFloor);
}

void glide_vec(Eigen::Vector3d& value, const Eigen::Vector3d& goal, double rate,
               double dt) {
  const Eigen::Vector3d d = goal - value;
  const double dist = d.norm();
  const double step = taper_rate(rate, dist) * dt;
  if (dist <= step || dist <= 0.0) {
    value = goal;
  } else {
    value += d * (step / dist);
  }
}

void glide_scalar(double& value, double goal, double rate, double dt) {
  const double dist = std::abs(goal - value);
  const double step = taper_rate(rate, dist) * dt;
  if (dist <= step) {
    value = goal;
  } else {
    value += (goal > value) ? step : -step;
  }
}

class TrialRunner {
 public:
  TrialRunner(const TrialConfig& cfg, TrialLogWriter* writer)
      : cfg_(cfg), writer_(writer), rng_(cfg.seed) {}

  TrialRecord run();

 private:
  void prime_sensors();
  void emit_sensor_events(VehicleSim& v, int vehicle_idx, double t0, double t1,
                          std::vector<SensorEvent>& out);
  void process_sensor_events(double t1, std::vector<SensorEvent>& events);
  void update_stage(double t);
  void step_supervisor(double t);
  void update_setpoints(double t);
  void resolve_contact(double t);
  void integrate_world(double t);
  void log_row(double t);
  bool mission_done(double t) const;

  const TrialConfig& cfg_;
  TrialLogWriter* writer_;
  Rng rng_;

  VehicleSim leader_;
  VehicleSim follower_;
  LatchState latch_;
  bool contact_armed_ = true;
  bool inject_pending_ = false;

  Supervisor sup_;
  GuardFilter gfilter_;
  GuardSignals guards_;
  bool guards_valid_ = false;

  std::size_t stage_index_ = 0;
  double stage_entry_t_ = 0.0;
  bool mission_complete_ = false;

  Eigen::Vector3d cmd_center_ = Eigen::Vector3d::Zero();
  double cmd_sep_ = 0.0;
  Eigen::Vector3d home_center_ = Eigen::Vector3d::Zero();
  Eigen::Vector3d target_leader_ = Eigen::Vector3d::Zero();
  Eigen::Vector3d target_follower_ = Eigen::Vector3d::Zero();
  double target_yaw_leader_ = 0.0;
  double target_yaw_follower_ = std::numbers::pi;

  bool window_open_ = false;
  double window_t0_ = 0.0;
  double t_max_ = 0.0;
  double settle_entry_t_ = 0.0;
  bool in_settle_ = false;

  bool abort_landing_ = false;
  double abort_t_ = 0.0;
  Eigen::Vector3d abort_hover_leader_ = Eigen::Vector3d::Zero();
  Eigen::Vector3d abort_hover_follower_ = Eigen::Vector3d::Zero();

  ControlCommand cmd_leader_;
  ControlCommand cmd_follower_;

  std::vector<Event> pending_events_;
  TrialRecord rec_;
};

void TrialRunner::emit_sensor_events(VehicleSim& v, int vehicle_idx, double t0,
                                     double t1, std::vector<SensorEvent>& out) {
  // Fixed draw order per tick: imu block, then mocap block.
  while (static_cast<double>(v.next_imu) / cfg_.sensors.imu_rate <= t1 + kEps) {
    const double ts = static_cast<double>(v.next_imu) / cfg_.sensors.imu_rate;
    ++v.next_imu;
    const RigidState truth = truth_between(v.prev_truth, v.truth, t0, std::max(ts, t0));
    SensorEvent ev;
    ev.kind = 0;
    ev.vehicle = vehicle_idx;
    ev.imu = sample_imu(truth, v.applied_accel, cfg_.sensors, ts, rng_);
    ev.stamp = ev.imu.stamp;
    out.push_back(ev);
  }
  while (static_cast<double>(v.next_mocap) / cfg_.sensors.mocap_rate <= t1 + kEps) {
    const double ts = static_cast<double>(v.next_mocap) / cfg_.sensors.mocap_rate;
    ++v.next_mocap;
    const RigidState truth = truth_between(v.prev_truth, v.truth, t0, std::max(ts, t0));
    if (auto sample = sample_mocap(truth, cfg_.sensors, ts, rng_))
      v.mocap_queue.push(*sample, ts, cfg_.sensors);
  }
}

void TrialRunner::process_sensor_events(double t1, std::vector<SensorEvent>& events) {
  for (VehicleSim* v : {&leader_, &follower_}) {
    const int idx = v == &leader_ ? 0 : 1;
    for (const MocapSample& m : v->mocap_queue.pop_due(t1)) {
      SensorEvent ev;
      ev.kind = 1;
      ev.vehicle = idx;
      ev.mocap = m;
      ev.stamp = m.stamp;
      events.push_back(ev);
    }
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const SensorEvent& a, const SensorEvent& b) {
                     if (a.stamp != b.stamp) return a.stamp < b.stamp;
                     if (a.kind != b.kind) return a.kind < b.kind;
                     return a.vehicle < b.vehicle;
                   });

  for (const SensorEvent& ev : events) {
    VehicleSim& v = ev.vehicle == 0 ? leader_ : follower_;
    if (ev.kind == 0) {
      if (!v.est) continue;  // no pose fix yet
      const double dt = ev.stamp - v.est->stamp;
      if (dt > 0.0) v.est = ekf_predict(*v.est, ev.imu, cfg_.ekf, dt);
    } else {
      if (!v.est) {
        v.est = ekf_init(ev.mocap, cfg_.ekf);
        continue;
      }
      UpdateInfo info;
      v.est = ekf_update_mocap(*v.est, ev.mocap, cfg_.ekf, &info);
      if (info.rejected_gate)
        pending_events_.push_back(
            {ev.stamp, "mocap_rejected",
             std::string("vehicle=") + (ev.vehicle == 0 ? "leader" : "follower")});
    }
  }
  events.clear();
}

void TrialRunner::prime_sensors() {
  std::vector<SensorEvent> events;
  emit_sensor_events(leader_, 0, 0.0, 0.0, events);
  emit_sensor_events(follower_, 1, 0.0, 0.0, events);
  process_sensor_events(0.0, events);
}

void TrialRunner::update_stage(double t) {
  if (abort_landing_ || mission_complete_) return;
  if (stage_index_ >= cfg_.script.stages.size()) {
    mission_complete_ = true;
    return;
  }
  const Stage& stage = cfg_.script.stages[stage_index_];

  const bool ests_ready = leader_.est && follower_.est;
  auto vehicles_settled_at = [&](const Eigen::Vector3d& tl, const Eigen::Vector3d& tf) {
    if (!ests_ready) return false;
    return (leader_.est->position() - tl).norm() < cfg_.docking.stage_pos_tol &&
           (follower_.est->position() - tf).norm() < cfg_.docking.stage_pos_tol &&
           leader_.est->velocity().norm() < cfg_.docking.stage_speed_tol &&
           follower_.est->velocity().norm() < cfg_.docking.stage_speed_tol;
  };

  bool advance = false;
  switch (stage.kind) {
    case StageKind::Takeoff: {
      const bool glided = cmd_center_.z() == stage.altitude;
      if (glided && ests_ready &&
          std::abs(leader_.est->position().z() - stage.altitude) <
              cfg_.docking.stage_pos_tol &&
          std::abs(follower_.est->position().z() - stage.altitude) <
              cfg_.docking.stage_pos_tol &&
          leader_.est->velocity().norm() < cfg_.docking.stage_speed_tol &&
          follower_.est->velocity().norm() < cfg_.docking.stage_speed_tol)
        advance = true;
      break;
    }
    case StageKind::FormationEntry: {
      const double goal_sep = cfg_.formation.d_dock + cfg_.docking.entry_offset;
      if (cmd_sep_ == goal_sep &&
          vehicles_settled_at(target_leader_, target_follower_))
        advance = true;
      break;
    }
    case StageKind::DockingWindow: {
      if (!window_open_) {
        window_open_ = true;
        window_t0_ = t;
        const Eigen::Vector3d pl =
            ests_ready ? leader_.est->position() : leader_.truth.position;
        const Eigen::Vector3d pf =
            ests_ready ? follower_.est->position() : follower_.truth.position;
        t_max_ = mission_timeout(cfg_.formation, pl, pf);
        rec_.window_start_t = t;
        rec_.t_max = t_max_;
        char detail[96];
        std::snprintf(detail, sizeof detail, "t_max=%.17g", t_max_);
        pending_events_.push_back({t, "window_start", detail});
        pending_events_.push_back(
            {t, "phase_enter", "approach from=none reason=window_start"});
        if (cfg_.formation.t_usr < 30.0)
          pending_events_.push_back(
              {t, "config_warning",
               "formation.t_usr below the 30 s timeout floor; user cap wins"});
      }
      if (sup_.phase().kind == PhaseKind::Success) advance = true;
      break;
    }
    case StageKind::Hold: {
      if (t - stage_entry_t_ >= stage.duration) advance = true;
      break;
    }
    case StageKind::Return: {
      if ((cmd_center_ - home_center_).norm() == 0.0 &&
          vehicles_settled_at(target_leader_, target_follower_))
        advance = true;
      break;
    }
    case StageKind::Land: {
      if (leader_.truth.position.z() < 0.08 && follower_.truth.position.z() < 0.08) {
        mission_complete_ = true;
        return;
      }
      break;
    }
  }

  // Scripted stages are watchdogged; the docking window is governed by the
  // supervisor timeout instead.
  if (!advance && stage.kind != StageKind::DockingWindow &&
      t - stage_entry_t_ > cfg_.docking.stage_timeout)
    advance = true;

  if (advance) {
    ++stage_index_;
    stage_entry_t_ = t;
    if (stage_index_ >= cfg_.script.stages.size()) mission_complete_ = true;
    pending_events_.push_back(
        {t, "stage_enter",
         stage_index_ < cfg_.script.stages.size()
             ? to_string(cfg_.script.stages[stage_index_].kind)
             : "done"});
  }
}

void TrialRunner::step_supervisor(double t) {
  if (!window_open_ || sup_.phase().terminal()) return;

  // Watchdog even when the estimator never produced guard signals.
  if (!guards_valid_) {
    if (t - window_t0_ > t_max_) {
      auto events = sup_.abort(AbortReason{AbortKind::Timeout, {}}, t);
      pending_events_.insert(pending_events_.end(), events.begin(), events.end());
    }
    return;
  }

  guards_.latched = latch_.engaged;
  guards_.t = t;
  guards_.hold_elapsed = in_settle_ ? t - settle_entry_t_ : 0.0;

  const PhaseKind before = sup_.phase().kind;
  auto events = sup_.step(guards_, window_t0_ + t_max_);
  pending_events_.insert(pending_events_.end(), events.begin(), events.end());

  if (sup_.phase().kind == PhaseKind::Settle && before != PhaseKind::Settle) {
    in_settle_ = true;
    settle_entry_t_ = t;
    if (!rec_.time_to_dock) rec_.time_to_dock = t - window_t0_;
  }
  if (sup_.phase().kind != PhaseKind::Settle &&
      sup_.phase().kind != PhaseKind::Success)
    in_settle_ = false;
}

void TrialRunner::update_setpoints(double t) {
  const double dt = cfg_.dt;
  const double v_sync = sync_speed(cfg_.formation);

  if (abort_landing_) {
    // Hover fallback, then a straight descent.
    Eigen::Vector3d tl = abort_hover_leader_;
    Eigen::Vector3d tf = abort_hover_follower_;
    if (t - abort_t_ > 2.0) {
      const double drop = cfg_.docking.climb_speed * (t - abort_t_ - 2.0);
      tl.z() = std::max(0.0, tl.z() - drop);
      tf.z() = std::max(0.0, tf.z() - drop);
    }
    target_leader_ = tl;
    target_follower_ = tf;
    return;
  }
  if (stage_index_ >= cfg_.script.stages.size()) return;

  const Stage& stage = cfg_.script.stages[stage_index_];
  switch (stage.kind) {
    case StageKind::Takeoff: {
      Eigen::Vector3d goal = cmd_center_;
      goal.z() = stage.altitude;
      glide_vec(cmd_center_, goal, cfg_.docking.climb_speed, dt);
      home_center_ = goal;
      break;
    }
    case StageKind::FormationEntry: {
      glide_scalar(cmd_sep_, cfg_.formation.d_dock + cfg_.docking.entry_offset,
                   v_sync, dt);
      break;
    }
    case StageKind::DockingWindow: {
      if (!cfg_.supervisor_enabled) {
        // Waypoint-only arm: straight to the final docking targets.
        cmd_center_ = cfg_.formation.center;
        cmd_sep_ = cfg_.formation.d_dock;
        break;
      }
      const double d = cfg_.formation.d_dock;
      glide_vec(cmd_center_, cfg_.formation.center, v_sync, dt);
      if (!latch_.engaged && !contact_armed_) {
        // A bounced latch must separate past the re-arm distance before the
        // next attempt; retreat to the approach corridor first.
        glide_scalar(cmd_sep_, d + cfg_.docking.approach_standoff, 0.2, dt);
        break;
      }
      const bool calm = guards_valid_ &&
                        guards_.v_rel < cfg_.tolerances.eps_v &&
                        std::abs(guards_.e_psi) < cfg_.tolerances.eps_psi;
      switch (sup_.phase().kind) {
        case PhaseKind::Approach:
          glide_scalar(cmd_sep_, d + cfg_.docking.approach_standoff, v_sync, dt);
          break;
        case PhaseKind::Align:
          // Hold the corridor until yaw and relative speed are inside the
          // fine gates; only then close the remaining gap.
          glide_scalar(cmd_sep_,
                       calm ? d : d + cfg_.docking.approach_standoff,
                       cfg_.docking.align_speed, dt);
          break;
        case PhaseKind::Capture:
          // Push through the engagement range, pausing whenever the
          // relative motion heats up again.
          if (calm || latch_.engaged)
            glide_scalar(cmd_sep_, d - cfg_.docking.capture_push,
                         cfg_.docking.align_speed, dt);
          break;
        case PhaseKind::Settle:
        case PhaseKind::Success:
          cmd_sep_ = d;
          break;
        case PhaseKind::Aborted:
          break;
      }
      break;
    }
    case StageKind::Hold:
      break;
    case StageKind::Return:
      glide_vec(cmd_center_, home_center_, v_sync, dt);
      break;
    case StageKind::Land: {
      Eigen::Vector3d goal = cmd_center_;
      goal.z() = 0.0;
      glide_vec(cmd_center_, goal, cfg_.docking.climb_speed, dt);
      break;
    }
  }

  const Eigen::Vector3d half(0.5 * cmd_sep_, 0.0, 0.0);
  target_leader_ = cmd_center_ - half;
  target_follower_ = cmd_center_ + half;
}

void TrialRunner::resolve_contact(double t) {
  if (latch_.engaged) {
    // Without kinematic coupling the magnets release once the faces drift
    // back out of engagement range.
    if (!cfg_.world.latch.hold_rigid) {
      const double gap = baseline_error(leader_.truth.position,
                                        follower_.truth.position,
                                        cfg_.formation.d_dock);
      if (gap > cfg_.world.latch.engage_distance) {
        latch_.engaged = false;
        contact_armed_ = false;
        pending_events_.push_back({t, "contact", "outcome=released"});
      }
    }
    return;
  }
  const double gap = baseline_error(leader_.truth.position, follower_.truth.position,
                                    cfg_.formation.d_dock);
  if (!contact_armed_) {
    if (gap >= cfg_.world.latch.rearm_distance) contact_armed_ = true;
    return;
  }
  if (gap > cfg_.world.latch.engage_distance) return;

  const ContactOutcome outcome =
      check_contact(leader_.truth, follower_.truth, cfg_.world.latch,
                    cfg_.formation.d_dock);
  contact_armed_ = false;
  rec_.any_contact = true;
  if (outcome == ContactOutcome::Latched) {
    if (inject_pending_) {
      follower_.truth.velocity.z() += cfg_.inject.capture_vz;
      inject_pending_ = false;
      pending_events_.push_back({t, "inject", "capture_vz"});
    }
    auto [l, f] = merge_latched_velocities(leader_.truth, follower_.truth);
    leader_.truth = l;
    follower_.truth = f;
    latch_.engaged = true;
    latch_.gap_at_latch = gap;
    latch_.rel_yaw_at_latch = yaw_error(leader_.truth.yaw, follower_.truth.yaw);
    latch_.t_latch = t;
    pending_events_.push_back({t, "contact", "outcome=latched"});
  } else {
    auto [l, f] = resolve_bounce(leader_.truth, follower_.truth, cfg_.world.latch);
    leader_.truth = l;
    follower_.truth = f;
    pending_events_.push_back({t, "contact", "outcome=bounce_off"});
    if (window_open_ && !sup_.phase().terminal()) {
      auto events = sup_.notify_bounce(t);
      pending_events_.insert(pending_events_.end(), events.begin(), events.end());
    }
  }
}

void TrialRunner::integrate_world(double t) {
  leader_.prev_truth = leader_.truth;
  follower_.prev_truth = follower_.truth;

  if (latch_.engaged && cfg_.world.latch.hold_rigid) {
    auto [l, f] = step_latched_pair(leader_.truth, follower_.truth, latch_,
                                    cmd_leader_, cmd_follower_, cfg_.world, cfg_.dt);
    leader_.truth = l;
    follower_.truth = f;
  } else {
    leader_.truth = step_vehicle(leader_.truth, cmd_leader_, cfg_.world,
                                 leader_.disturbance, cfg_.dt);
    follower_.truth = step_vehicle(follower_.truth, cmd_follower_, cfg_.world,
                                   follower_.disturbance, cfg_.dt);
  }
  leader_.applied_accel =
      (leader_.truth.velocity - leader_.prev_truth.velocity) / cfg_.dt;
  follower_.applied_accel =
      (follower_.truth.velocity - follower_.prev_truth.velocity) / cfg_.dt;
  (void)t;
}

void TrialRunner::log_row(double t) {
  TickRow row;
  row.t = t;
  row.truth_leader = leader_.truth;
  row.truth_follower = follower_.truth;
  if (leader_.est) {
    row.est_leader = leader_.est->x;
    row.est_stamp_leader = leader_.est->stamp;
  }
  if (follower_.est) {
    row.est_follower = follower_.est->x;
    row.est_stamp_follower = follower_.est->stamp;
  }
  row.stage = abort_landing_ ? "abort_landing"
              : stage_index_ < cfg_.script.stages.size()
                  ? to_string(cfg_.script.stages[stage_index_].kind)
                  : "done";
  row.phase = window_open_ || sup_.phase().terminal() ? phase_label(sup_.phase()) : "";
  row.guards_valid = guards_valid_;
  row.e_b = guards_.e_b;
  row.e_psi = guards_.e_psi;
  row.v_rel = guards_.v_rel;
  row.latched = latch_.engaged;
  row.hold_elapsed = in_settle_ ? t - settle_entry_t_ : 0.0;
  row.cmd_leader = cmd_leader_;
  row.cmd_follower = cmd_follower_;
  row.events = std::move(pending_events_);
  pending_events_.clear();

  if (writer_) writer_->write_tick(row);
  rec_.ticks.push_back(std::move(row));
}

bool TrialRunner::mission_done(double t) const {
  if (mission_complete_) return true;
  if (abort_landing_) {
    if (sup_.phase().abort && sup_.phase().abort->kind == AbortKind::EstimatorFailure)
      return true;
    const bool landed = leader_.truth.position.z() < 0.08 &&
                        follower_.truth.position.z() < 0.08;
    return landed || t - abort_t_ > 20.0;
  }
  return t > 600.0;  // defensive cap; scripted watchdogs end trials well before
}

TrialRecord TrialRunner::run() {
  validate_config(cfg_);
  rec_.config_digest = config_digest(cfg_);

  sup_ = Supervisor(cfg_.tolerances, cfg_.supervisor);
  gfilter_ = GuardFilter(cfg_.docking.guard_filter_hz, cfg_.dt);

  leader_.truth = cfg_.initial_leader;
  follower_.truth = cfg_.initial_follower;
  leader_.prev_truth = leader_.truth;
  follower_.prev_truth = follower_.truth;
  inject_pending_ = cfg_.inject.capture_vz != 0.0;

  cmd_center_ = 0.5 * (leader_.truth.position + follower_.truth.position);
  cmd_sep_ = (follower_.truth.position - leader_.truth.position).norm();
  home_center_ = cmd_center_;
  contact_armed_ = baseline_error(leader_.truth.position, follower_.truth.position,
                                  cfg_.formation.d_dock) >=
                   cfg_.world.latch.rearm_distance;

  prime_sensors();

  std::vector<SensorEvent> events;
  long k = 0;
  while (true) {
    const double t = static_cast<double>(k) * cfg_.dt;

    // Guard signals from the current estimates.
    if (leader_.est && follower_.est) {
      const double raw_e_b =
          baseline_error(leader_.est->position(), follower_.est->position(),
                         cfg_.formation.d_dock);
      const double raw_e_psi = yaw_error(leader_.est->yaw(), follower_.est->yaw());
      const double raw_v_rel =
          relative_speed(leader_.est->velocity(), follower_.est->velocity());
      gfilter_.update(raw_e_b, raw_e_psi, raw_v_rel);
      guards_valid_ = true;
      guards_.e_b = gfilter_.e_b();
      guards_.e_psi = gfilter_.e_psi();
      guards_.v_rel = gfilter_.v_rel();
    }

    // Safety watchdogs on the estimates.
    if (!abort_landing_ && !sup_.phase().terminal() && leader_.est && follower_.est) {
      if (auto fault = safety_check(*leader_.est, *follower_.est, cfg_.safety,
                                    host_timestamp(t, cfg_.sensors))) {
        auto ev = sup_.abort(*fault, t);
        pending_events_.insert(pending_events_.end(), ev.begin(), ev.end());
      }
    }

    update_stage(t);
    step_supervisor(t);

    if (sup_.phase().kind == PhaseKind::Aborted && !abort_landing_) {
      abort_landing_ = true;
      abort_t_ = t;
      abort_hover_leader_ =
          leader_.est ? leader_.est->position() : leader_.truth.position;
      abort_hover_follower_ =
          follower_.est ? follower_.est->position() : follower_.truth.position;
    }

    update_setpoints(t);

    // Commands from the estimates; idle until the first pose fix.
    if (leader_.est) {
      auto [cmd, ctrl] = pid_step(*leader_.est, target_leader_, target_yaw_leader_,
                                  cfg_.gains_leader, leader_.ctrl, cfg_.dt);
      cmd_leader_ = cmd;
      leader_.ctrl = ctrl;
    } else {
      cmd_leader_ = ControlCommand{};
    }
    if (follower_.est) {
      auto [cmd, ctrl] =
          pid_step(*follower_.est, target_follower_, target_yaw_follower_,
                   cfg_.gains_follower, follower_.ctrl, cfg_.dt);
      cmd_follower_ = cmd;
      follower_.ctrl = ctrl;
    } else {
      cmd_follower_ = ControlCommand{};
    }

    resolve_contact(t);
    log_row(t);
    if (mission_done(t)) break;

    // Advance the plant and the sensor pipeline to t + dt.
    leader_.disturbance =
        sample_disturbance(leader_.disturbance, cfg_.world.disturbance, cfg_.dt, rng_);
    follower_.disturbance = sample_disturbance(follower_.disturbance,
                                               cfg_.world.disturbance, cfg_.dt, rng_);
    integrate_world(t);

    const double t_next = static_cast<double>(k + 1) * cfg_.dt;
    try {
      emit_sensor_events(leader_, 0, t, t_next, events);
      emit_sensor_events(follower_, 1, t, t_next, events);
      process_sensor_events(t_next, events);
    } catch (const NumericError& e) {
      auto ev = sup_.abort(AbortReason{AbortKind::EstimatorFailure, {}}, t_next);
      pending_events_.insert(pending_events_.end(), ev.begin(), ev.end());
      pending_events_.push_back({t_next, "numeric_failure", e.what()});
      abort_landing_ = true;
      abort_t_ = t_next;
    }
    ++k;
  }

  rec_.final_phase = sup_.phase();
  rec_.align_entered = sup_.align_entered();
  rec_.capture_entered = sup_.capture_entered();
  rec_.outcome.success = sup_.phase().kind == PhaseKind::Success;
  if (!rec_.outcome.success)
    rec_.outcome.failure = classify_failure(rec_.trace_summary());

  if (writer_) writer_->write_summary(rec_.outcome.label(), rec_.time_to_dock);
  return std::move(rec_);
}

}  // namespace

TrialRecord run_trial(const TrialConfig& cfg, TrialLogWriter* writer) {
  TrialRunner runner(cfg, writer);
  return runner.run();
}

WilsonInterval success_rate_ci(int k, int n) {
  if (n < 1 || k < 0 || k > n)
    throw std::invalid_argument("success_rate_ci: need 0 <= k <= n, n >= 1");
  constexpr double z = 1.96;
  const double z2 = z * z;
  const double nn = static_cast<double>(n);
  const double phat = static_cast<double>(k) / nn;
  const double denom = 1.0 + z2 / nn;
  const double center = (phat + z2 / (2.0 * nn)) / denom;
  const double half =
      z * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn)) / denom;

  WilsonInterval w;
  w.estimate = phat;
  w.lo = k == 0 ? 0.0 : std::max(0.0, center - half);
  w.hi = k == n ? 1.0 : std::min(1.0, center + half);
  return w;
}

ConsistencyMetrics consistency_metrics(const TrialRecord& rec) {
  double ssq_b = 0.0, ssq_psi = 0.0;
  long count = 0;
  for (const TickRow& row : rec.ticks) {
    if (row.phase.rfind("settle", 0) != 0) continue;
    ssq_b += row.e_b * row.e_b;
    ssq_psi += row.e_psi * row.e_psi;
    ++count;
  }
  ConsistencyMetrics m;
  if (count > 0) {
    m.baseline_rms = std::sqrt(ssq_b / static_cast<double>(count));
    m.yaw_rms = std::sqrt(ssq_psi / static_cast<double>(count));
  }
  return m;
}

CampaignSummary summarize_campaign(const std::vector<TrialStats>& rows) {
  CampaignSummary s;
  s.n_trials = static_cast<int>(rows.size());
  std::vector<double> ttd;
  double rms_b_sum = 0.0, rms_psi_sum = 0.0;
  int rms_count = 0;
  for (const TrialStats& row : rows) {
    if (row.outcome.success) {
      ++s.successes;
      if (row.time_to_dock) ttd.push_back(*row.time_to_dock);
    } else if (row.outcome.failure) {
      ++s.failure_histogram[*row.outcome.failure];
    }
    if (row.consistency.baseline_rms) {
      rms_b_sum += *row.consistency.baseline_rms;
      rms_psi_sum += *row.consistency.yaw_rms;
      ++rms_count;
    }
  }
  if (s.n_trials > 0) s.success_rate = success_rate_ci(s.successes, s.n_trials);
  if (!ttd.empty()) {
    std::sort(ttd.begin(), ttd.end());
    double sum = 0.0;
    for (double v : ttd) sum += v;
    s.time_to_dock_mean = sum / static_cast<double>(ttd.size());
    s.time_to_dock_median = ttd[(ttd.size() - 1) / 2];
    const std::size_t p95_rank = static_cast<std::size_t>(
        std::ceil(0.95 * static_cast<double>(ttd.size())));
    s.time_to_dock_p95 = ttd[p95_rank == 0 ? 0 : p95_rank - 1];
  }
  if (rms_count > 0) {
    s.baseline_rms = rms_b_sum / rms_count;
    s.yaw_rms = rms_psi_sum / rms_count;
  }
  return s;
}

CampaignResult run_campaign(const TrialConfig& cfg, int n, std::uint64_t base_seed,
                            const CampaignOptions& opts) {
  if (n < 1) throw std::invalid_argument("run_campaign: n must be >= 1");

  std::vector<TrialStats> rows(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  const int workers = std::max(1, std::min(opts.parallelism, n));

  auto work = [&]() {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      TrialConfig trial_cfg = cfg;
      trial_cfg.seed = base_seed + static_cast<std::uint64_t>(i);

      std::unique_ptr<TrialLogWriter> writer;
      if (!opts.log_dir.empty() && i < opts.keep_logs)
        writer = std::make_unique<TrialLogWriter>(
            opts.log_dir + "/trial_" + std::to_string(trial_cfg.seed) + ".jsonl",
            config_digest(trial_cfg), trial_cfg.seed, trial_cfg.dt,
            trial_cfg.supervisor_enabled);

      const TrialRecord rec = run_trial(trial_cfg, writer.get());
      TrialStats stats;
      stats.seed = trial_cfg.seed;
      stats.outcome = rec.outcome;
      stats.time_to_dock = rec.time_to_dock;
      stats.consistency = consistency_metrics(rec);
      rows[static_cast<std::size_t>(i)] = std::move(stats);
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& th : pool) th.join();
  }

  return CampaignResult{summarize_campaign(rows), std::move(rows)};
}

}  // namespace dockbench
