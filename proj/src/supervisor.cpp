#include "dockbench/supervisor.hpp"

#include <cmath>
#include <numbers>

namespace dockbench {

const char* to_string(PhaseKind kind) {
  switch (kind) {
    case PhaseKind::Approach: return "approach";
    case PhaseKind::Align: return "align";
    case PhaseKind::Capture: return "capture";
    case PhaseKind::Settle: return "settle";
    case PhaseKind::Success: return "success";
    case PhaseKind::Aborted: return "aborted";
  }
  return "?";
}

const char* to_string(SafetyFaultKind kind) {
  switch (kind) {
    case SafetyFaultKind::Geofence: return "geofence";
    case SafetyFaultKind::Overspeed: return "overspeed";
    case SafetyFaultKind::StaleEstimate: return "stale_estimate";
  }
  return "?";
}

const char* to_string(AbortKind kind) {
  switch (kind) {
    case AbortKind::Timeout: return "timeout";
    case AbortKind::SafetyFault: return "safety_fault";
    case AbortKind::EstimatorFailure: return "estimator_failure";
  }
  return "?";
}

const char* to_string(FailureMode mode) {
  switch (mode) {
    case FailureMode::Timeout: return "timeout";
    case FailureMode::Misalignment: return "misalignment";
    case FailureMode::BounceOff: return "bounce_off";
    case FailureMode::SafetyAbort: return "safety_abort";
  }
  return "?";
}

std::string phase_label(const Phase& phase) {
  std::string label = to_string(phase.kind);
  if (phase.kind == PhaseKind::Aborted && phase.abort) {
    label += ":";
    label += to_string(phase.abort->kind);
    if (phase.abort->fault) {
      label += ":";
      label += to_string(*phase.abort->fault);
    }
  }
  return label;
}

Supervisor::Supervisor(const GateTolerances& tol, const SupervisorOptions& opts)
    : tol_(tol), opts_(opts), retries_left_(opts.bounce_retries) {}

void Supervisor::enter(PhaseKind next, double t, std::vector<Event>& events,
                       const std::string& why) {
  const std::string from = to_string(phase_.kind);
  phase_.kind = next;
  events.push_back({t, "phase_enter",
                    std::string(to_string(next)) + " from=" + from +
                        (why.empty() ? "" : " " + why)});
}

std::vector<Event> Supervisor::step(const GuardSignals& guards, double t_max) {
  if (phase_.terminal())
    throw ContractViolation("supervisor step on terminal phase");

  std::vector<Event> events;

  // Timeout beats every other guard: nothing else fires this tick.
  if (guards.t > t_max) {
    phase_.abort = AbortReason{AbortKind::Timeout, {}};
    enter(PhaseKind::Aborted, guards.t, events, "reason=timeout");
    events.push_back({guards.t, "abort", "reason=timeout"});
    return events;
  }

  // Debounced corridor-exit regression.
  if (phase_.kind == PhaseKind::Align) {
    if (std::abs(guards.e_b) >= tol_.eps_b_coarse) {
      if (align_exit_since_ < 0.0) align_exit_since_ = guards.t;
      if (guards.t - align_exit_since_ >= opts_.debounce_window) {
        align_exit_since_ = -1.0;
        enter(PhaseKind::Approach, guards.t, events, "reason=corridor_exit");
      }
    } else {
      align_exit_since_ = -1.0;
    }
  }

  // Forward guards cascade within a tick, mirroring sequential evaluation.
  bool advanced = true;
  while (advanced && !phase_.terminal()) {
    advanced = false;
    switch (phase_.kind) {
      case PhaseKind::Approach:
        if (std::abs(guards.e_b) < tol_.eps_b_coarse) {
          enter(PhaseKind::Align, guards.t, events, "");
          events.push_back({guards.t, "gate_eval",
                            "gate=coarse e_b=" + std::to_string(guards.e_b)});
          align_exit_since_ = -1.0;
          align_entered_ = true;
          advanced = true;
        }
        break;
      case PhaseKind::Align:
        if (std::abs(guards.e_b) < tol_.eps_b_fine &&
            std::abs(guards.e_psi) < tol_.eps_psi && guards.v_rel < tol_.eps_v) {
          enter(PhaseKind::Capture, guards.t, events, "");
          events.push_back({guards.t, "gate_eval",
                            "gate=fine e_b=" + std::to_string(guards.e_b) +
                                " e_psi=" + std::to_string(guards.e_psi) +
                                " v_rel=" + std::to_string(guards.v_rel)});
          capture_entered_ = true;
          advanced = true;
        }
        break;
      case PhaseKind::Capture:
        if (guards.latched) {
          enter(PhaseKind::Settle, guards.t, events, "");
          advanced = true;
        }
        break;
      case PhaseKind::Settle:
        if (guards.hold_elapsed > tol_.t_hold) {
          enter(PhaseKind::Success, guards.t, events, "");
          advanced = true;
        }
        break;
      default:
        break;
    }
  }
  return events;
}

std::vector<Event> Supervisor::notify_bounce(double t) {
  std::vector<Event> events;
  if (phase_.terminal()) return events;
  if (retries_left_ > 0) {
    --retries_left_;
    if (phase_.kind != PhaseKind::Approach)
      enter(PhaseKind::Approach, t, events, "reason=bounce_retry");
    events.push_back({t, "retry", "retries_left=" + std::to_string(retries_left_)});
    align_exit_since_ = -1.0;
  } else {
    events.push_back({t, "retry_exhausted", ""});
  }
  return events;
}

std::vector<Event> Supervisor::abort(const AbortReason& reason, double t) {
  std::vector<Event> events;
  if (phase_.terminal()) return events;
  phase_.abort = reason;
  const std::string detail =
      std::string("reason=") + to_string(reason.kind) +
      (reason.fault ? std::string(" fault=") + to_string(*reason.fault) : "");
  enter(PhaseKind::Aborted, t, events, detail);
  events.push_back({t, "abort", detail});
  return events;
}

GuardFilter::GuardFilter(double cutoff_hz, double dt)
    : alpha_(1.0 - std::exp(-2.0 * std::numbers::pi * cutoff_hz * dt)) {}

void GuardFilter::update(double e_b_raw, double e_psi_raw, double v_rel_raw) {
  if (!initialized_) {
    e_b_ = e_b_raw;
    e_psi_ = e_psi_raw;
    v_rel_ = v_rel_raw;
    initialized_ = true;
    return;
  }
  e_b_ += alpha_ * (e_b_raw - e_b_);
  e_psi_ += alpha_ * (e_psi_raw - e_psi_);
  v_rel_ += alpha_ * (v_rel_raw - v_rel_);
}

std::optional<AbortReason> safety_check(const EstimatedState& leader,
                                        const EstimatedState& follower,
                                        const SafetyLimits& limits, double t_now) {
  for (const EstimatedState* est : {&leader, &follower}) {
    const Eigen::Vector3d p = est->position();
    if ((p.array() < limits.geofence_min.array()).any() ||
        (p.array() > limits.geofence_max.array()).any())
      return AbortReason{AbortKind::SafetyFault, SafetyFaultKind::Geofence};
    if (est->velocity().norm() > limits.max_speed)
      return AbortReason{AbortKind::SafetyFault, SafetyFaultKind::Overspeed};
    if (t_now - est->stamp > limits.watchdog_window)
      return AbortReason{AbortKind::SafetyFault, SafetyFaultKind::StaleEstimate};
  }
  return std::nullopt;
}

std::optional<FailureMode> classify_failure(const TraceSummary& trace) {
  if (trace.final_phase.kind == PhaseKind::Success) return std::nullopt;

  if (trace.final_phase.kind == PhaseKind::Aborted && trace.final_phase.abort) {
    const AbortKind kind = trace.final_phase.abort->kind;
    if (kind == AbortKind::SafetyFault || kind == AbortKind::EstimatorFailure)
      return FailureMode::SafetyAbort;
  }
  if (trace.any_contact) return FailureMode::BounceOff;
  if (trace.align_entered && !trace.capture_entered) return FailureMode::Misalignment;
  return FailureMode::Timeout;
}

}  // namespace dockbench
