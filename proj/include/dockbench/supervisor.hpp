#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "dockbench/estimation.hpp"

namespace dockbench {

enum class PhaseKind { Approach, Align, Capture, Settle, Success, Aborted };

enum class SafetyFaultKind { Geofence, Overspeed, StaleEstimate };

enum class AbortKind { Timeout, SafetyFault, EstimatorFailure };

struct AbortReason {
  AbortKind kind = AbortKind::Timeout;
  std::optional<SafetyFaultKind> fault;
};

struct Phase {
  PhaseKind kind = PhaseKind::Approach;
  std::optional<AbortReason> abort;

  bool terminal() const {
    return kind == PhaseKind::Success || kind == PhaseKind::Aborted;
  }
};

const char* to_string(PhaseKind kind);
const char* to_string(SafetyFaultKind kind);
const char* to_string(AbortKind kind);
std::string phase_label(const Phase& phase);

/// Gate thresholds for the guarded phase transitions. The fine baseline gate
/// must not exceed the coarse one.
struct GateTolerances {
  double eps_b_coarse = 0.05;   // approach corridor half-width [m]
  double eps_b_fine = 0.005;    // capture-authorization baseline gate [m]
  double eps_psi = 0.0872665;   // yaw gate [rad] (5 deg)
  double eps_v = 0.05;          // relative-speed gate [m/s]
  double t_hold = 3.0;          // required post-latch hold [s]
};

/// Inputs the machine evaluates each tick, derived from filtered estimates.
struct GuardSignals {
  double e_b = 0.0;           // baseline error [m]
  double e_psi = 0.0;         // opposing-yaw error [rad]
  double v_rel = 0.0;         // relative speed [m/s]
  bool latched = false;
  double t = 0.0;             // mission clock since docking start [s]
  double hold_elapsed = 0.0;  // time in Settle [s]
};

struct Event {
  double t = 0.0;
  std::string type;
  std::string detail;
};

struct SupervisorOptions {
  double debounce_window = 0.2;  // sustained corridor exit before regressing [s]
  int bounce_retries = 1;        // automatic re-approaches after a bounce
};

/// Guarded docking phase machine:
///   Approach -> Align -> Capture -> Settle -> Success,
/// any phase -> Aborted on timeout or an externally reported fault.
/// Sanctioned back-edges: Align regresses to Approach after a debounced
/// corridor exit, and a bounce-off retries from Approach while retries last.
/// Terminal phases are absorbing; stepping one is a contract violation.
class Supervisor {
 public:
  Supervisor() = default;
  Supervisor(const GateTolerances& tol, const SupervisorOptions& opts);

  /// Advances the machine one tick. Guard evaluation cascades, so several
  /// forward transitions may fire in one call; one event is emitted per
  /// transition. Timeout wins over every other guard.
  std::vector<Event> step(const GuardSignals& guards, double t_max);

  /// Reports a bounce-off contact. Consumes a retry and restarts the
  /// approach while retries remain; afterwards the machine holds its phase
  /// and lets the timeout expire.
  std::vector<Event> notify_bounce(double t);

  /// External abort (safety fault, estimator failure).
  std::vector<Event> abort(const AbortReason& reason, double t);

  const Phase& phase() const { return phase_; }
  const GateTolerances& tolerances() const { return tol_; }
  bool align_entered() const { return align_entered_; }
  bool capture_entered() const { return capture_entered_; }
  int retries_left() const { return retries_left_; }

 private:
  void enter(PhaseKind next, double t, std::vector<Event>& events,
             const std::string& why);

  GateTolerances tol_;
  SupervisorOptions opts_;
  Phase phase_;
  double align_exit_since_ = -1.0;  // <0: corridor currently satisfied
  int retries_left_ = 1;
  bool align_entered_ = false;
  bool capture_entered_ = false;
};

/// First-order low-pass shared by the gate signals, seeded with the first
/// raw value. One update per control tick.
class GuardFilter {
 public:
  GuardFilter() = default;
  GuardFilter(double cutoff_hz, double dt);

  void update(double e_b_raw, double e_psi_raw, double v_rel_raw);
  bool initialized() const { return initialized_; }
  double e_b() const { return e_b_; }
  double e_psi() const { return e_psi_; }
  double v_rel() const { return v_rel_; }

 private:
  double alpha_ = 1.0;
  bool initialized_ = false;
  double e_b_ = 0.0;
  double e_psi_ = 0.0;
  double v_rel_ = 0.0;
};

/// Operational safety limits checked on the estimates each tick.
struct SafetyLimits {
  Eigen::Vector3d geofence_min = Eigen::Vector3d(-3.0, -3.0, -0.2);
  Eigen::Vector3d geofence_max = Eigen::Vector3d(3.0, 3.0, 4.0);
  double max_speed = 3.0;        // estimated-speed abort threshold [m/s]
  double watchdog_window = 0.5;  // max estimate staleness [s]
};

/// Watchdog over both estimates: geofence exit, overspeed, or a stale
/// estimate produce an abort reason; otherwise nothing.
std::optional<AbortReason> safety_check(const EstimatedState& leader,
                                        const EstimatedState& follower,
                                        const SafetyLimits& limits, double t_now);

enum class FailureMode { Timeout, Misalignment, BounceOff, SafetyAbort };

const char* to_string(FailureMode mode);

/// The trace facts failure classification needs, independent of how the
/// trial record is stored.
struct TraceSummary {
  Phase final_phase;
  bool any_contact = false;      // any latch or bounce event occurred
  bool align_entered = false;    // the approach corridor was reached
  bool capture_entered = false;  // the capture gate was satisfied at least once
};

/// Classifies a finished trial. Nothing for successes; otherwise, in
/// priority order: safety aborts, contact without success, misalignment
/// (the corridor was reached but the capture gate never fired), and plain
/// timeout (including trials that never reached the corridor).
std::optional<FailureMode> classify_failure(const TraceSummary& trace);

}  // namespace dockbench
