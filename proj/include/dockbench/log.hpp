#pragma once

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "dockbench/config.hpp"
#include "dockbench/estimation.hpp"
#include "dockbench/supervisor.hpp"
#include "dockbench/types.hpp"

namespace dockbench {

inline constexpr int kTrialLogSchemaVersion = 1;

/// One per-tick telemetry row. Guard values are the filtered signals the
/// supervisor actually consumed; `phase` is empty before the docking window
/// opens.
struct TickRow {
  double t = 0.0;
  RigidState truth_leader;
  RigidState truth_follower;
  Vector7d est_leader = Vector7d::Zero();
  Vector7d est_follower = Vector7d::Zero();
  double est_stamp_leader = 0.0;
  double est_stamp_follower = 0.0;
  std::string stage;
  std::string phase;
  bool guards_valid = false;
  double e_b = 0.0;
  double e_psi = 0.0;
  double v_rel = 0.0;
  bool latched = false;
  double hold_elapsed = 0.0;
  ControlCommand cmd_leader;
  ControlCommand cmd_follower;
  std::vector<Event> events;
};

/// JSON-lines trial log: a header object, one object per tick, and a
/// summary footer. Doubles are serialized with 17 significant digits so a
/// parsed log reproduces the in-memory values bit-for-bit.
class TrialLogWriter {
 public:
  TrialLogWriter(const std::string& path, const std::string& config_digest,
                 std::uint64_t seed, double dt, bool supervisor_enabled);
  ~TrialLogWriter();

  TrialLogWriter(const TrialLogWriter&) = delete;
  TrialLogWriter& operator=(const TrialLogWriter&) = delete;

  void write_tick(const TickRow& row);
  void write_summary(const std::string& outcome, std::optional<double> time_to_dock);
  void close();

 private:
  std::FILE* file_ = nullptr;
  bool summary_written_ = false;
};

struct ParsedTrialLog {
  int schema_version = 0;
  std::string config_digest;
  std::uint64_t seed = 0;
  double dt = 0.0;
  bool supervisor_enabled = true;
  std::vector<TickRow> ticks;
  bool has_summary = false;
  std::string outcome;
  std::optional<double> time_to_dock;
};

/// Parses a trial log. Throws std::runtime_error on malformed lines.
ParsedTrialLog read_trial_log(const std::string& path);

struct AuditViolation {
  double t = 0.0;
  std::string message;
};

struct AuditResult {
  bool ok() const { return violations.empty(); }
  std::vector<AuditViolation> violations;
  int transitions_checked = 0;
};

/// Re-derives the gate signals from the logged estimates and re-checks every
/// phase transition against the configured tolerances. Detects forged or
/// out-of-order transitions and guard values that do not match the states.
AuditResult replay_audit(const ParsedTrialLog& log, const TrialConfig& cfg);

}  // namespace dockbench
