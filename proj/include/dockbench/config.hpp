#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "dockbench/control.hpp"
#include "dockbench/estimation.hpp"
#include "dockbench/formation.hpp"
#include "dockbench/sensing.hpp"
#include "dockbench/supervisor.hpp"
#include "dockbench/world.hpp"

namespace dockbench {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class StageKind { Takeoff, FormationEntry, DockingWindow, Hold, Return, Land };

const char* to_string(StageKind kind);

struct Stage {
  StageKind kind = StageKind::Takeoff;
  double altitude = 0.0;  // Takeoff only [m]
  double duration = 0.0;  // Hold only [s]
};

/// Scripted mission: takeoff first, land last, exactly one docking window.
struct MissionScript {
  std::vector<Stage> stages;

  static MissionScript standard(double altitude, double hold_duration);
};

/// Setpoint policy knobs for the staged docking routine and the scripted
/// mission stages.
struct DockingPolicy {
  double entry_offset = 0.5;        // extra baseline separation before docking [m]
  double approach_standoff = 0.04;  // commanded face gap while approaching [m]
  double capture_push = 0.01;       // commanded interpenetration during capture [m]
  double align_speed = 0.04;        // baseline closure rate for the final gap [m/s]
  double guard_filter_hz = 10.0;    // low-pass cutoff for gate signals [Hz]
  double climb_speed = 0.5;         // takeoff/land vertical setpoint rate [m/s]
  double stage_pos_tol = 0.05;      // scripted-stage completion tolerance [m]
  double stage_speed_tol = 0.05;    // scripted-stage completion tolerance [m/s]
  double stage_timeout = 30.0;      // per scripted stage [s]
};

/// Test-harness disturbance injection: a vertical velocity kick applied to
/// the follower at the latch instant, for capture-transient benchmarking.
struct InjectConfig {
  double capture_vz = 0.0;  // [m/s]
};

struct TrialConfig {
  double dt = 0.01;
  std::uint64_t seed = 0;
  bool supervisor_enabled = true;
  WorldParams world;
  SensorConfig sensors;
  EkfParams ekf;
  PidGains gains_leader;
  PidGains gains_follower;
  FormationSpec formation;
  GateTolerances tolerances;
  SupervisorOptions supervisor;
  SafetyLimits safety;
  MissionScript script;
  DockingPolicy docking;
  InjectConfig inject;
  RigidState initial_leader;
  RigidState initial_follower;
};

/// Named baseline configurations: "sim2m" (2.0 m docking altitude) and
/// "real0p5m" (0.5 m altitude flight profile).
TrialConfig preset_config(const std::string& name);

/// Serializes with every field materialized, so a stored config is
/// self-contained and digestable.
nlohmann::json config_to_json(const TrialConfig& cfg);

/// Strict parse: unknown keys and invariant violations raise ConfigError
/// with the offending field path.
TrialConfig config_from_json(const nlohmann::json& j);

/// Reads a config document and overlays it on the given preset.
TrialConfig load_config_file(const std::string& path, const std::string& preset = "sim2m");

/// Checks every cross-field invariant; throws ConfigError naming fields.
void validate_config(const TrialConfig& cfg);

/// FNV-1a hash of the canonical serialized config, as fixed-width hex.
std::string config_digest(const TrialConfig& cfg);

}  // namespace dockbench
