#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dockbench/config.hpp"
#include "dockbench/log.hpp"
#include "dockbench/supervisor.hpp"

namespace dockbench {

struct Outcome {
  bool success = false;
  std::optional<FailureMode> failure;

  std::string label() const {
    return success ? "success" : std::string(to_string(*failure));
  }
};

/// Full closed-loop trace of one trial plus the derived outcome facts.
struct TrialRecord {
  std::string config_digest;
  std::vector<TickRow> ticks;
  Outcome outcome;
  std::optional<double> time_to_dock;  // approach entry -> first settle entry [s]
  Phase final_phase;
  bool any_contact = false;
  bool align_entered = false;
  bool capture_entered = false;
  double window_start_t = -1.0;  // <0 when the docking window never opened
  double t_max = 0.0;            // docking watchdog [s], relative to window start

  TraceSummary trace_summary() const {
    return TraceSummary{final_phase, any_contact, align_entered, capture_entered};
  }
};

/// Runs the scripted mission — takeoff, formation entry, docking window,
/// hold, return, land — under the fixed-dt loop: sensor emulation, per-
/// vehicle EKFs, formation targets, supervision (or direct waypoints when
/// the supervisor is disabled), PID commands, plant integration, and latch
/// resolution. Deterministic in (config, seed). Numeric failures in the
/// estimator abort the trial as a safety event. Rows stream to `writer`
/// when given.
TrialRecord run_trial(const TrialConfig& cfg, TrialLogWriter* writer = nullptr);

/// Wilson 95% score interval for k successes in n trials.
struct WilsonInterval {
  double estimate = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

WilsonInterval success_rate_ci(int k, int n);

/// Settle-window tracking consistency of one trial: RMS of the baseline and
/// opposing-yaw errors over ticks spent in Settle. Absent without a Settle
/// window.
struct ConsistencyMetrics {
  std::optional<double> baseline_rms;  // [m]
  std::optional<double> yaw_rms;       // [rad]
};

ConsistencyMetrics consistency_metrics(const TrialRecord& rec);

/// One campaign row, the unit stored per trial in campaign.csv.
struct TrialStats {
  std::uint64_t seed = 0;
  Outcome outcome;
  std::optional<double> time_to_dock;
  ConsistencyMetrics consistency;
};

struct CampaignSummary {
  int n_trials = 0;
  int successes = 0;
  WilsonInterval success_rate;
  std::optional<double> time_to_dock_mean;
  std::optional<double> time_to_dock_median;
  std::optional<double> time_to_dock_p95;
  std::optional<double> baseline_rms;  // mean of per-trial settle RMS [m]
  std::optional<double> yaw_rms;       // mean of per-trial settle RMS [rad]
  std::map<FailureMode, int> failure_histogram;
};

CampaignSummary summarize_campaign(const std::vector<TrialStats>& rows);

struct CampaignOptions {
  int parallelism = 1;
  /// When set, full tick logs are written for the first `keep_logs` seeds
  /// as <log_dir>/trial_<seed>.jsonl.
  std::string log_dir;
  int keep_logs = 0;
};

struct CampaignResult {
  CampaignSummary summary;
  std::vector<TrialStats> rows;  // ordered by seed
};

/// Runs n trials with seeds base_seed .. base_seed+n-1. Trials are
/// independent and distributed over a worker pool; results are aggregated
/// in seed order, so the output is independent of scheduling.
CampaignResult run_campaign(const TrialConfig& cfg, int n, std::uint64_t base_seed,
                            const CampaignOptions& opts = {});

}  // namespace dockbench
