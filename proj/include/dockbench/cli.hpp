#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace dockbench {

// Exit-code contract shared by all subcommands.
inline constexpr int kExitSuccess = 0;
inline constexpr int kExitToolError = 1;
inline constexpr int kExitTrialFailure = 2;
inline constexpr int kExitAuditViolation = 3;

struct RunOptions {
  std::string config_path;  // empty: preset only
  std::string preset = "sim2m";
  std::optional<std::uint64_t> seed;
  std::optional<bool> supervisor_on;
  std::string out_dir = "out/run";
};

struct CampaignCliOptions {
  std::string config_path;
  std::string preset = "sim2m";
  std::optional<std::uint64_t> base_seed;
  std::optional<bool> supervisor_on;
  int n = 10;
  int parallelism = 1;
  int keep_logs = 3;
  std::string out_dir = "out/campaign";
};

struct TuneOptions {
  std::string config_path;
  std::string preset = "sim2m";
  std::optional<std::uint64_t> seed;
  int budget = 40;
  int n_init = 10;
  std::string out_path = "out/tune.json";
};

struct ReplayOptions {
  std::string log_path;
  std::string config_path;
  std::string preset = "sim2m";
};

struct ReportOptions {
  std::string campaign_dir;
  std::string out_dir;
};

/// Runs one trial; writes trial.jsonl, summary.json and manifest.json.
/// Exit 0 on docking success, 2 on a failure outcome, 1 on tool errors.
int cmd_run(const RunOptions& opts);

/// Runs a seeded campaign; writes campaign.csv, campaign_summary.json and
/// manifest.json (plus tick logs for the first keep_logs seeds). Exit 0 on
/// any completed campaign.
int cmd_campaign(const CampaignCliOptions& opts);

/// Bayesian gain tuning on the step scenario; writes the result with full
/// history as JSON.
int cmd_tune(const TuneOptions& opts);

/// Audits a trial log against the configuration: guard recomputation and
/// transition justification. Exit 0 when clean, 3 listing violations, 1 on
/// unreadable or truncated logs.
int cmd_replay(const ReplayOptions& opts);

/// Renders campaign.csv into a markdown report plus per-trial time-series
/// CSVs for plotting.
int cmd_report(const ReportOptions& opts);

/// Default output root: $DOCKBENCH_OUT when set, else "out".
std::string default_out_root();

}  // namespace dockbench
