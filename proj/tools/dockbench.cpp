#include <CLI11.hpp>
#include <optional>
#include <string>

#include "dockbench/cli.hpp"

namespace {

/// Shared --supervisor {on,off} handling.
std::optional<bool> supervisor_flag(const std::string& value) {
  if (value == "on") return true;
  if (value == "off") return false;
  return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dual-quadrotor docking simulator and benchmark harness"};
  app.require_subcommand(1);

  const std::string out_root = dockbench::default_out_root();

  // run
  dockbench::RunOptions run_opts;
  run_opts.out_dir = out_root + "/run";
  std::string run_supervisor;
  std::uint64_t run_seed = 0;
  auto* run = app.add_subcommand("run", "run one docking trial");
  run->add_option("--config", run_opts.config_path, "config file (JSON)");
  run->add_option("--preset", run_opts.preset, "base preset: sim2m or real0p5m");
  auto* run_seed_opt = run->add_option("--seed", run_seed, "trial seed");
  run->add_option("--supervisor", run_supervisor, "on or off")
      ->check(CLI::IsMember({"on", "off"}));
  run->add_option("--out", run_opts.out_dir, "output directory");

  // campaign
  dockbench::CampaignCliOptions camp_opts;
  camp_opts.out_dir = out_root + "/campaign";
  std::string camp_supervisor;
  std::uint64_t camp_seed = 0;
  auto* campaign = app.add_subcommand("campaign", "run a seeded trial campaign");
  campaign->add_option("--config", camp_opts.config_path, "config file (JSON)");
  campaign->add_option("--preset", camp_opts.preset, "base preset");
  auto* camp_seed_opt = campaign->add_option("--seed", camp_seed, "base seed");
  campaign->add_option("--n", camp_opts.n, "number of trials");
  campaign->add_option("--parallelism", camp_opts.parallelism, "worker threads");
  campaign->add_option("--keep-logs", camp_opts.keep_logs,
                       "tick logs kept for the first N seeds");
  campaign->add_option("--supervisor", camp_supervisor, "on or off")
      ->check(CLI::IsMember({"on", "off"}));
  campaign->add_option("--out", camp_opts.out_dir, "output directory");

  // tune
  dockbench::TuneOptions tune_opts;
  tune_opts.out_path = out_root + "/tune.json";
  std::uint64_t tune_seed = 0;
  auto* tune = app.add_subcommand("tune", "Bayesian-optimize PID gains");
  tune->add_option("--config", tune_opts.config_path, "scenario config file");
  tune->add_option("--preset", tune_opts.preset, "base preset");
  auto* tune_seed_opt = tune->add_option("--seed", tune_seed, "optimizer seed");
  tune->add_option("--budget", tune_opts.budget, "objective evaluations");
  tune->add_option("--n-init", tune_opts.n_init, "space-filling warmup samples");
  tune->add_option("--out", tune_opts.out_path, "result path (JSON)");

  // replay
  dockbench::ReplayOptions replay_opts;
  auto* replay = app.add_subcommand("replay", "audit a trial log against its config");
  replay->add_option("log", replay_opts.log_path, "trial.jsonl path")->required();
  replay->add_option("--config", replay_opts.config_path, "config file (JSON)");
  replay->add_option("--preset", replay_opts.preset, "base preset");

  // report
  dockbench::ReportOptions report_opts;
  auto* report = app.add_subcommand("report", "render a campaign report");
  report->add_option("campaign_dir", report_opts.campaign_dir, "campaign output dir")
      ->required();
  report->add_option("--out", report_opts.out_dir, "report directory");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    if (*run_seed_opt) run_opts.seed = run_seed;
    run_opts.supervisor_on = supervisor_flag(run_supervisor);
    return dockbench::cmd_run(run_opts);
  }
  if (campaign->parsed()) {
    if (*camp_seed_opt) camp_opts.base_seed = camp_seed;
    camp_opts.supervisor_on = supervisor_flag(camp_supervisor);
    return dockbench::cmd_campaign(camp_opts);
  }
  if (tune->parsed()) {
    if (*tune_seed_opt) tune_opts.seed = tune_seed;
    return dockbench::cmd_tune(tune_opts);
  }
  if (replay->parsed()) return dockbench::cmd_replay(replay_opts);
  if (report->parsed()) return dockbench::cmd_report(report_opts);
  return dockbench::kExitToolError;
}
