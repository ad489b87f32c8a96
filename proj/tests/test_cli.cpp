#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "dockbench/bench.hpp"
#include "dockbench/cli.hpp"
#include "dockbench/log.hpp"

using namespace dockbench;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "dockbench_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

}  // namespace

TEST_CASE("config digest is stable and seed-sensitive") {
  TrialConfig cfg = preset_config("sim2m");
  const std::string a = config_digest(cfg);
  CHECK(a == config_digest(cfg));
  cfg.seed = 99;
  CHECK(a != config_digest(cfg));
}

TEST_CASE("config json round-trips through the strict parser") {
  TrialConfig cfg = preset_config("real0p5m");
  cfg.seed = 5;
  cfg.tolerances.eps_b_fine = 0.004;
  cfg.gains_follower.kp_pos = Eigen::Vector3d(4.0, 4.0, 6.0);
  const TrialConfig back = config_from_json(config_to_json(cfg));
  CHECK(config_digest(back) == config_digest(cfg));
}

TEST_CASE("config validation names the offending fields") {
  TrialConfig cfg = preset_config("sim2m");
  cfg.tolerances.eps_b_fine = 0.2;  // above the coarse gate
  try {
    validate_config(cfg);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("eps_b_fine") != std::string::npos);
    CHECK(msg.find("eps_b_coarse") != std::string::npos);
  }
}

TEST_CASE("unknown config keys are rejected with their path") {
  nlohmann::json j = config_to_json(preset_config("sim2m"));
  j["world"]["max_acel"] = 3.0;  // typo
  try {
    config_from_json(j);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("world.max_acel") != std::string::npos);
  }
}

TEST_CASE("cmd_run exit codes: success, trial failure, tool error") {
  const fs::path dir = temp_dir("run");

  RunOptions ok;
  ok.seed = 1;
  ok.out_dir = (dir / "ok").string();
  CHECK(cmd_run(ok) == kExitSuccess);
  CHECK(fs::exists(dir / "ok" / "trial.jsonl"));
  CHECK(fs::exists(dir / "ok" / "summary.json"));
  CHECK(fs::exists(dir / "ok" / "manifest.json"));

  // a config whose docking window must time out
  spit(dir / "slow.json",
       R"({"formation": {"v_form_leader": 0.01, "v_form_follower": 0.01, "t_usr": 30.5}})");
  RunOptions failing = ok;
  failing.config_path = (dir / "slow.json").string();
  failing.out_dir = (dir / "fail").string();
  CHECK(cmd_run(failing) == kExitTrialFailure);

  spit(dir / "bad.json", R"({"tolerances": {"eps_b_fine": 0.5}})");
  RunOptions invalid = ok;
  invalid.config_path = (dir / "bad.json").string();
  CHECK(cmd_run(invalid) == kExitToolError);

  RunOptions missing = ok;
  missing.config_path = (dir / "nope.json").string();
  CHECK(cmd_run(missing) == kExitToolError);
}

TEST_CASE("manifest digest matches the stored resolved config") {
  const fs::path dir = temp_dir("manifest");
  RunOptions opts;
  opts.seed = 2;
  opts.out_dir = dir.string();
  REQUIRE(cmd_run(opts) == kExitSuccess);
  const nlohmann::json manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  const TrialConfig stored = config_from_json(manifest.at("resolved_config"));
  CHECK(config_digest(stored) == manifest.at("config_digest").get<std::string>());
}

TEST_CASE("campaign csv is deterministic and scheduling-independent") {
  const fs::path dir = temp_dir("campaign");
  CampaignCliOptions opts;
  opts.n = 6;
  opts.base_seed = 300;
  opts.keep_logs = 1;
  opts.parallelism = 1;
  opts.out_dir = (dir / "p1").string();
  REQUIRE(cmd_campaign(opts) == kExitSuccess);

  opts.parallelism = 8;
  opts.out_dir = (dir / "p8").string();
  REQUIRE(cmd_campaign(opts) == kExitSuccess);

  const std::string csv1 = slurp(dir / "p1" / "campaign.csv");
  CHECK(csv1 == slurp(dir / "p8" / "campaign.csv"));
  CHECK(slurp(dir / "p1" / "trial_300.jsonl") == slurp(dir / "p8" / "trial_300.jsonl"));

  // header plus one row per trial
  CHECK(std::count(csv1.begin(), csv1.end(), '\n') == 7);

  // rerun with identical arguments reproduces the bytes
  opts.parallelism = 3;
  opts.out_dir = (dir / "p3").string();
  REQUIRE(cmd_campaign(opts) == kExitSuccess);
  CHECK(csv1 == slurp(dir / "p3" / "campaign.csv"));
}

TEST_CASE("cmd_tune writes a reproducible non-increasing incumbent history") {
  const fs::path dir = temp_dir("tune");
  TuneOptions opts;
  opts.seed = 4;
  opts.budget = 12;
  opts.n_init = 6;
  opts.out_path = (dir / "tune.json").string();
  REQUIRE(cmd_tune(opts) == kExitSuccess);

  const nlohmann::json doc = nlohmann::json::parse(slurp(dir / "tune.json"));
  REQUIRE(doc.at("history").size() == 12);
  double incumbent = std::numeric_limits<double>::infinity();
  for (const auto& row : doc.at("history")) {
    const double inc = row.at("incumbent").get<double>();
    CHECK(inc <= incumbent + 1e-15);
    incumbent = inc;
  }
  CHECK(doc.at("best_objective").get<double>() == incumbent);

  opts.out_path = (dir / "tune2.json").string();
  REQUIRE(cmd_tune(opts) == kExitSuccess);
  CHECK(slurp(dir / "tune.json") == slurp(dir / "tune2.json"));
}

TEST_CASE("replay audits a fresh log clean and flags a forged transition") {
  const fs::path dir = temp_dir("replay");
  RunOptions run_opts;
  run_opts.seed = 6;
  run_opts.out_dir = dir.string();
  REQUIRE(cmd_run(run_opts) == kExitSuccess);

  ReplayOptions replay_opts;
  replay_opts.log_path = (dir / "trial.jsonl").string();
  CHECK(cmd_replay(replay_opts) == kExitSuccess);

  // forge a premature capture entry on an early align row
  std::ifstream in(dir / "trial.jsonl");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  in.close();
  bool forged = false;
  for (std::string& l : lines) {
    if (forged || l.find("\"type\":\"tick\"") == std::string::npos) continue;
    nlohmann::json j = nlohmann::json::parse(l);
    if (j.at("phase") == "align" && std::abs(j.at("e_b").get<double>()) > 0.01) {
      j["phase"] = "capture";
      j["events"].push_back({{"t", j.at("t")},
                             {"type", "phase_enter"},
                             {"detail", "capture from=align"}});
      l = j.dump();
      forged = true;
    }
  }
  REQUIRE(forged);
  std::ofstream out(dir / "forged.jsonl", std::ios::binary);
  for (const std::string& l : lines) out << l << "\n";
  out.close();

  replay_opts.log_path = (dir / "forged.jsonl").string();
  CHECK(cmd_replay(replay_opts) == kExitAuditViolation);

  // unreadable and truncated logs are tool errors
  replay_opts.log_path = (dir / "missing.jsonl").string();
  CHECK(cmd_replay(replay_opts) == kExitToolError);
  spit(dir / "empty.jsonl", "");
  replay_opts.log_path = (dir / "empty.jsonl").string();
  CHECK(cmd_replay(replay_opts) == kExitToolError);

  // a truncated log (summary footer lost) is refused
  std::ofstream tout(dir / "truncated.jsonl", std::ios::binary);
  for (std::size_t i = 0; i + 1 < lines.size(); ++i) tout << lines[i] << "\n";
  tout.close();
  replay_opts.log_path = (dir / "truncated.jsonl").string();
  CHECK(cmd_replay(replay_opts) == kExitToolError);

  // a mismatched schema version is refused
  nlohmann::json header = nlohmann::json::parse(lines[0]);
  header["schema_version"] = kTrialLogSchemaVersion + 1;
  std::ofstream vout(dir / "versioned.jsonl", std::ios::binary);
  vout << header.dump() << "\n";
  for (std::size_t i = 1; i < lines.size(); ++i) vout << lines[i] << "\n";
  vout.close();
  replay_opts.log_path = (dir / "versioned.jsonl").string();
  CHECK(cmd_replay(replay_opts) == kExitToolError);
}

TEST_CASE("report reproduces campaign statistics from the csv") {
  const fs::path dir = temp_dir("report");
  CampaignCliOptions camp;
  camp.n = 5;
  camp.base_seed = 800;
  camp.keep_logs = 1;
  camp.parallelism = 4;
  camp.out_dir = dir.string();
  REQUIRE(cmd_campaign(camp) == kExitSuccess);

  ReportOptions rep;
  rep.campaign_dir = dir.string();
  REQUIRE(cmd_report(rep) == kExitSuccess);
  const std::string md = slurp(dir / "report.md");
  CHECK(md.find("trials: 5") != std::string::npos);
  CHECK(md.find("successes: 5") != std::string::npos);
  CHECK(md.find("95% CI") != std::string::npos);
  CHECK(fs::exists(dir / "report_trial_800.csv"));

  ReportOptions missing;
  missing.campaign_dir = (dir / "nope").string();
  CHECK(cmd_report(missing) == kExitToolError);
}
