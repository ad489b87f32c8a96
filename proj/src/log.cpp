#include "dockbench/log.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "dockbench/angles.hpp"
#include "dockbench/formation.hpp"

namespace dockbench {

namespace {

using nlohmann::json;

void append_double(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void append_vec3(std::string& out, const Eigen::Vector3d& v) {
  out += '[';
  append_double(out, v.x());
  out += ',';
  append_double(out, v.y());
  out += ',';
  append_double(out, v.z());
  out += ']';
}

void append_escaped(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

Eigen::Vector3d vec3_from(const json& a) {
  return Eigen::Vector3d(a.at(0).get<double>(), a.at(1).get<double>(),
                         a.at(2).get<double>());
}

std::string phase_kind_prefix(const std::string& label) {
  const auto colon = label.find(':');
  return colon == std::string::npos ? label : label.substr(0, colon);
}

/// Pulls "key=value" out of an event detail string; empty when absent.
std::string detail_field(const std::string& detail, const std::string& key) {
  const std::string needle = key + "=";
  auto pos = detail.find(needle);
  if (pos == std::string::npos) return {};
  pos += needle.size();
  const auto end = detail.find(' ', pos);
  return detail.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
}

}  // namespace

TrialLogWriter::TrialLogWriter(const std::string& path, const std::string& config_digest,
                               std::uint64_t seed, double dt,
                               bool supervisor_enabled) {
  file_ = std::fopen(path.c_str(), "wb");
  if (!file_) throw std::runtime_error("cannot open trial log for writing: " + path);
  std::string line = "{\"type\":\"header\",\"schema_version\":";
  line += std::to_string(kTrialLogSchemaVersion);
  line += ",\"format\":\"dockbench-trial\",\"config_digest\":";
  append_escaped(line, config_digest);
  line += ",\"seed\":" + std::to_string(seed) + ",\"dt\":";
  append_double(line, dt);
  line += ",\"supervisor_enabled\":";
  line += supervisor_enabled ? "true" : "false";
  line += "}\n";
  std::fwrite(line.data(), 1, line.size(), file_);
}

TrialLogWriter::~TrialLogWriter() { close(); }

void TrialLogWriter::close() {
  if (file_) {
    std::fclose(file_);
    file_ = nullptr;
  }
}

void TrialLogWriter::write_tick(const TickRow& row) {
  if (!file_) throw std::logic_error("trial log writer already closed");
  std::string line;
  line.reserve(1024);
  line += "{\"type\":\"tick\",\"t\":";
  append_double(line, row.t);
  line += ",\"p_l\":";
  append_vec3(line, row.truth_leader.position);
  line += ",\"v_l\":";
  append_vec3(line, row.truth_leader.velocity);
  line += ",\"psi_l\":";
  append_double(line, row.truth_leader.yaw);
  line += ",\"p_f\":";
  append_vec3(line, row.truth_follower.position);
  line += ",\"v_f\":";
  append_vec3(line, row.truth_follower.velocity);
  line += ",\"psi_f\":";
  append_double(line, row.truth_follower.yaw);

  line += ",\"est_l\":[";
  for (int i = 0; i < 7; ++i) {
    if (i) line += ',';
    append_double(line, row.est_leader[i]);
  }
  line += "],\"est_l_stamp\":";
  append_double(line, row.est_stamp_leader);
  line += ",\"est_f\":[";
  for (int i = 0; i < 7; ++i) {
    if (i) line += ',';
    append_double(line, row.est_follower[i]);
  }
  line += "],\"est_f_stamp\":";
  append_double(line, row.est_stamp_follower);

  line += ",\"stage\":";
  append_escaped(line, row.stage);
  line += ",\"phase\":";
  append_escaped(line, row.phase);
  line += ",\"guards_valid\":";
  line += row.guards_valid ? "true" : "false";
  line += ",\"e_b\":";
  append_double(line, row.e_b);
  line += ",\"e_psi\":";
  append_double(line, row.e_psi);
  line += ",\"v_rel\":";
  append_double(line, row.v_rel);
  line += ",\"latched\":";
  line += row.latched ? "true" : "false";
  line += ",\"hold_elapsed\":";
  append_double(line, row.hold_elapsed);

  line += ",\"cmd_l\":[";
  append_double(line, row.cmd_leader.accel.x());
  line += ',';
  append_double(line, row.cmd_leader.accel.y());
  line += ',';
  append_double(line, row.cmd_leader.accel.z());
  line += ',';
  append_double(line, row.cmd_leader.yaw_rate);
  line += "],\"cmd_f\":[";
  append_double(line, row.cmd_follower.accel.x());
  line += ',';
  append_double(line, row.cmd_follower.accel.y());
  line += ',';
  append_double(line, row.cmd_follower.accel.z());
  line += ',';
  append_double(line, row.cmd_follower.yaw_rate);
  line += "],\"events\":[";
  for (std::size_t i = 0; i < row.events.size(); ++i) {
    if (i) line += ',';
    line += "{\"t\":";
    append_double(line, row.events[i].t);
    line += ",\"type\":";
    append_escaped(line, row.events[i].type);
    line += ",\"detail\":";
    append_escaped(line, row.events[i].detail);
    line += '}';
  }
  line += "]}\n";
  std::fwrite(line.data(), 1, line.size(), file_);
}

void TrialLogWriter::write_summary(const std::string& outcome,
                                   std::optional<double> time_to_dock) {
  if (!file_) throw std::logic_error("trial log writer already closed");
  std::string line = "{\"type\":\"summary\",\"outcome\":";
  append_escaped(line, outcome);
  line += ",\"time_to_dock\":";
  if (time_to_dock) {
    append_double(line, *time_to_dock);
  } else {
    line += "null";
  }
  line += "}\n";
  std::fwrite(line.data(), 1, line.size(), file_);
  summary_written_ = true;
}

ParsedTrialLog read_trial_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trial log: " + path);

  ParsedTrialLog log;
  std::string line;
  bool saw_header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw std::runtime_error("trial log line " + std::to_string(line_no) +
                               ": parse error: " + e.what());
    }
    const std::string type = j.value("type", "");
    if (type == "header") {
      saw_header = true;
      log.schema_version = j.at("schema_version").get<int>();
      log.config_digest = j.at("config_digest").get<std::string>();
      log.seed = j.at("seed").get<std::uint64_t>();
      log.dt = j.at("dt").get<double>();
      log.supervisor_enabled = j.value("supervisor_enabled", true);
    } else if (type == "tick") {
      if (!saw_header)
        throw std::runtime_error("trial log: tick row before header");
      TickRow row;
      row.t = j.at("t").get<double>();
      row.truth_leader.position = vec3_from(j.at("p_l"));
      row.truth_leader.velocity = vec3_from(j.at("v_l"));
      row.truth_leader.yaw = j.at("psi_l").get<double>();
      row.truth_follower.position = vec3_from(j.at("p_f"));
      row.truth_follower.velocity = vec3_from(j.at("v_f"));
      row.truth_follower.yaw = j.at("psi_f").get<double>();
      for (int i = 0; i < 7; ++i) {
        row.est_leader[i] = j.at("est_l").at(i).get<double>();
        row.est_follower[i] = j.at("est_f").at(i).get<double>();
      }
      row.est_stamp_leader = j.at("est_l_stamp").get<double>();
      row.est_stamp_follower = j.at("est_f_stamp").get<double>();
      row.stage = j.at("stage").get<std::string>();
      row.phase = j.at("phase").get<std::string>();
      row.guards_valid = j.at("guards_valid").get<bool>();
      row.e_b = j.at("e_b").get<double>();
      row.e_psi = j.at("e_psi").get<double>();
      row.v_rel = j.at("v_rel").get<double>();
      row.latched = j.at("latched").get<bool>();
      row.hold_elapsed = j.at("hold_elapsed").get<double>();
      for (int i = 0; i < 3; ++i) {
        row.cmd_leader.accel[i] = j.at("cmd_l").at(i).get<double>();
        row.cmd_follower.accel[i] = j.at("cmd_f").at(i).get<double>();
      }
      row.cmd_leader.yaw_rate = j.at("cmd_l").at(3).get<double>();
      row.cmd_follower.yaw_rate = j.at("cmd_f").at(3).get<double>();
      for (const json& e : j.at("events")) {
        Event ev;
        ev.t = e.at("t").get<double>();
        ev.type = e.at("type").get<std::string>();
        ev.detail = e.at("detail").get<std::string>();
        row.events.push_back(ev);
      }
      log.ticks.push_back(std::move(row));
    } else if (type == "summary") {
      log.has_summary = true;
      log.outcome = j.at("outcome").get<std::string>();
      if (!j.at("time_to_dock").is_null())
        log.time_to_dock = j.at("time_to_dock").get<double>();
    } else {
      throw std::runtime_error("trial log line " + std::to_string(line_no) +
                               ": unknown row type '" + type + "'");
    }
  }
  if (!saw_header) throw std::runtime_error("trial log: missing header");
  return log;
}

AuditResult replay_audit(const ParsedTrialLog& log, const TrialConfig& cfg) {
  AuditResult result;
  auto violate = [&result](double t, const std::string& message) {
    if (result.violations.size() < 100) result.violations.push_back({t, message});
  };

  const GateTolerances& tol = cfg.tolerances;
  GuardFilter filter(cfg.docking.guard_filter_hz, cfg.dt);

  std::string prev_phase;
  bool terminal_seen = false;
  double window_t0 = 0.0;
  double t_max = 0.0;
  bool window_open = false;
  double settle_entry_t = 0.0;
  bool settle_seen = false;

  for (const TickRow& row : log.ticks) {
    // Re-derive the gate signals from the logged estimates.
    if (row.guards_valid) {
      const double raw_e_b = baseline_error(row.est_leader.head<3>(),
                                            row.est_follower.head<3>(),
                                            cfg.formation.d_dock);
      const double raw_e_psi = yaw_error(row.est_leader[6], row.est_follower[6]);
      const double raw_v_rel = relative_speed(row.est_leader.segment<3>(3),
                                              row.est_follower.segment<3>(3));
      filter.update(raw_e_b, raw_e_psi, raw_v_rel);
      if (std::abs(filter.e_b() - row.e_b) > 1e-9 ||
          std::abs(filter.e_psi() - row.e_psi) > 1e-9 ||
          std::abs(filter.v_rel() - row.v_rel) > 1e-9)
        violate(row.t, "logged guard values do not match filtered estimates");
    }

    bool window_started_here = false;
    for (const Event& ev : row.events) {
      if (ev.type == "window_start") {
        window_open = true;
        window_started_here = true;
        window_t0 = row.t;
        const std::string tm = detail_field(ev.detail, "t_max");
        if (tm.empty()) {
          violate(row.t, "window_start event without t_max");
        } else {
          t_max = std::stod(tm);
        }
      }
    }

    // Validate phase transitions announced on this row.
    std::string current = prev_phase;
    for (const Event& ev : row.events) {
      if (ev.type != "phase_enter") continue;
      ++result.transitions_checked;
      if (terminal_seen) {
        violate(row.t, "phase transition after terminal phase");
        continue;
      }
      std::istringstream detail(ev.detail);
      std::string to;
      detail >> to;
      const std::string from = detail_field(ev.detail, "from");
      const std::string reason = detail_field(ev.detail, "reason");

      if (!current.empty() && from != current)
        violate(row.t, "transition from '" + from + "' but machine was in '" +
                           current + "'");

      if (to == "align") {
        if (from != "approach") violate(row.t, "align entered from " + from);
        if (!(std::abs(row.e_b) < tol.eps_b_coarse))
          violate(row.t, "align entered with |e_b| >= eps_b_coarse");
      } else if (to == "capture") {
        if (from != "align") violate(row.t, "capture entered from " + from);
        if (!(std::abs(row.e_b) < tol.eps_b_fine &&
              std::abs(row.e_psi) < tol.eps_psi && row.v_rel < tol.eps_v))
          violate(row.t, "capture entered without the fine gate conjunction");
      } else if (to == "settle") {
        if (from != "capture") violate(row.t, "settle entered from " + from);
        if (!row.latched) violate(row.t, "settle entered while not latched");
        settle_entry_t = row.t;
        settle_seen = true;
      } else if (to == "success") {
        if (from != "settle") violate(row.t, "success entered from " + from);
        if (!settle_seen || !(row.t - settle_entry_t > tol.t_hold))
          violate(row.t, "success entered before the hold time elapsed");
        terminal_seen = true;
      } else if (to == "approach") {
        const bool initial_entry = from == "none" && window_started_here;
        const bool sanctioned =
            initial_entry ||
            (from == "align" && (reason == "corridor_exit" || reason == "bounce_retry")) ||
            (from == "capture" && reason == "bounce_retry") ||
            (from == "settle" && reason == "bounce_retry");
        if (!sanctioned)
          violate(row.t, "approach entered from " + from + " without a sanctioned reason");
        if (reason == "corridor_exit" && !(std::abs(row.e_b) >= tol.eps_b_coarse))
          violate(row.t, "corridor-exit regression with |e_b| < eps_b_coarse");
      } else if (to == "aborted") {
        if (reason == "timeout") {
          if (!window_open || !(row.t - window_t0 > t_max))
            violate(row.t, "timeout abort before t_max elapsed");
        } else if (reason.empty()) {
          violate(row.t, "abort without a reason");
        }
        terminal_seen = true;
      } else {
        violate(row.t, "unknown phase '" + to + "'");
      }
      current = to;
    }

    if (phase_kind_prefix(row.phase) != current)
      violate(row.t, row.events.empty() || current == prev_phase
                         ? "phase changed without a phase_enter event"
                         : "row phase does not match last transition");
    prev_phase = current;
  }

  return result;
}

}  // namespace dockbench
