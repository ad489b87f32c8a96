#include "dockbench/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace dockbench {

namespace {

using nlohmann::json;

/// Strict object reader: every key must be consumed, leftovers are errors.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const char* key) { return j_.contains(key); }

  double number(const char* key, double fallback) {
    if (!j_.contains(key)) return fallback;
    mark(key);
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(field(key) + ": expected a number");
    return v.get<double>();
  }

  std::uint64_t uinteger(const char* key, std::uint64_t fallback) {
    if (!j_.contains(key)) return fallback;
    mark(key);
    const json& v = j_.at(key);
    if (!v.is_number_unsigned() && !v.is_number_integer())
      throw ConfigError(field(key) + ": expected an integer");
    return v.get<std::uint64_t>();
  }

  int integer(const char* key, int fallback) {
    if (!j_.contains(key)) return fallback;
    mark(key);
    const json& v = j_.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned())
      throw ConfigError(field(key) + ": expected an integer");
    return v.get<int>();
  }

  bool boolean(const char* key, bool fallback) {
    if (!j_.contains(key)) return fallback;
    mark(key);
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(field(key) + ": expected a boolean");
    return v.get<bool>();
  }

  Eigen::Vector3d vec3(const char* key, const Eigen::Vector3d& fallback) {
    if (!j_.contains(key)) return fallback;
    mark(key);
    const json& v = j_.at(key);
    if (!v.is_array() || v.size() != 3)
      throw ConfigError(field(key) + ": expected an array of 3 numbers");
    Eigen::Vector3d out;
    for (int i = 0; i < 3; ++i) out[i] = v.at(i).get<double>();
    return out;
  }

  /// Scalar applied to all axes, or an explicit [x, y, z] array.
  Eigen::Vector3d axis_gains(const char* key, const Eigen::Vector3d& fallback) {
    if (!j_.contains(key)) return fallback;
    if (j_.at(key).is_number()) return Eigen::Vector3d::Constant(number(key, 0.0));
    return vec3(key, fallback);
  }

  const json* object(const char* key) {
    if (!j_.contains(key)) return nullptr;
    mark(key);
    return &j_.at(key);
  }

  std::string text(const char* key, const std::string& fallback) {
    if (!j_.contains(key)) return fallback;
    mark(key);
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(field(key) + ": expected a string");
    return v.get<std::string>();
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key()))
        throw ConfigError(field(it.key().c_str()) + ": unknown key");
  }

  std::string field(const char* key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  void mark(const char* key) { seen_.insert(key); }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json vec3_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

json gains_json(const PidGains& g) {
  return json{{"kp_pos", vec3_json(g.kp_pos)}, {"ki_pos", vec3_json(g.ki_pos)},
              {"kd_pos", vec3_json(g.kd_pos)}, {"kp_yaw", g.kp_yaw},
              {"i_limit", g.i_limit}};
}

PidGains gains_from_json(const json& j, const std::string& path, const PidGains& base) {
  ObjectReader r(j, path);
  PidGains g = base;
  g.kp_pos = r.axis_gains("kp_pos", base.kp_pos);
  g.ki_pos = r.axis_gains("ki_pos", base.ki_pos);
  g.kd_pos = r.axis_gains("kd_pos", base.kd_pos);
  g.kp_yaw = r.number("kp_yaw", base.kp_yaw);
  g.i_limit = r.number("i_limit", base.i_limit);
  r.finish();
  return g;
}

StageKind stage_kind_from_string(const std::string& s, const std::string& path) {
  if (s == "takeoff") return StageKind::Takeoff;
  if (s == "formation_entry") return StageKind::FormationEntry;
  if (s == "docking_window") return StageKind::DockingWindow;
  if (s == "hold") return StageKind::Hold;
  if (s == "return") return StageKind::Return;
  if (s == "land") return StageKind::Land;
  throw ConfigError(path + ": unknown stage type '" + s + "'");
}

void check(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

const char* to_string(StageKind kind) {
  switch (kind) {
    case StageKind::Takeoff: return "takeoff";
    case StageKind::FormationEntry: return "formation_entry";
    case StageKind::DockingWindow: return "docking_window";
    case StageKind::Hold: return "hold";
    case StageKind::Return: return "return";
    case StageKind::Land: return "land";
  }
  return "?";
}

MissionScript MissionScript::standard(double altitude, double hold_duration) {
  MissionScript script;
  script.stages = {{StageKind::Takeoff, altitude, 0.0},
                   {StageKind::FormationEntry, 0.0, 0.0},
                   {StageKind::DockingWindow, 0.0, 0.0},
                   {StageKind::Hold, 0.0, hold_duration},
                   {StageKind::Return, 0.0, 0.0},
                   {StageKind::Land, 0.0, 0.0}};
  return script;
}

TrialConfig preset_config(const std::string& name) {
  TrialConfig cfg;  // struct defaults carry most of the nominal numbers
  if (name == "sim2m") {
    cfg.formation.center = Eigen::Vector3d(2.0, 0.0, 2.0);
    cfg.script = MissionScript::standard(2.0, 5.0);
  } else if (name == "real0p5m") {
    cfg.formation.center = Eigen::Vector3d(2.0, 0.0, 0.5);
    cfg.script = MissionScript::standard(0.5, 5.0);
  } else {
    throw ConfigError("unknown preset '" + name + "' (expected sim2m or real0p5m)");
  }
  const double start_separation = cfg.formation.d_dock + 1.0;
  cfg.initial_leader.position = Eigen::Vector3d(-0.5 * start_separation, 0.0, 0.0);
  cfg.initial_follower.position = Eigen::Vector3d(0.5 * start_separation, 0.0, 0.0);
  cfg.initial_leader.yaw = 0.0;
  cfg.initial_follower.yaw = std::numbers::pi;
  return cfg;
}

nlohmann::json config_to_json(const TrialConfig& cfg) {
  json stages = json::array();
  for (const Stage& s : cfg.script.stages) {
    json row{{"type", to_string(s.kind)}};
    if (s.kind == StageKind::Takeoff) row["altitude"] = s.altitude;
    if (s.kind == StageKind::Hold) row["duration"] = s.duration;
    stages.push_back(row);
  }

  return json{
      {"dt", cfg.dt},
      {"seed", cfg.seed},
      {"supervisor_enabled", cfg.supervisor_enabled},
      {"world",
       {{"max_accel", cfg.world.max_accel},
        {"max_speed", cfg.world.max_speed},
        {"drag_coeff", cfg.world.drag_coeff},
        {"max_yaw_rate", cfg.world.max_yaw_rate},
        {"latch",
         {{"engage_distance", cfg.world.latch.engage_distance},
          {"max_latch_speed", cfg.world.latch.max_latch_speed},
          {"max_latch_yaw", cfg.world.latch.max_latch_yaw},
          {"hold_rigid", cfg.world.latch.hold_rigid},
          {"restitution", cfg.world.latch.restitution},
          {"rearm_distance", cfg.world.latch.rearm_distance}}},
        {"disturbance",
         {{"sigma", cfg.world.disturbance.sigma},
          {"theta", cfg.world.disturbance.theta}}}}},
      {"sensors",
       {{"mocap_rate", cfg.sensors.mocap_rate},
        {"imu_rate", cfg.sensors.imu_rate},
        {"mocap_pos_noise", cfg.sensors.mocap_pos_noise},
        {"mocap_yaw_noise", cfg.sensors.mocap_yaw_noise},
        {"accel_noise", cfg.sensors.accel_noise},
        {"gyro_noise", cfg.sensors.gyro_noise},
        {"gyro_bias", cfg.sensors.gyro_bias},
        {"mocap_latency", cfg.sensors.mocap_latency},
        {"dropout_prob", cfg.sensors.dropout_prob},
        {"clock_offset", cfg.sensors.clock_offset},
        {"clock_drift", cfg.sensors.clock_drift}}},
      {"ekf",
       {{"q_accel", cfg.ekf.q_accel},
        {"q_yaw", cfg.ekf.q_yaw},
        {"r_pos", cfg.ekf.r_pos},
        {"r_yaw", cfg.ekf.r_yaw},
        {"p0", cfg.ekf.p0},
        {"gate_sigma", cfg.ekf.gate_sigma}}},
      {"gains", {{"leader", gains_json(cfg.gains_leader)},
                 {"follower", gains_json(cfg.gains_follower)}}},
      {"formation",
       {{"center", vec3_json(cfg.formation.center)},
        {"d_dock", cfg.formation.d_dock},
        {"v_form_leader", cfg.formation.v_form_leader},
        {"v_form_follower", cfg.formation.v_form_follower},
        {"t_usr", cfg.formation.t_usr}}},
      {"tolerances",
       {{"eps_b_coarse", cfg.tolerances.eps_b_coarse},
        {"eps_b_fine", cfg.tolerances.eps_b_fine},
        {"eps_psi", cfg.tolerances.eps_psi},
        {"eps_v", cfg.tolerances.eps_v},
        {"t_hold", cfg.tolerances.t_hold}}},
      {"supervisor",
       {{"debounce_window", cfg.supervisor.debounce_window},
        {"bounce_retries", cfg.supervisor.bounce_retries}}},
      {"safety",
       {{"geofence_min", vec3_json(cfg.safety.geofence_min)},
        {"geofence_max", vec3_json(cfg.safety.geofence_max)},
        {"max_speed", cfg.safety.max_speed},
        {"watchdog_window", cfg.safety.watchdog_window}}},
      {"script", {{"stages", stages}}},
      {"docking",
       {{"entry_offset", cfg.docking.entry_offset},
        {"approach_standoff", cfg.docking.approach_standoff},
        {"capture_push", cfg.docking.capture_push},
        {"align_speed", cfg.docking.align_speed},
        {"guard_filter_hz", cfg.docking.guard_filter_hz},
        {"climb_speed", cfg.docking.climb_speed},
        {"stage_pos_tol", cfg.docking.stage_pos_tol},
        {"stage_speed_tol", cfg.docking.stage_speed_tol},
        {"stage_timeout", cfg.docking.stage_timeout}}},
      {"inject", {{"capture_vz", cfg.inject.capture_vz}}},
      {"initial",
       {{"leader_pos", vec3_json(cfg.initial_leader.position)},
        {"follower_pos", vec3_json(cfg.initial_follower.position)},
        {"leader_yaw", cfg.initial_leader.yaw},
        {"follower_yaw", cfg.initial_follower.yaw}}}};
}

TrialConfig config_from_json(const nlohmann::json& j) {
  TrialConfig cfg = preset_config("sim2m");
  ObjectReader r(j, "");

  cfg.dt = r.number("dt", cfg.dt);
  cfg.seed = r.uinteger("seed", cfg.seed);
  cfg.supervisor_enabled = r.boolean("supervisor_enabled", cfg.supervisor_enabled);

  if (const json* w = r.object("world")) {
    ObjectReader rw(*w, "world");
    cfg.world.max_accel = rw.number("max_accel", cfg.world.max_accel);
    cfg.world.max_speed = rw.number("max_speed", cfg.world.max_speed);
    cfg.world.drag_coeff = rw.number("drag_coeff", cfg.world.drag_coeff);
    cfg.world.max_yaw_rate = rw.number("max_yaw_rate", cfg.world.max_yaw_rate);
    if (const json* l = rw.object("latch")) {
      ObjectReader rl(*l, "world.latch");
      auto& latch = cfg.world.latch;
      latch.engage_distance = rl.number("engage_distance", latch.engage_distance);
      latch.max_latch_speed = rl.number("max_latch_speed", latch.max_latch_speed);
      latch.max_latch_yaw = rl.number("max_latch_yaw", latch.max_latch_yaw);
      latch.hold_rigid = rl.boolean("hold_rigid", latch.hold_rigid);
      latch.restitution = rl.number("restitution", latch.restitution);
      latch.rearm_distance = rl.number("rearm_distance", latch.rearm_distance);
      rl.finish();
    }
    if (const json* d = rw.object("disturbance")) {
      ObjectReader rd(*d, "world.disturbance");
      cfg.world.disturbance.sigma = rd.number("sigma", cfg.world.disturbance.sigma);
      cfg.world.disturbance.theta = rd.number("theta", cfg.world.disturbance.theta);
      rd.finish();
    }
    rw.finish();
  }

  if (const json* s = r.object("sensors")) {
    ObjectReader rs(*s, "sensors");
    auto& sn = cfg.sensors;
    sn.mocap_rate = rs.number("mocap_rate", sn.mocap_rate);
    sn.imu_rate = rs.number("imu_rate", sn.imu_rate);
    sn.mocap_pos_noise = rs.number("mocap_pos_noise", sn.mocap_pos_noise);
    sn.mocap_yaw_noise = rs.number("mocap_yaw_noise", sn.mocap_yaw_noise);
    sn.accel_noise = rs.number("accel_noise", sn.accel_noise);
    sn.gyro_noise = rs.number("gyro_noise", sn.gyro_noise);
    sn.gyro_bias = rs.number("gyro_bias", sn.gyro_bias);
    sn.mocap_latency = rs.number("mocap_latency", sn.mocap_latency);
    sn.dropout_prob = rs.number("dropout_prob", sn.dropout_prob);
    sn.clock_offset = rs.number("clock_offset", sn.clock_offset);
    sn.clock_drift = rs.number("clock_drift", sn.clock_drift);
    rs.finish();
  }

  if (const json* e = r.object("ekf")) {
    ObjectReader re(*e, "ekf");
    cfg.ekf.q_accel = re.number("q_accel", cfg.ekf.q_accel);
    cfg.ekf.q_yaw = re.number("q_yaw", cfg.ekf.q_yaw);
    cfg.ekf.r_pos = re.number("r_pos", cfg.ekf.r_pos);
    cfg.ekf.r_yaw = re.number("r_yaw", cfg.ekf.r_yaw);
    cfg.ekf.p0 = re.number("p0", cfg.ekf.p0);
    cfg.ekf.gate_sigma = re.number("gate_sigma", cfg.ekf.gate_sigma);
    re.finish();
  }

  if (const json* g = r.object("gains")) {
    ObjectReader rg(*g, "gains");
    if (const json* gl = rg.object("leader"))
      cfg.gains_leader = gains_from_json(*gl, "gains.leader", cfg.gains_leader);
    if (const json* gf = rg.object("follower"))
      cfg.gains_follower = gains_from_json(*gf, "gains.follower", cfg.gains_follower);
    rg.finish();
  }

  if (const json* f = r.object("formation")) {
    ObjectReader rf(*f, "formation");
    cfg.formation.center = rf.vec3("center", cfg.formation.center);
    cfg.formation.d_dock = rf.number("d_dock", cfg.formation.d_dock);
    cfg.formation.v_form_leader = rf.number("v_form_leader", cfg.formation.v_form_leader);
    cfg.formation.v_form_follower =
        rf.number("v_form_follower", cfg.formation.v_form_follower);
    cfg.formation.t_usr = rf.number("t_usr", cfg.formation.t_usr);
    rf.finish();
  }

  if (const json* t = r.object("tolerances")) {
    ObjectReader rt(*t, "tolerances");
    cfg.tolerances.eps_b_coarse = rt.number("eps_b_coarse", cfg.tolerances.eps_b_coarse);
    cfg.tolerances.eps_b_fine = rt.number("eps_b_fine", cfg.tolerances.eps_b_fine);
    cfg.tolerances.eps_psi = rt.number("eps_psi", cfg.tolerances.eps_psi);
    cfg.tolerances.eps_v = rt.number("eps_v", cfg.tolerances.eps_v);
    cfg.tolerances.t_hold = rt.number("t_hold", cfg.tolerances.t_hold);
    rt.finish();
  }

  if (const json* s = r.object("supervisor")) {
    ObjectReader rs(*s, "supervisor");
    cfg.supervisor.debounce_window =
        rs.number("debounce_window", cfg.supervisor.debounce_window);
    cfg.supervisor.bounce_retries =
        rs.integer("bounce_retries", cfg.supervisor.bounce_retries);
    rs.finish();
  }

  if (const json* s = r.object("safety")) {
    ObjectReader rs(*s, "safety");
    cfg.safety.geofence_min = rs.vec3("geofence_min", cfg.safety.geofence_min);
    cfg.safety.geofence_max = rs.vec3("geofence_max", cfg.safety.geofence_max);
    cfg.safety.max_speed = rs.number("max_speed", cfg.safety.max_speed);
    cfg.safety.watchdog_window = rs.number("watchdog_window", cfg.safety.watchdog_window);
    rs.finish();
  }

  if (const json* s = r.object("script")) {
    ObjectReader rs(*s, "script");
    if (const json* stages = rs.object("stages")) {
      if (!stages->is_array()) throw ConfigError("script.stages: expected an array");
      cfg.script.stages.clear();
      int i = 0;
      for (const json& row : *stages) {
        const std::string path = "script.stages[" + std::to_string(i++) + "]";
        ObjectReader rr(row, path);
        Stage stage;
        stage.kind = stage_kind_from_string(rr.text("type", ""), path + ".type");
        stage.altitude = rr.number("altitude", 0.0);
        stage.duration = rr.number("duration", 0.0);
        rr.finish();
        cfg.script.stages.push_back(stage);
      }
    }
    rs.finish();
  }

  if (const json* d = r.object("docking")) {
    ObjectReader rd(*d, "docking");
    auto& dk = cfg.docking;
    dk.entry_offset = rd.number("entry_offset", dk.entry_offset);
    dk.approach_standoff = rd.number("approach_standoff", dk.approach_standoff);
    dk.capture_push = rd.number("capture_push", dk.capture_push);
    dk.align_speed = rd.number("align_speed", dk.align_speed);
    dk.guard_filter_hz = rd.number("guard_filter_hz", dk.guard_filter_hz);
    dk.climb_speed = rd.number("climb_speed", dk.climb_speed);
    dk.stage_pos_tol = rd.number("stage_pos_tol", dk.stage_pos_tol);
    dk.stage_speed_tol = rd.number("stage_speed_tol", dk.stage_speed_tol);
    dk.stage_timeout = rd.number("stage_timeout", dk.stage_timeout);
    rd.finish();
  }

  if (const json* i = r.object("inject")) {
    ObjectReader ri(*i, "inject");
    cfg.inject.capture_vz = ri.number("capture_vz", cfg.inject.capture_vz);
    ri.finish();
  }

  if (const json* i = r.object("initial")) {
    ObjectReader ri(*i, "initial");
    cfg.initial_leader.position = ri.vec3("leader_pos", cfg.initial_leader.position);
    cfg.initial_follower.position =
        ri.vec3("follower_pos", cfg.initial_follower.position);
    cfg.initial_leader.yaw = ri.number("leader_yaw", cfg.initial_leader.yaw);
    cfg.initial_follower.yaw = ri.number("follower_yaw", cfg.initial_follower.yaw);
    ri.finish();
  }

  r.finish();
  validate_config(cfg);
  return cfg;
}

TrialConfig load_config_file(const std::string& path, const std::string& preset) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json overlay;
  try {
    in >> overlay;
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  json base = config_to_json(preset_config(preset));
  base.merge_patch(overlay);
  return config_from_json(base);
}

void validate_config(const TrialConfig& cfg) {
  check(cfg.dt > 0.0 && cfg.dt <= 0.05, "dt: must be in (0, 0.05]");

  const auto& w = cfg.world;
  check(w.max_accel > 0.0, "world.max_accel: must be > 0");
  check(w.max_speed > 0.0, "world.max_speed: must be > 0");
  check(w.drag_coeff >= 0.0, "world.drag_coeff: must be >= 0");
  check(w.max_yaw_rate > 0.0, "world.max_yaw_rate: must be > 0");
  check(w.latch.engage_distance > 0.0, "world.latch.engage_distance: must be > 0");
  check(w.latch.max_latch_speed > 0.0, "world.latch.max_latch_speed: must be > 0");
  check(w.latch.max_latch_yaw > 0.0 && w.latch.max_latch_yaw < std::numbers::pi / 2,
        "world.latch.max_latch_yaw: must be in (0, pi/2)");
  check(w.latch.restitution >= 0.0 && w.latch.restitution <= 1.0,
        "world.latch.restitution: must be in [0, 1]");
  check(w.latch.rearm_distance >= w.latch.engage_distance,
        "world.latch.rearm_distance: must be >= world.latch.engage_distance");
  check(w.disturbance.sigma >= 0.0, "world.disturbance.sigma: must be >= 0");
  check(w.disturbance.theta > 0.0, "world.disturbance.theta: must be > 0");

  const auto& s = cfg.sensors;
  check(s.mocap_rate > 0.0, "sensors.mocap_rate: must be > 0");
  check(s.imu_rate > 0.0, "sensors.imu_rate: must be > 0");
  check(s.mocap_pos_noise >= 0.0, "sensors.mocap_pos_noise: must be >= 0");
  check(s.mocap_yaw_noise >= 0.0, "sensors.mocap_yaw_noise: must be >= 0");
  check(s.accel_noise >= 0.0, "sensors.accel_noise: must be >= 0");
  check(s.gyro_noise >= 0.0, "sensors.gyro_noise: must be >= 0");
  check(s.mocap_latency >= 0.0, "sensors.mocap_latency: must be >= 0");
  check(s.dropout_prob >= 0.0 && s.dropout_prob < 1.0,
        "sensors.dropout_prob: must be in [0, 1)");

  const auto& e = cfg.ekf;
  check(e.q_accel > 0.0, "ekf.q_accel: must be > 0");
  check(e.q_yaw > 0.0, "ekf.q_yaw: must be > 0");
  check(e.r_pos > 0.0, "ekf.r_pos: must be > 0");
  check(e.r_yaw > 0.0, "ekf.r_yaw: must be > 0");
  check(e.p0 > 0.0, "ekf.p0: must be > 0");
  check(e.gate_sigma > 0.0, "ekf.gate_sigma: must be > 0");

  for (const auto& [gains, who] :
       {std::pair{&cfg.gains_leader, "gains.leader"},
        std::pair{&cfg.gains_follower, "gains.follower"}}) {
    check((gains->kp_pos.array() >= 0.0).all(), std::string(who) + ".kp_pos: must be >= 0");
    check((gains->ki_pos.array() >= 0.0).all(), std::string(who) + ".ki_pos: must be >= 0");
    check((gains->kd_pos.array() >= 0.0).all(), std::string(who) + ".kd_pos: must be >= 0");
    check(gains->kp_yaw >= 0.0, std::string(who) + ".kp_yaw: must be >= 0");
    check(gains->i_limit > 0.0, std::string(who) + ".i_limit: must be > 0");
  }

  const auto& f = cfg.formation;
  check(f.d_dock > 0.0, "formation.d_dock: must be > 0");
  check(f.v_form_leader > 0.0, "formation.v_form_leader: must be > 0");
  check(f.v_form_follower > 0.0, "formation.v_form_follower: must be > 0");
  check(f.t_usr > 0.0, "formation.t_usr: must be > 0");

  const auto& t = cfg.tolerances;
  check(t.eps_b_coarse > 0.0, "tolerances.eps_b_coarse: must be > 0");
  check(t.eps_b_fine > 0.0, "tolerances.eps_b_fine: must be > 0");
  if (t.eps_b_fine > t.eps_b_coarse) {
    std::ostringstream msg;
    msg << "tolerances.eps_b_fine (" << t.eps_b_fine
        << ") must be <= tolerances.eps_b_coarse (" << t.eps_b_coarse << ")";
    throw ConfigError(msg.str());
  }
  check(t.eps_psi > 0.0, "tolerances.eps_psi: must be > 0");
  check(t.eps_v > 0.0, "tolerances.eps_v: must be > 0");
  check(t.t_hold > 0.0, "tolerances.t_hold: must be > 0");

  check(cfg.supervisor.debounce_window >= 0.0,
        "supervisor.debounce_window: must be >= 0");
  check(cfg.supervisor.bounce_retries >= 0, "supervisor.bounce_retries: must be >= 0");

  check((cfg.safety.geofence_min.array() < cfg.safety.geofence_max.array()).all(),
        "safety.geofence_min: must be < safety.geofence_max on every axis");
  check(cfg.safety.max_speed > 0.0, "safety.max_speed: must be > 0");
  check(cfg.safety.watchdog_window > 0.0, "safety.watchdog_window: must be > 0");

  const auto& stages = cfg.script.stages;
  check(!stages.empty(), "script.stages: must not be empty");
  check(stages.front().kind == StageKind::Takeoff,
        "script.stages: first stage must be takeoff");
  check(stages.back().kind == StageKind::Land, "script.stages: last stage must be land");
  int docking_windows = 0;
  for (const Stage& s2 : stages)
    if (s2.kind == StageKind::DockingWindow) ++docking_windows;
  check(docking_windows == 1, "script.stages: exactly one docking_window required");
  for (const Stage& s2 : stages) {
    if (s2.kind == StageKind::Takeoff)
      check(s2.altitude > 0.0, "script.stages: takeoff altitude must be > 0");
    if (s2.kind == StageKind::Hold)
      check(s2.duration >= 0.0, "script.stages: hold duration must be >= 0");
  }

  const auto& d = cfg.docking;
  check(d.entry_offset > 0.0, "docking.entry_offset: must be > 0");
  check(d.approach_standoff > 0.0, "docking.approach_standoff: must be > 0");
  check(d.capture_push >= 0.0, "docking.capture_push: must be >= 0");
  check(d.align_speed > 0.0, "docking.align_speed: must be > 0");
  check(d.guard_filter_hz > 0.0, "docking.guard_filter_hz: must be > 0");
  check(d.climb_speed > 0.0, "docking.climb_speed: must be > 0");
  check(d.stage_timeout > 0.0, "docking.stage_timeout: must be > 0");
}

std::string config_digest(const TrialConfig& cfg) {
  const std::string canonical = config_to_json(cfg).dump();
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : canonical) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return std::string(buf);
}

}  // namespace dockbench
