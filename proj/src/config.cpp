// Copyright 2026 The perchsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "perch/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

namespace perch {

using nlohmann::json;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Rounded so round angles stay round on disk.
double to_degrees(double radians) { return std::round(radians / kDeg * 1e9) / 1e9; }

class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(path_ + "." + key + ": " + e.what());
    }
  }

  void vec3(const char* key, Vec3& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() ||
        !v[2].is_number()) {
      throw ConfigError(path_ + "." + key + ": expected [x, y, z]");
    }
    out = {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
  }

  void degrees(const char* key, double& radians) {
    double d = radians / kDeg;
    get(key, d);
    radians = d * kDeg;
  }

  const json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  std::string path(const char* key) const { return path_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(path_ + ": unknown key '" + it.key() + "'");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

void read_window(const json& j, const std::string& path, TransferWindow& w) {
  Section s(j, path);
  s.degrees("start_deg", w.start_phase);
  s.degrees("width_deg", w.width);
  s.degrees("step_deg", w.step_size);
  s.finish();
}

json window_json(const TransferWindow& w) {
  return {{"start_deg", to_degrees(w.start_phase)},
          {"width_deg", to_degrees(w.width)},
          {"step_deg", to_degrees(w.step_size)}};
}

OperatorMode parse_mode(const std::string& m) {
  if (m == "none") return OperatorMode::None;
  if (m == "soc_swing") return OperatorMode::SocSwing;
  if (m == "timed") return OperatorMode::Timed;
  throw ConfigError("operator.mode: expected none, soc_swing or timed");
}

std::string mode_name(OperatorMode m) {
  switch (m) {
    case OperatorMode::None: return "none";
    case OperatorMode::SocSwing: return "soc_swing";
    case OperatorMode::Timed: return "timed";
  }
  return "none";
}

}  // namespace

void validate(const Scenario& s) {
  if (!(s.clock.flight_dt > 0.0) || !(s.clock.circuit_dt > 0.0) || s.clock.circuit_dt > 1e-4) {
    throw ConfigError("clock: flight_dt > 0 and 0 < circuit_dt <= 1e-4 required");
  }
  (void)SimClock(s.clock.flight_dt, s.clock.circuit_dt, s.clock.realtime_factor);
  if (!(s.clock.duration > 0.0)) throw ConfigError("clock.duration must be positive");
  const double per_cycle = 1.0 / (s.powerline.line_frequency * s.clock.circuit_dt);
  if (std::abs(per_cycle - std::round(per_cycle)) > 1e-6) {
    throw ConfigError("circuit_dt must divide the line period");
  }
  validate(s.powerline);
  if (!(s.drone.initial.mass > 0.0)) throw ConfigError("drone mass must be positive");
  if (!is_finite(s.drone.initial.position)) throw ConfigError("drone position must be finite");
  if (!(s.drone.limits.accel_limit > 0.0) || !(s.drone.limits.max_yaw_rate > 0.0)) {
    throw ConfigError("drone limits must be positive");
  }
  if (!(s.drone.limits.depleted_thrust_ratio >= 0.0)) {
    throw ConfigError("depleted_thrust_ratio must be >= 0");
  }
  if (!(s.drone.initial_soc >= 0.0 && s.drone.initial_soc <= 1.0)) {
    throw ConfigError("initial_soc must lie in [0, 1]");
  }
  if (!(s.drone.odometry_noise >= 0.0)) throw ConfigError("odometry_noise must be >= 0");
  validate(s.powertrain);
  validate(s.circuit);
  validate(s.mmc);
  validate(s.gripper);
  validate(s.sensor);
  validate(s.tracker);
  validate(s.mpc);
  validate(s.landing, s.gripper);
  validate(s.takeoff);
  validate(s.mission);
  if (!(s.operator_script.initiate_below < s.operator_script.interrupt_above)) {
    throw ConfigError("operator.initiate_below must be below interrupt_above");
  }
  if (s.disturbance.landing_index < 1 || !(s.disturbance.delay >= 0.0)) {
    throw ConfigError("disturbance landing_index >= 1 and delay >= 0 required");
  }
  if (s.telemetry.log_every < 1 || !(s.telemetry.stream_hz > 0.0) ||
      s.telemetry.circuit_trace_cycles < 0) {
    throw ConfigError("telemetry settings out of range");
  }
  if (s.sweep.ip_values.empty() || s.sweep.cycles < 1 || s.sweep.average_cycles < 1 ||
      s.sweep.average_cycles > s.sweep.cycles) {
    throw ConfigError("sweep settings out of range");
  }
  for (double ip : s.sweep.ip_values) {
    if (!(ip > 0.0)) throw ConfigError("sweep ip_values must be positive");
  }
}

Scenario scenario_from_json(const json& j) {
  Scenario s;
  Section root(j, "scenario");
  root.get("seed", s.seed);

  if (const json* c = root.child("clock")) {
    Section x(*c, "clock");
    x.get("flight_dt", s.clock.flight_dt);
    x.get("circuit_dt", s.clock.circuit_dt);
    x.get("realtime_factor", s.clock.realtime_factor);
    x.get("duration", s.clock.duration);
    x.finish();
  }

  if (const json* c = root.child("powerline")) {
    Section x(*c, "powerline");
    x.get("line_frequency", s.powerline.line_frequency);
    if (const json* prof = x.child("current_profile")) {
      if (!prof->is_array()) throw ConfigError("powerline.current_profile: expected an array");
      s.powerline.current_profile.clear();
      for (const auto& seg : *prof) {
        Section y(seg, "powerline.current_profile[]");
        CurrentSegment cs;
        y.get("t", cs.start_time);
        y.get("rms", cs.rms);
        y.finish();
        s.powerline.current_profile.push_back(cs);
      }
    }
    if (const json* cables = x.child("cables")) {
      if (!cables->is_array()) throw ConfigError("powerline.cables: expected an array");
      s.powerline.cables.clear();
      for (const auto& cj : *cables) {
        Section y(cj, "powerline.cables[]");
        CableSpec cs;
        y.vec3("a", cs.endpoint_a);
        y.vec3("b", cs.endpoint_b);
        y.get("sag", cs.sag);
        y.get("phase_id", cs.phase_id);
        if (const json* o = y.child("oscillation")) {
          Section z(*o, "powerline.cables[].oscillation");
          z.get("amplitude", cs.oscillation.amplitude);
          z.get("frequency", cs.oscillation.frequency);
          z.finish();
        }
        y.finish();
        s.powerline.cables.push_back(cs);
      }
    }
    x.finish();
  }

  if (const json* c = root.child("drone")) {
    Section x(*c, "drone");
    x.vec3("position", s.drone.initial.position);
    x.get("yaw", s.drone.initial.yaw);
    x.get("mass", s.drone.initial.mass);
    x.get("accel_limit", s.drone.limits.accel_limit);
    x.get("max_yaw_rate", s.drone.limits.max_yaw_rate);
    x.get("ground_z", s.drone.limits.ground_z);
    x.get("depleted_thrust_ratio", s.drone.limits.depleted_thrust_ratio);
    x.get("initial_soc", s.drone.initial_soc);
    x.get("odometry_noise", s.drone.odometry_noise);
    x.finish();
  }

  if (const json* c = root.child("battery")) {
    Section x(*c, "battery");
    BatteryParams& b = s.powertrain.battery;
    x.get("capacity_ah", b.capacity_ah);
    x.get("cells", b.cells);
    x.get("nominal_cell_voltage", b.nominal_cell_voltage);
    x.get("internal_resistance", b.internal_resistance);
    if (const json* o = x.child("ocv")) {
      Section y(*o, "battery.ocv");
      y.get("soc", b.ocv.soc);
      y.get("volts", b.ocv.volts);
      y.finish();
    }
    x.get("liftoff_soc", s.powertrain.liftoff_soc);
    x.get("reference_mass", s.powertrain.reference_mass);
    x.get("endurance_min", s.powertrain.endurance_min);
    x.finish();
  }

  if (const json* c = root.child("circuit")) {
    Section x(*c, "circuit");
    CircuitParams& p = s.circuit;
    x.get("turns", p.turns);
    x.get("magnetizing_inductance", p.magnetizing_inductance);
    x.get("winding_resistance", p.winding_resistance);
    x.get("switch_resistance", p.switch_resistance);
    x.get("force_constant", p.force_constant);
    x.get("output_voltage", p.output_voltage);
    x.get("release_clamp_voltage", p.release_clamp_voltage);
    x.get("dc_setpoint", p.dc_setpoint);
    x.finish();
  }

  if (const json* c = root.child("mmc")) {
    Section x(*c, "mmc");
    MmcConfig& m = s.mmc;
    x.get("ip_hold_min", m.thresholds.ip_hold_min);
    x.get("v_full", m.thresholds.v_full);
    x.get("v_resume", m.thresholds.v_resume);
    x.get("sense_reference_current", m.sensing.reference_line_current);
    x.get("sense_reference_power", m.sensing.reference_power);
    x.get("sense_noise_floor", m.sensing.noise_floor_fraction);
    if (const json* w = x.child("initial_window")) read_window(*w, x.path("initial_window"), m.initial_window);
    if (const json* w = x.child("hold_window")) read_window(*w, x.path("hold_window"), m.hold_window);
    x.get("pno_settle_cycles", m.pno_settle_cycles);
    x.get("pno_observe_cycles", m.pno_observe_cycles);
    x.get("release_force", m.release_force);
    x.finish();
  }

  if (const json* c = root.child("gripper")) {
    Section x(*c, "gripper");
    GripperGeometry& g = s.gripper;
    x.get("guide_tip_separation", g.guide_tip_separation);
    x.get("max_misalignment", g.max_misalignment);
    x.get("guide_tip_height", g.guide_tip_height);
    x.get("engage_depth", g.engage_depth);
    x.get("closure_stroke", g.closure_stroke);
    x.get("closure_force_required", g.closure_force_required);
    x.degrees("max_roll_misalignment_deg", g.max_roll_misalignment);
    x.finish();
  }

  if (const json* c = root.child("sensor")) {
    Section x(*c, "sensor");
    x.get("max_range", s.sensor.max_range);
    x.get("points_per_cable", s.sensor.points_per_cable);
    x.get("noise_sigma", s.sensor.noise_sigma);
    x.get("clutter_rate", s.sensor.clutter_rate);
    x.get("direction_kappa", s.sensor.direction_kappa);
    x.finish();
  }

  if (const json* c = root.child("tracker")) {
    Section x(*c, "tracker");
    TrackerParams& t = s.tracker;
    x.get("process_noise", t.process_noise);
    x.get("gate", t.gate);
    x.get("confirm_hits", t.confirm_hits);
    x.get("delete_misses", t.delete_misses);
    x.get("cluster_radius", t.cluster_radius);
    x.get("min_cluster_points", t.min_cluster_points);
    x.get("initial_variance", t.initial_variance);
    x.finish();
  }

  if (const json* c = root.child("mpc")) {
    Section x(*c, "mpc");
    x.get("horizon", s.mpc.horizon);
    x.get("q_pos", s.mpc.q_pos);
    x.get("q_vel", s.mpc.q_vel);
    x.get("r_acc", s.mpc.r_acc);
    x.get("obstacle_margin", s.mpc.obstacle_margin);
    x.finish();
  }

  if (const json* c = root.child("landing")) {
    Section x(*c, "landing");
    LandingParams& l = s.landing;
    x.get("staging_offset", l.staging_offset);
    x.get("ascent_speed", l.ascent_speed);
    x.get("safety_margin", l.safety_margin);
    x.get("max_attempts", l.max_attempts);
    x.get("lateral_offset", l.lateral_offset);
    x.get("staging_tolerance", l.staging_tolerance);
    x.get("staging_speed_tolerance", l.staging_speed_tolerance);
    x.get("yaw_tolerance", l.yaw_tolerance);
    x.get("closure_timeout", l.closure_timeout);
    x.get("capture_timeout", l.capture_timeout);
    x.get("acquire_timeout", l.acquire_timeout);
    x.finish();
  }

  if (const json* c = root.child("takeoff")) {
    Section x(*c, "takeoff");
    x.get("spool_time", s.takeoff.spool_time);
    x.get("offset_below", s.takeoff.offset_below);
    x.get("open_timeout", s.takeoff.open_timeout);
    x.get("arrive_tolerance", s.takeoff.arrive_tolerance);
    x.finish();
  }

  if (const json* c = root.child("mission")) {
    Section x(*c, "mission");
    MissionConfig& m = s.mission;
    x.get("v_low", m.v_low);
    x.get("v_high", m.v_high);
    x.get("inspect_hover_offset", m.inspect_hover_offset);
    x.get("auto_thresholds", m.auto_thresholds);
    x.get("max_cycles", m.max_cycles);
    x.get("autostart", m.autostart);
    x.finish();
  }

  if (const json* c = root.child("operator")) {
    Section x(*c, "operator");
    std::string mode = mode_name(s.operator_script.mode);
    x.get("mode", mode);
    s.operator_script.mode = parse_mode(mode);
    x.get("initiate_below", s.operator_script.initiate_below);
    x.get("interrupt_above", s.operator_script.interrupt_above);
    if (const json* cmds = x.child("commands")) {
      if (!cmds->is_array()) throw ConfigError("operator.commands: expected an array");
      for (const auto& cj : *cmds) {
        Section y(cj, "operator.commands[]");
        TimedCommand tc;
        std::string name;
        y.get("t", tc.t);
        y.get("command", name);
        y.finish();
        const auto cmd = parse_operator_command(name);
        if (!cmd) throw ConfigError("operator.commands[]: unknown command '" + name + "'");
        tc.command = *cmd;
        s.operator_script.commands.push_back(tc);
      }
    }
    x.finish();
  }

  if (const json* c = root.child("disturbance")) {
    Section x(*c, "disturbance");
    x.get("enabled", s.disturbance.enabled);
    x.get("landing_index", s.disturbance.landing_index);
    x.get("delay", s.disturbance.delay);
    x.get("magnitude", s.disturbance.magnitude);
    x.finish();
  }

  if (const json* c = root.child("telemetry")) {
    Section x(*c, "telemetry");
    x.get("log_every", s.telemetry.log_every);
    x.get("stream_hz", s.telemetry.stream_hz);
    x.get("circuit_trace_cycles", s.telemetry.circuit_trace_cycles);
    x.finish();
  }

  if (const json* c = root.child("sweep")) {
    Section x(*c, "sweep");
    x.get("ip_values", s.sweep.ip_values);
    x.get("cycles", s.sweep.cycles);
    x.get("average_cycles", s.sweep.average_cycles);
    x.get("battery_voltage", s.sweep.battery_voltage);
    x.finish();
  }
  root.finish();

  s.mpc.dt = s.clock.flight_dt;
  s.mpc.accel_limit = s.drone.limits.accel_limit;
  validate(s);
  return s;
}

json to_json(const Scenario& s) {
  json cables = json::array();
  for (const auto& c : s.powerline.cables) {
    cables.push_back({{"a", vec_json(c.endpoint_a)},
                      {"b", vec_json(c.endpoint_b)},
                      {"sag", c.sag},
                      {"phase_id", c.phase_id},
                      {"oscillation",
                       {{"amplitude", c.oscillation.amplitude},
                        {"frequency", c.oscillation.frequency}}}});
  }
  json profile = json::array();
  for (const auto& seg : s.powerline.current_profile) {
    profile.push_back({{"t", seg.start_time}, {"rms", seg.rms}});
  }
  json commands = json::array();
  for (const auto& c : s.operator_script.commands) {
    commands.push_back({{"t", c.t}, {"command", wire_name(c.command)}});
  }
  const auto& b = s.powertrain.battery;
  return {
      {"seed", s.seed},
      {"clock",
       {{"flight_dt", s.clock.flight_dt},
        {"circuit_dt", s.clock.circuit_dt},
        {"realtime_factor", s.clock.realtime_factor},
        {"duration", s.clock.duration}}},
      {"powerline",
       {{"line_frequency", s.powerline.line_frequency},
        {"current_profile", profile},
        {"cables", cables}}},
      {"drone",
       {{"position", vec_json(s.drone.initial.position)},
        {"yaw", s.drone.initial.yaw},
        {"mass", s.drone.initial.mass},
        {"accel_limit", s.drone.limits.accel_limit},
        {"max_yaw_rate", s.drone.limits.max_yaw_rate},
        {"ground_z", s.drone.limits.ground_z},
        {"depleted_thrust_ratio", s.drone.limits.depleted_thrust_ratio},
        {"initial_soc", s.drone.initial_soc},
        {"odometry_noise", s.drone.odometry_noise}}},
      {"battery",
       {{"capacity_ah", b.capacity_ah},
        {"cells", b.cells},
        {"nominal_cell_voltage", b.nominal_cell_voltage},
        {"internal_resistance", b.internal_resistance},
        {"ocv", {{"soc", b.ocv.soc}, {"volts", b.ocv.volts}}},
        {"liftoff_soc", s.powertrain.liftoff_soc},
        {"reference_mass", s.powertrain.reference_mass},
        {"endurance_min", s.powertrain.endurance_min}}},
      {"circuit",
       {{"turns", s.circuit.turns},
        {"magnetizing_inductance", s.circuit.magnetizing_inductance},
        {"winding_resistance", s.circuit.winding_resistance},
        {"switch_resistance", s.circuit.switch_resistance},
        {"force_constant", s.circuit.force_constant},
        {"output_voltage", s.circuit.output_voltage},
        {"release_clamp_voltage", s.circuit.release_clamp_voltage},
        {"dc_setpoint", s.circuit.dc_setpoint}}},
      {"mmc",
       {{"ip_hold_min", s.mmc.thresholds.ip_hold_min},
        {"v_full", s.mmc.thresholds.v_full},
        {"v_resume", s.mmc.thresholds.v_resume},
        {"sense_reference_current", s.mmc.sensing.reference_line_current},
        {"sense_reference_power", s.mmc.sensing.reference_power},
        {"sense_noise_floor", s.mmc.sensing.noise_floor_fraction},
        {"initial_window", window_json(s.mmc.initial_window)},
        {"hold_window", window_json(s.mmc.hold_window)},
        {"pno_settle_cycles", s.mmc.pno_settle_cycles},
        {"pno_observe_cycles", s.mmc.pno_observe_cycles},
        {"release_force", s.mmc.release_force}}},
      {"gripper",
       {{"guide_tip_separation", s.gripper.guide_tip_separation},
        {"max_misalignment", s.gripper.max_misalignment},
        {"guide_tip_height", s.gripper.guide_tip_height},
        {"engage_depth", s.gripper.engage_depth},
        {"closure_stroke", s.gripper.closure_stroke},
        {"closure_force_required", s.gripper.closure_force_required},
        {"max_roll_misalignment_deg", to_degrees(s.gripper.max_roll_misalignment)}}},
      {"sensor",
       {{"max_range", s.sensor.max_range},
        {"points_per_cable", s.sensor.points_per_cable},
        {"noise_sigma", s.sensor.noise_sigma},
        {"clutter_rate", s.sensor.clutter_rate},
        {"direction_kappa", s.sensor.direction_kappa}}},
      {"tracker",
       {{"process_noise", s.tracker.process_noise},
        {"gate", s.tracker.gate},
        {"confirm_hits", s.tracker.confirm_hits},
        {"delete_misses", s.tracker.delete_misses},
        {"cluster_radius", s.tracker.cluster_radius},
        {"min_cluster_points", s.tracker.min_cluster_points},
        {"initial_variance", s.tracker.initial_variance}}},
      {"mpc",
       {{"horizon", s.mpc.horizon},
        {"q_pos", s.mpc.q_pos},
        {"q_vel", s.mpc.q_vel},
        {"r_acc", s.mpc.r_acc},
        {"obstacle_margin", s.mpc.obstacle_margin}}},
      {"landing",
       {{"staging_offset", s.landing.staging_offset},
        {"ascent_speed", s.landing.ascent_speed},
        {"safety_margin", s.landing.safety_margin},
        {"max_attempts", s.landing.max_attempts},
        {"lateral_offset", s.landing.lateral_offset},
        {"staging_tolerance", s.landing.staging_tolerance},
        {"staging_speed_tolerance", s.landing.staging_speed_tolerance},
        {"yaw_tolerance", s.landing.yaw_tolerance},
        {"closure_timeout", s.landing.closure_timeout},
        {"capture_timeout", s.landing.capture_timeout},
        {"acquire_timeout", s.landing.acquire_timeout}}},
      {"takeoff",
       {{"spool_time", s.takeoff.spool_time},
        {"offset_below", s.takeoff.offset_below},
        {"open_timeout", s.takeoff.open_timeout},
        {"arrive_tolerance", s.takeoff.arrive_tolerance}}},
      {"mission",
       {{"v_low", s.mission.v_low},
        {"v_high", s.mission.v_high},
        {"inspect_hover_offset", s.mission.inspect_hover_offset},
        {"auto_thresholds", s.mission.auto_thresholds},
        {"max_cycles", s.mission.max_cycles},
        {"autostart", s.mission.autostart}}},
      {"operator",
       {{"mode", mode_name(s.operator_script.mode)},
        {"initiate_below", s.operator_script.initiate_below},
        {"interrupt_above", s.operator_script.interrupt_above},
        {"commands", commands}}},
      {"disturbance",
       {{"enabled", s.disturbance.enabled},
        {"landing_index", s.disturbance.landing_index},
        {"delay", s.disturbance.delay},
        {"magnitude", s.disturbance.magnitude}}},
      {"telemetry",
       {{"log_every", s.telemetry.log_every},
        {"stream_hz", s.telemetry.stream_hz},
        {"circuit_trace_cycles", s.telemetry.circuit_trace_cycles}}},
      {"sweep",
       {{"ip_values", s.sweep.ip_values},
        {"cycles", s.sweep.cycles},
        {"average_cycles", s.sweep.average_cycles},
        {"battery_voltage", s.sweep.battery_voltage}}},
  };
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return scenario_from_json(j);
}

}  // namespace perch
