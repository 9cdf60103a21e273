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

#include "perch/telemetry.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <stdexcept>

namespace perch {

using nlohmann::json;

namespace {

json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

bool starts_with(const std::string& s, std::string_view prefix) {
  return s.compare(0, prefix.size(), prefix) == 0;
}

std::string csv_header(const char* name) { return std::string("# ") + kCsvSchema + " " + name; }

}  // namespace

json to_json(const TelemetryRecord& r) {
  json events = json::array();
  for (const auto& e : r.events) events.push_back({{"type", e.type}, {"detail", e.detail}});
  return {
      {"step", r.step},
      {"t", r.t},
      {"mission_state", r.mission_state},
      {"mission_started", r.mission_started},
      {"cycles_completed", r.cycles_completed},
      {"landing_attempts", r.landing_attempts},
      {"position", vec_json(r.position)},
      {"velocity", vec_json(r.velocity)},
      {"yaw", r.yaw},
      {"altitude", r.altitude},
      {"armed", r.armed},
      {"attached", r.attached},
      {"soc", r.soc},
      {"battery_voltage", r.battery_voltage},
      {"net_power", r.net_power},
      {"energy_in_wh", r.energy_in_wh},
      {"energy_out_wh", r.energy_out_wh},
      {"mmc_mode", r.mmc_mode},
      {"gripper_status", r.gripper_status},
      {"charging_power", r.charging_power},
      {"holding_force", r.holding_force},
      {"im_mean_abs", r.im_mean_abs},
      {"ip_rms", r.ip_rms},
      {"window_start_deg", r.window_start_deg},
      {"window_width_deg", r.window_width_deg},
      {"gripper_phase", r.gripper_phase},
      {"engagement_progress", r.engagement_progress},
      {"maneuver", r.maneuver},
      {"maneuver_phase", r.maneuver_phase},
      {"lateral_error", r.lateral_error},
      {"setpoint", vec_json(r.setpoint)},
      {"aborts", r.aborts},
      {"confirmed_tracks", r.confirmed_tracks},
      {"events", events},
  };
}

TelemetryRecord record_from_json(const json& j) {
  TelemetryRecord r;
  r.step = j.at("step").get<std::int64_t>();
  r.t = j.at("t").get<double>();
  r.mission_state = j.at("mission_state").get<std::string>();
  r.mission_started = j.at("mission_started").get<bool>();
  r.cycles_completed = j.at("cycles_completed").get<int>();
  r.landing_attempts = j.at("landing_attempts").get<int>();
  r.position = vec_from(j.at("position"));
  r.velocity = vec_from(j.at("velocity"));
  r.yaw = j.at("yaw").get<double>();
  r.altitude = j.at("altitude").get<double>();
  r.armed = j.at("armed").get<bool>();
  r.attached = j.at("attached").get<bool>();
  r.soc = j.at("soc").get<double>();
  r.battery_voltage = j.at("battery_voltage").get<double>();
  r.net_power = j.at("net_power").get<double>();
  r.energy_in_wh = j.at("energy_in_wh").get<double>();
  r.energy_out_wh = j.at("energy_out_wh").get<double>();
  r.mmc_mode = j.at("mmc_mode").get<std::string>();
  r.gripper_status = j.at("gripper_status").get<std::string>();
  r.charging_power = j.at("charging_power").get<double>();
  r.holding_force = j.at("holding_force").get<double>();
  r.im_mean_abs = j.at("im_mean_abs").get<double>();
  r.ip_rms = j.at("ip_rms").get<double>();
  r.window_start_deg = j.at("window_start_deg").get<double>();
  r.window_width_deg = j.at("window_width_deg").get<double>();
  r.gripper_phase = j.at("gripper_phase").get<std::string>();
  r.engagement_progress = j.at("engagement_progress").get<double>();
  r.maneuver = j.at("maneuver").get<std::string>();
  r.maneuver_phase = j.at("maneuver_phase").get<std::string>();
  r.lateral_error = j.at("lateral_error").get<double>();
  r.setpoint = vec_from(j.at("setpoint"));
  r.aborts = j.at("aborts").get<int>();
  r.confirmed_tracks = j.at("confirmed_tracks").get<int>();
  for (const auto& e : j.at("events")) {
    r.events.push_back({e.at("type").get<std::string>(), e.at("detail").get<std::string>()});
  }
  return r;
}

std::string to_jsonl(const TelemetryRecord& r) { return to_json(r).dump(); }

std::string log_header() { return json{{"schema", kLogSchema}}.dump(); }

json to_json(const RunSummary& s) {
  json cycles = json::array();
  for (const auto& c : s.cycles) {
    cycles.push_back({{"index", c.index},
                      {"start_t", c.start_t},
                      {"end_t", c.end_t},
                      {"flight_s", c.flight_s},
                      {"charge_s", c.charge_s},
                      {"energy_in_wh", c.energy_in_wh},
                      {"energy_out_wh", c.energy_out_wh},
                      {"min_voltage", c.min_voltage},
                      {"max_voltage", c.max_voltage},
                      {"min_flight_voltage", c.min_flight_voltage},
                      {"max_charging_voltage", c.max_charging_voltage},
                      {"soc_min", c.soc_min},
                      {"soc_max", c.soc_max},
                      {"mean_charging_power", c.mean_charging_power},
                      {"aborts", c.aborts}});
  }
  return {{"outcome", s.outcome},
          {"records", s.records},
          {"cycles_completed", s.cycles_completed},
          {"duration", s.duration},
          {"landings", s.landings},
          {"aborts", s.aborts},
          {"min_soc", s.min_soc},
          {"min_soc_airborne", s.min_soc_airborne},
          {"min_voltage", s.min_voltage},
          {"max_voltage", s.max_voltage},
          {"mean_charging_power", s.mean_charging_power},
          {"cycles", cycles}};
}

void SummaryBuilder::begin_cycle(const TelemetryRecord& r) {
  cur_ = Open{};
  cur_.active = true;
  cur_.stats.index = static_cast<int>(s_.cycles.size()) + 1;
  cur_.stats.start_t = r.t;
  cur_.stats.min_voltage = cur_.stats.max_voltage = r.battery_voltage;
  cur_.stats.min_flight_voltage = r.battery_voltage;
  cur_.stats.max_charging_voltage = 0.0;
  cur_.stats.soc_min = cur_.stats.soc_max = r.soc;
  cur_.e_in0 = r.energy_in_wh;
  cur_.e_out0 = r.energy_out_wh;
}

void SummaryBuilder::add(const TelemetryRecord& r) {
  ++s_.records;
  if (!any_) {
    any_ = true;
    s_.min_voltage = s_.max_voltage = r.battery_voltage;
    s_.min_soc = r.soc;
    begin_cycle(r);
  }
  s_.duration = r.t;
  s_.min_soc = std::min(s_.min_soc, r.soc);
  s_.min_voltage = std::min(s_.min_voltage, r.battery_voltage);
  s_.max_voltage = std::max(s_.max_voltage, r.battery_voltage);
  if (!r.attached) {
    s_.min_soc_airborne = any_air_ ? std::min(s_.min_soc_airborne, r.soc) : r.soc;
    any_air_ = true;
  }

  CycleStats& c = cur_.stats;
  c.min_voltage = std::min(c.min_voltage, r.battery_voltage);
  c.max_voltage = std::max(c.max_voltage, r.battery_voltage);
  c.soc_min = std::min(c.soc_min, r.soc);
  c.soc_max = std::max(c.soc_max, r.soc);
  if (r.attached) {
    c.max_charging_voltage = std::max(c.max_charging_voltage, r.battery_voltage);
  } else {
    c.min_flight_voltage = std::min(c.min_flight_voltage, r.battery_voltage);
  }
  if (r.mission_state == "Charging" && r.mmc_mode == "Mode2_Charging") {
    cur_.pc_sum += r.charging_power;
    ++cur_.pc_n;
    pc_sum_ += r.charging_power;
    ++pc_n_;
  }

  for (const auto& e : r.events) {
    if (e.type == "mission") {
      const auto arrow = e.detail.find("->");
      if (arrow == std::string::npos) continue;
      const std::string from = e.detail.substr(0, arrow);
      const std::string to = e.detail.substr(arrow + 2);
      if (to == "Charging") cur_.charge_since = r.t;
      if (from == "Charging" && cur_.charge_since >= 0.0) {
        c.charge_s += r.t - cur_.charge_since;
        cur_.charge_since = -1.0;
      }
      if (from == "TakingOffFromCable" && to == "Inspecting") {
        c.end_t = r.t;
        c.flight_s = c.end_t - c.start_t - c.charge_s;
        c.energy_in_wh = r.energy_in_wh - cur_.e_in0;
        c.energy_out_wh = r.energy_out_wh - cur_.e_out0;
        c.mean_charging_power = cur_.pc_n > 0 ? cur_.pc_sum / cur_.pc_n : 0.0;
        s_.cycles.push_back(c);
        ++s_.cycles_completed;
        begin_cycle(r);
      }
    } else if (e.type == "maneuver") {
      if (starts_with(e.detail, "LandOnCable started")) ++s_.landings;
      if (starts_with(e.detail, "LandOnCable aborted")) {
        ++s_.aborts;
        ++cur_.stats.aborts;
      }
    } else if (e.type == "run") {
      s_.outcome = e.detail;
    }
  }
}

RunSummary SummaryBuilder::summary() const {
  RunSummary s = s_;
  s.mean_charging_power = pc_n_ > 0 ? pc_sum_ / pc_n_ : 0.0;
  return s;
}

void for_each_record(std::istream& in, const std::function<void(const TelemetryRecord&)>& fn) {
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    TelemetryRecord r;
    try {
      const json j = json::parse(line);
      if (j.contains("schema")) {
        if (j["schema"] != kLogSchema) {
          throw std::runtime_error("log line " + std::to_string(lineno) + ": unsupported schema " +
                                   j["schema"].dump());
        }
        continue;
      }
      r = record_from_json(j);
    } catch (const json::exception& e) {
      throw std::runtime_error("log line " + std::to_string(lineno) + ": " + e.what());
    }
    fn(r);
  }
}

std::vector<TelemetryRecord> read_log(std::istream& in) {
  std::vector<TelemetryRecord> out;
  for_each_record(in, [&](const TelemetryRecord& r) { out.push_back(r); });
  return out;
}

std::vector<TelemetryRecord> read_log_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open log: " + path);
  return read_log(in);
}

namespace {

std::ofstream open_out(const std::string& dir, const char* name) {
  std::ofstream f(std::filesystem::path(dir) / name);
  if (!f) throw std::runtime_error(std::string("cannot write ") + dir + "/" + name);
  f.precision(10);
  return f;
}

}  // namespace

ExtractWriter::ExtractWriter(const std::string& dir) : dir_(dir) {
  std::filesystem::create_directories(dir);
  altitude_ = open_out(dir, "altitude.csv");
  power_ = open_out(dir, "power.csv");
  landings_ = open_out(dir, "landings.csv");
  altitude_ << csv_header("altitude") << "\n" << "t,x,y,z,altitude,mission_state,maneuver\n";
  power_ << csv_header("power") << "\n"
         << "t,soc,battery_voltage,net_power,charging_power,mmc_mode,mission_state\n";
  landings_ << csv_header("landings") << "\n"
            << "landing,t,x,y,z,setpoint_x,setpoint_y,setpoint_z,lateral_error,phase,"
               "gripper_phase\n";
}

void ExtractWriter::add(const TelemetryRecord& r) {
  altitude_ << r.t << ',' << r.position.x << ',' << r.position.y << ',' << r.position.z << ','
            << r.altitude << ',' << r.mission_state << ',' << r.maneuver << '\n';
  power_ << r.t << ',' << r.soc << ',' << r.battery_voltage << ',' << r.net_power << ','
         << r.charging_power << ',' << r.mmc_mode << ',' << r.mission_state << '\n';
  for (const auto& e : r.events) {
    if (e.type == "maneuver" && starts_with(e.detail, "LandOnCable started")) ++landing_;
  }
  if (r.maneuver == "LandOnCable") {
    landings_ << landing_ << ',' << r.t << ',' << r.position.x << ',' << r.position.y << ','
              << r.position.z << ',' << r.setpoint.x << ',' << r.setpoint.y << ','
              << r.setpoint.z << ',' << r.lateral_error << ',' << r.maneuver_phase << ','
              << r.gripper_phase << '\n';
  }
}

void ExtractWriter::finish(const RunSummary& s) {
  altitude_.flush();
  power_.flush();
  landings_.flush();
  auto cycles = open_out(dir_, "cycles.csv");
  write_cycles_csv(cycles, s);
  auto summary = open_out(dir_, "summary.json");
  summary << to_json(s).dump(2) << '\n';
}

void write_cycles_csv(std::ostream& out, const RunSummary& s) {
  out << csv_header("cycles") << "\n";
  out << "cycle,start_t,end_t,flight_s,charge_s,energy_in_wh,energy_out_wh,min_voltage,"
         "max_voltage,soc_min,soc_max,mean_charging_power,aborts\n";
  for (const auto& c : s.cycles) {
    out << c.index << ',' << c.start_t << ',' << c.end_t << ',' << c.flight_s << ','
        << c.charge_s << ',' << c.energy_in_wh << ',' << c.energy_out_wh << ','
        << c.min_voltage << ',' << c.max_voltage << ',' << c.soc_min << ',' << c.soc_max << ','
        << c.mean_charging_power << ',' << c.aborts << '\n';
  }
}

}  // namespace perch
