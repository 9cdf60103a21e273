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

#ifndef PERCH_TELEMETRY_HPP_
#define PERCH_TELEMETRY_HPP_

#include <cstdint>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "perch/vec3.hpp"

namespace perch {

inline constexpr const char* kLogSchema = "perch-log/1";
inline constexpr const char* kCsvSchema = "perch-csv/1";

// Event types: mission, maneuver, command, gripper, mmc_mode, mmc_command,
// attach, detach, arm, disturbance, fault, run.
struct TelemetryEvent {
  std::string type;
  std::string detail;

  bool operator==(const TelemetryEvent&) const = default;
};

struct TelemetryRecord {
  std::int64_t step = 0;
  double t = 0.0;

  std::string mission_state;
  bool mission_started = false;
  int cycles_completed = 0;
  int landing_attempts = 0;

  Vec3 position;
  Vec3 velocity;
  double yaw = 0.0;
  double altitude = 0.0;
  bool armed = false;
  bool attached = false;

  double soc = 0.0;
  double battery_voltage = 0.0;
  double net_power = 0.0;
  double energy_in_wh = 0.0;   // cumulative, into the pack
  double energy_out_wh = 0.0;  // cumulative, out of the pack

  std::string mmc_mode;
  std::string gripper_status;  // as sensed by the MMC
  double charging_power = 0.0;
  double holding_force = 0.0;
  double im_mean_abs = 0.0;
  double ip_rms = 0.0;
  double window_start_deg = 0.0;
  double window_width_deg = 0.0;

  std::string gripper_phase;  // mechanism truth
  double engagement_progress = 0.0;

  std::string maneuver;
  std::string maneuver_phase;
  double lateral_error = 0.0;
  Vec3 setpoint;
  int aborts = 0;
  int confirmed_tracks = 0;

  std::vector<TelemetryEvent> events;
};

nlohmann::json to_json(const TelemetryRecord& r);
TelemetryRecord record_from_json(const nlohmann::json& j);

// One compact JSON line, no trailing newline.
std::string to_jsonl(const TelemetryRecord& r);

struct CycleStats {
  int index = 0;
  double start_t = 0.0;
  double end_t = 0.0;
  double flight_s = 0.0;
  double charge_s = 0.0;
  double energy_in_wh = 0.0;
  double energy_out_wh = 0.0;
  double min_voltage = 0.0;
  double max_voltage = 0.0;
  double min_flight_voltage = 0.0;
  double max_charging_voltage = 0.0;
  double soc_min = 0.0;
  double soc_max = 0.0;
  double mean_charging_power = 0.0;  // over Charging records in mode 2
  int aborts = 0;
};

struct RunSummary {
  std::string outcome = "running";
  int records = 0;
  int cycles_completed = 0;
  double duration = 0.0;
  int landings = 0;
  int aborts = 0;
  double min_soc = 1.0;
  double min_soc_airborne = 1.0;
  double min_voltage = 0.0;
  double max_voltage = 0.0;
  double mean_charging_power = 0.0;
  std::vector<CycleStats> cycles;
};

nlohmann::json to_json(const RunSummary& s);

// Folds records, in log order, into a RunSummary. Only fields present in
// the log are used, so a replayed log reproduces the live summary.
class SummaryBuilder {
 public:
  void add(const TelemetryRecord& r);
  RunSummary summary() const;

 private:
  struct Open {
    bool active = false;
    CycleStats stats;
    double e_in0 = 0.0;
    double e_out0 = 0.0;
    double charge_since = -1.0;
    double pc_sum = 0.0;
    int pc_n = 0;
  };
  void begin_cycle(const TelemetryRecord& r);

  RunSummary s_;
  Open cur_;
  bool any_ = false;
  bool any_air_ = false;
  double pc_sum_ = 0.0;
  int pc_n_ = 0;
};

// The first line of a log is {"schema":"perch-log/1"}.
std::string log_header();

std::vector<TelemetryRecord> read_log(std::istream& in);
std::vector<TelemetryRecord> read_log_file(const std::string& path);

// Calls `fn` for every record of a JSONL log without holding the log in
// memory.
void for_each_record(std::istream& in, const std::function<void(const TelemetryRecord&)>& fn);

// Streams the CSV extracts (altitude, power, landings) into `dir` record
// by record; finish() adds cycles.csv and summary.json. Each CSV starts
// with a "# perch-csv/1 <name>" line followed by the column header.
class ExtractWriter {
 public:
  explicit ExtractWriter(const std::string& dir);
  void add(const TelemetryRecord& r);
  void finish(const RunSummary& s);

 private:
  std::string dir_;
  std::ofstream altitude_;
  std::ofstream power_;
  std::ofstream landings_;
  int landing_ = 0;
};

void write_cycles_csv(std::ostream& out, const RunSummary& s);

}  // namespace perch

#endif  // PERCH_TELEMETRY_HPP_
