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


#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "perch/config.hpp"
#include "perch/telemetry.hpp"

namespace perch {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("perch_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Config, DefaultsRoundTrip) {
  const Scenario s;
  EXPECT_NO_THROW(validate(s));
  const json j = to_json(s);
  EXPECT_EQ(to_json(scenario_from_json(j)), j);
  EXPECT_EQ(to_json(scenario_from_json(json::object())), j);
}

TEST(Config, ShippedConfigsLoadAndRoundTrip) {
  for (const char* name : {"default.json", "soc_swing.json", "disturbed_landing.json", "serve.json"}) {
    const Scenario s = load_scenario(std::string(PERCH_SOURCE_DIR) + "/configs/" + name);
    EXPECT_EQ(to_json(scenario_from_json(to_json(s))), to_json(s)) << name;
  }
}

TEST(Config, AnglesAreDegreesOnDisk) {
  const Scenario s = scenario_from_json(
      json::parse(R"({"mmc": {"initial_window": {"start_deg": 30, "width_deg": 90, "step_deg": 2}}})"));
  EXPECT_NEAR(s.mmc.initial_window.start_phase, std::numbers::pi / 6, 1e-12);
  EXPECT_NEAR(s.mmc.initial_window.step_size, std::numbers::pi / 90, 1e-12);
}

TEST(Config, OperatorScriptParses) {
  const Scenario s = scenario_from_json(json::parse(
      R"({"operator": {"mode": "timed", "commands": [{"t": 5, "command": "initiate_charging"}]}})"));
  EXPECT_EQ(s.operator_script.mode, OperatorMode::Timed);
  ASSERT_EQ(s.operator_script.commands.size(), 1u);
  EXPECT_EQ(s.operator_script.commands[0].command, OperatorCommand::InitiateCharging);
}

TEST(Config, RejectsBadInput) {
  const char* bad[] = {
      R"({"bogus": 1})",
      R"({"circuit": {"turns": 60, "turnz": 1}})",
      R"({"clock": {"circuit_dt": 0.003}})",
      R"({"clock": {"circuit_dt": 0.00015}})",
      R"({"battery": {"liftoff_soc": 1.5}})",
      R"({"circuit": {"turns": "sixty"}})",
      R"({"operator": {"mode": "sometimes"}})",
      R"({"operator": {"mode": "timed", "commands": [{"t": 1, "command": "land"}]}})",
      R"({"powerline": {"cables": []}})",
      R"({"landing": {"safety_margin": 0.3}})",
      R"({"mmc": {"v_resume": 26.0}})",
      R"({"drone": {"position": [1, 2]}})",
  };
  for (const char* text : bad) {
    EXPECT_THROW(scenario_from_json(json::parse(text)), ConfigError) << text;
  }
}

TEST(Config, LoadReportsMissingAndMalformedFiles) {
  EXPECT_THROW(load_scenario("/nonexistent/perch.json"), ConfigError);
  const fs::path d = fresh_dir("cfg");
  std::ofstream(d / "bad.json") << "{ not json";
  EXPECT_THROW(load_scenario((d / "bad.json").string()), ConfigError);
}

TelemetryRecord sample_record() {
  TelemetryRecord r;
  r.step = 42;
  r.t = 0.42;
  r.mission_state = "Charging";
  r.mission_started = true;
  r.position = {1.5, -2.25, 9.35};
  r.soc = 0.8123456789012345;
  r.battery_voltage = 24.5;
  r.mmc_mode = "Mode2_Charging";
  r.gripper_status = "Closed";
  r.gripper_phase = "Closed";
  r.window_start_deg = 17.25;
  r.events = {{"mission", "LandingOnCable->Charging"}, {"attach", "cable 1"}};
  return r;
}

TEST(Telemetry, RecordRoundTripsExactly) {
  const TelemetryRecord r = sample_record();
  const std::string line = to_jsonl(r);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  const TelemetryRecord back = record_from_json(json::parse(line));
  EXPECT_EQ(to_jsonl(back), line);
  EXPECT_EQ(back.soc, r.soc);
  EXPECT_EQ(back.events, r.events);
}

TEST(Telemetry, MalformedLogLineNamesTheLine) {
  std::istringstream in(to_jsonl(sample_record()) + "\n{oops\n");
  try {
    read_log(in);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("log line 2"), std::string::npos);
  }
}

TEST(Telemetry, LogHeaderIsSkippedAndChecked) {
  std::istringstream ok(log_header() + "\n" + to_jsonl(sample_record()) + "\n");
  const auto rs = read_log(ok);
  ASSERT_EQ(rs.size(), 1u);
  EXPECT_EQ(rs[0].step, 42);
  std::istringstream bad(R"({"schema":"perch-log/0"})" "\n");
  EXPECT_THROW(read_log(bad), std::runtime_error);
}

std::vector<TelemetryRecord> synthetic_cycle() {
  std::vector<TelemetryRecord> out;
  auto rec = [&](double t, const std::string& state, bool attached, double v, double soc) {
    TelemetryRecord r;
    r.t = t;
    r.mission_state = state;
    r.attached = attached;
    r.battery_voltage = v;
    r.soc = soc;
    r.energy_in_wh = t > 20 ? 10.0 : 0.0;
    r.energy_out_wh = t / 10.0;
    out.push_back(r);
    return &out.back();
  };
  rec(0, "Inspecting", false, 23.5, 0.80);
  rec(10, "LandingOnCable", false, 22.8, 0.76)->events = {{"mission", "Inspecting->LandingOnCable"},
                                                          {"maneuver", "LandOnCable started"}};
  rec(12, "LandingOnCable", false, 22.7, 0.75)->events = {
      {"maneuver", "LandOnCable aborted: lateral error beyond safety margin"}};
  auto* c = rec(15, "Charging", true, 23.6, 0.75);
  c->events = {{"mission", "LandingOnCable->Charging"}};
  c->mmc_mode = "Mode2_Charging";
  c->charging_power = 40.0;
  c = rec(25, "Charging", true, 25.15, 0.96);
  c->mmc_mode = "Mode2_Charging";
  c->charging_power = 60.0;
  rec(30, "TakingOffFromCable", true, 25.0, 0.96)->events = {
      {"mission", "Charging->TakingOffFromCable"}};
  rec(40, "Inspecting", false, 24.0, 0.95)->events = {
      {"mission", "TakingOffFromCable->Inspecting"}};
  rec(41, "Inspecting", false, 24.0, 0.95)->events = {{"run", "completed"}};
  return out;
}

TEST(Telemetry, SummaryBuilderFoldsOneCycle) {
  SummaryBuilder b;
  for (const auto& r : synthetic_cycle()) b.add(r);
  const RunSummary s = b.summary();
  EXPECT_EQ(s.outcome, "completed");
  EXPECT_EQ(s.records, 8);
  EXPECT_EQ(s.cycles_completed, 1);
  EXPECT_EQ(s.landings, 1);
  EXPECT_EQ(s.aborts, 1);
  EXPECT_DOUBLE_EQ(s.mean_charging_power, 50.0);
  EXPECT_DOUBLE_EQ(s.min_soc_airborne, 0.75);
  ASSERT_EQ(s.cycles.size(), 1u);
  const CycleStats& c = s.cycles[0];
  EXPECT_DOUBLE_EQ(c.charge_s, 15.0);
  EXPECT_DOUBLE_EQ(c.flight_s, 25.0);
  EXPECT_DOUBLE_EQ(c.min_flight_voltage, 22.7);
  EXPECT_DOUBLE_EQ(c.max_charging_voltage, 25.15);
  EXPECT_DOUBLE_EQ(c.energy_in_wh, 10.0);
  EXPECT_DOUBLE_EQ(c.energy_out_wh, 4.0);
  EXPECT_EQ(c.aborts, 1);
}

TEST(Telemetry, ExtractsCarrySchemaHeaders) {
  const fs::path d = fresh_dir("extract");
  ExtractWriter w(d.string());
  SummaryBuilder b;
  for (const auto& r : synthetic_cycle()) {
    w.add(r);
    b.add(r);
  }
  w.finish(b.summary());
  for (const char* name : {"altitude", "power", "landings", "cycles"}) {
    const std::string text = slurp(d / (std::string(name) + ".csv"));
    EXPECT_EQ(text.rfind(std::string("# perch-csv/1 ") + name + "\n", 0), 0u) << name;
  }
  const json summary = json::parse(slurp(d / "summary.json"));
  EXPECT_EQ(summary.at("cycles_completed"), 1);
}

}  // namespace
}  // namespace perch
