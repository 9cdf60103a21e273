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

#ifndef PERCH_CONFIG_HPP_
#define PERCH_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "perch/autonomy.hpp"
#include "perch/battery.hpp"
#include "perch/circuit.hpp"
#include "perch/drone.hpp"
#include "perch/geometry.hpp"
#include "perch/gripper.hpp"
#include "perch/mission.hpp"
#include "perch/mmc.hpp"
#include "perch/perception.hpp"
#include "perch/planner.hpp"

namespace perch {

struct ClockConfig {
  double flight_dt = 0.01;
  double circuit_dt = 1e-4;
  double realtime_factor = 0.0;  // default speedup, 0 = as fast as possible
  double duration = 14400.0;     // s, hard stop
};

struct DroneConfig {
  DroneState initial{{0.3, 50.0, 7.5}, {}, 0.0, true, false, 4.3};
  DroneLimits limits;
  double initial_soc = 0.96;
  double odometry_noise = 0.0;  // m per step
};

enum class OperatorMode { None, SocSwing, Timed };

struct TimedCommand {
  double t = 0.0;
  OperatorCommand command = OperatorCommand::InitiateCharging;
};

struct OperatorScript {
  OperatorMode mode = OperatorMode::None;
  double initiate_below = 0.76;   // SoC
  double interrupt_above = 0.96;  // SoC
  std::vector<TimedCommand> commands;
};

// Lateral kick of the drone during a chosen landing ascent.
struct DisturbanceConfig {
  bool enabled = false;
  int landing_index = 2;   // 1-based count of landing maneuvers
  double delay = 0.5;      // s after the ascent starts
  double magnitude = 0.2;  // m, along the cross-section horizontal
};

struct TelemetryConfig {
  int log_every = 1;          // flight steps between logged records
  double stream_hz = 10.0;    // sim-time rate of the live stream
  int circuit_trace_cycles = 0;  // line cycles dumped after each capture
};

struct SweepConfig {
  std::vector<double> ip_values{100, 200, 300, 400, 500, 600, 700, 800, 900, 1000};
  int cycles = 30000;           // line cycles of P&O per point
  int average_cycles = 500;     // trailing cycles averaged
  double battery_voltage = 23.0;  // V, keeps the controller in charging mode
};

struct Scenario {
  std::uint64_t seed = 1;
  ClockConfig clock;
  PowerlineSpec powerline = default_powerline();
  DroneConfig drone;
  PowertrainParams powertrain;
  CircuitParams circuit;
  MmcConfig mmc;
  GripperGeometry gripper;
  SensorParams sensor;
  TrackerParams tracker;
  MpcParams mpc;
  LandingParams landing;
  TakeoffParams takeoff;
  HoverParams hover;
  MissionConfig mission;
  OperatorScript operator_script;
  DisturbanceConfig disturbance;
  TelemetryConfig telemetry;
  SweepConfig sweep;
};

void validate(const Scenario& s);

// Missing keys keep their defaults; unknown keys are rejected.
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Scenario& s);
Scenario load_scenario(const std::string& path);

}  // namespace perch

#endif  // PERCH_CONFIG_HPP_
