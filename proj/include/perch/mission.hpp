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

#ifndef PERCH_MISSION_HPP_
#define PERCH_MISSION_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "perch/autonomy.hpp"

namespace perch {

enum class MissionState { Inspecting, LandingOnCable, Charging, TakingOffFromCable };
enum class OperatorCommand { InitiateCharging, InterruptCharging, StartMission, StopMission };

std::string_view to_string(MissionState s);
std::string_view to_string(OperatorCommand c);
std::optional<OperatorCommand> parse_operator_command(std::string_view wire);
std::string_view wire_name(OperatorCommand c);

struct MissionConfig {
  double v_low = 22.9;   // V, start charging at or below
  double v_high = 25.1;  // V, stop charging at or above
  double inspect_hover_offset = 1.5;  // m under the cable
  bool auto_thresholds = true;
  int max_cycles = 0;  // 0 = run until stopped
  bool autostart = true;
};

void validate(const MissionConfig& c);

struct MissionMemory {
  MissionState state = MissionState::Inspecting;
  bool started = false;
  bool finished = false;
  int landing_attempts = 0;
  int cycles_completed = 0;
};

enum class MissionAction { BeginInspecting, BeginLanding, BeginTakeoff, HoldCharging, Finish };

std::string_view to_string(MissionAction a);

struct FsmInputs {
  double battery_voltage = 0.0;
  bool can_lift_off = true;
  std::vector<ManeuverEvent> events;
  std::optional<OperatorCommand> command;
};

struct CommandAck {
  bool accepted = false;
  std::string reason;
};

struct FsmResult {
  MissionMemory memory;
  std::vector<MissionAction> actions;
  std::optional<CommandAck> ack;
};

FsmResult step_fsm(const MissionMemory& memory, const MissionConfig& config,
                   const FsmInputs& in);

}  // namespace perch

#endif  // PERCH_MISSION_HPP_
