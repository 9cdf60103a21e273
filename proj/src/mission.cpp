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

#include "perch/mission.hpp"

namespace perch {

std::string_view to_string(MissionState s) {
  switch (s) {
    case MissionState::Inspecting: return "Inspecting";
    case MissionState::LandingOnCable: return "LandingOnCable";
    case MissionState::Charging: return "Charging";
    case MissionState::TakingOffFromCable: return "TakingOffFromCable";
  }
  return "?";
}

std::string_view to_string(OperatorCommand c) {
  switch (c) {
    case OperatorCommand::InitiateCharging: return "InitiateCharging";
    case OperatorCommand::InterruptCharging: return "InterruptCharging";
    case OperatorCommand::StartMission: return "StartMission";
    case OperatorCommand::StopMission: return "StopMission";
  }
  return "?";
}

std::string_view wire_name(OperatorCommand c) {
  switch (c) {
    case OperatorCommand::InitiateCharging: return "initiate_charging";
    case OperatorCommand::InterruptCharging: return "interrupt_charging";
    case OperatorCommand::StartMission: return "start";
    case OperatorCommand::StopMission: return "stop";
  }
  return "?";
}

std::optional<OperatorCommand> parse_operator_command(std::string_view wire) {
  for (auto c : {OperatorCommand::InitiateCharging, OperatorCommand::InterruptCharging,
                 OperatorCommand::StartMission, OperatorCommand::StopMission}) {
    if (wire == wire_name(c)) return c;
  }
  return std::nullopt;
}

std::string_view to_string(MissionAction a) {
  switch (a) {
    case MissionAction::BeginInspecting: return "BeginInspecting";
    case MissionAction::BeginLanding: return "BeginLanding";
    case MissionAction::BeginTakeoff: return "BeginTakeoff";
    case MissionAction::HoldCharging: return "HoldCharging";
    case MissionAction::Finish: return "Finish";
  }
  return "?";
}

void validate(const MissionConfig& c) {
  if (!(c.v_low < c.v_high)) throw ConfigError("mission v_low must be below v_high");
  if (!(c.inspect_hover_offset > 0.0)) throw ConfigError("inspect_hover_offset must be positive");
  if (c.max_cycles < 0) throw ConfigError("max_cycles must be >= 0");
}

namespace {

bool has_event(const FsmInputs& in, ManeuverKind m, ManeuverEventKind k) {
  for (const auto& e : in.events) {
    if (e.maneuver == m && e.kind == k) return true;
  }
  return false;
}

}  // namespace

FsmResult step_fsm(const MissionMemory& memory, const MissionConfig& cfg, const FsmInputs& in) {
  FsmResult r;
  r.memory = memory;
  MissionMemory& m = r.memory;
  auto accept = [&] { r.ack = CommandAck{true, ""}; };
  auto reject = [&](std::string why) { r.ack = CommandAck{false, std::move(why)}; };

  if (in.command == OperatorCommand::StartMission) {
    if (m.started) {
      reject("mission already started");
    } else if (m.finished) {
      reject("mission finished");
    } else {
      accept();
      m.started = true;
      m.state = MissionState::Inspecting;
      r.actions.push_back(MissionAction::BeginInspecting);
    }
    return r;
  }
  if (in.command == OperatorCommand::StopMission) {
    if (!m.started) {
      reject("mission not started");
    } else {
      accept();
      m.started = false;
      m.finished = true;
      r.actions.push_back(MissionAction::Finish);
    }
    return r;
  }
  if (!m.started) {
    if (in.command) reject("mission not started");
    return r;
  }

  const bool initiate = in.command == OperatorCommand::InitiateCharging;
  const bool interrupt = in.command == OperatorCommand::InterruptCharging;

  switch (m.state) {
    case MissionState::Inspecting:
      if (interrupt) reject("not charging");
      if (initiate || (cfg.auto_thresholds && in.battery_voltage <= cfg.v_low)) {
        if (initiate) accept();
        m.state = MissionState::LandingOnCable;
        m.landing_attempts = 0;
        r.actions.push_back(MissionAction::BeginLanding);
      }
      break;

    case MissionState::LandingOnCable:
      if (in.command) reject("landing in progress");
      if (has_event(in, ManeuverKind::LandOnCable, ManeuverEventKind::Aborted)) {
        ++m.landing_attempts;
      }
      if (has_event(in, ManeuverKind::LandOnCable, ManeuverEventKind::Succeeded)) {
        m.state = MissionState::Charging;
        r.actions.push_back(MissionAction::HoldCharging);
      } else if (has_event(in, ManeuverKind::LandOnCable, ManeuverEventKind::Failed)) {
        m.state = MissionState::Inspecting;
        r.actions.push_back(MissionAction::BeginInspecting);
      }
      break;

    case MissionState::Charging: {
      if (initiate) reject("already charging");
      const bool want = interrupt || (cfg.auto_thresholds && in.battery_voltage >= cfg.v_high);
      if (want && !in.can_lift_off) {
        if (interrupt) reject("battery below lift-off floor");
      } else if (want) {
        if (interrupt) accept();
        m.state = MissionState::TakingOffFromCable;
        r.actions.push_back(MissionAction::BeginTakeoff);
      }
      break;
    }

    case MissionState::TakingOffFromCable:
      if (in.command) reject("takeoff in progress");
      if (has_event(in, ManeuverKind::TakeoffFromCable, ManeuverEventKind::Succeeded)) {
        m.state = MissionState::Inspecting;
        ++m.cycles_completed;
        if (cfg.max_cycles > 0 && m.cycles_completed >= cfg.max_cycles) {
          m.started = false;
          m.finished = true;
          r.actions.push_back(MissionAction::Finish);
        } else {
          r.actions.push_back(MissionAction::BeginInspecting);
        }
      } else if (has_event(in, ManeuverKind::TakeoffFromCable, ManeuverEventKind::Failed)) {
        m.state = MissionState::Charging;
        r.actions.push_back(MissionAction::HoldCharging);
      }
      break;
  }
  return r;
}

}  // namespace perch
