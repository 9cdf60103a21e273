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

#ifndef PERCH_SIMULATOR_HPP_
#define PERCH_SIMULATOR_HPP_

#include <optional>
#include <string>
#include <vector>

#include "perch/config.hpp"
#include "perch/telemetry.hpp"

namespace perch {

// Single-threaded stepping kernel. One call to step() advances one flight
// step and runs the circuit substeps inside it when the gripper or the MMC
// is active.
class Simulator {
 public:
  explicit Simulator(const Scenario& scenario);

  // `external` is an operator command from outside the kernel; it is
  // consumed in this step and its acknowledgement returned.
  std::optional<CommandAck> step(std::optional<OperatorCommand> external = std::nullopt);

  bool done() const { return done_; }
  // "running", "completed", "incomplete" or "failed: <reason>".
  const std::string& outcome() const { return outcome_; }
  bool mission_failed() const;

  // Record of the last step (or the initial snapshot before any step).
  const TelemetryRecord& latest() const { return latest_; }
  // Whether the latest record belongs in the decimated log.
  bool latest_logged() const { return logged_; }

  const Scenario& scenario() const { return sc_; }
  const SimClock& clock() const { return clock_; }
  const DroneState& drone() const { return drone_; }
  const BatteryState& battery() const { return battery_; }
  const GripperState& gripper() const { return gripper_; }
  const MmcController& mmc() const { return mmc_; }
  const Autonomy& autonomy() const { return autonomy_; }
  const MissionMemory& mission() const { return memory_; }
  const Perception& perception() const { return perception_; }
  const std::vector<CircuitSample>& circuit_trace() const { return trace_; }

 private:
  std::optional<OperatorCommand> scripted_command(const char*& source);
  void apply_actions(const std::vector<MissionAction>& actions);
  void run_fsm(std::optional<OperatorCommand> cmd, const char* source,
               std::optional<CommandAck>* ack);
  void update_gripper(double t);
  void run_circuit(double t);
  void release_from_cable();
  void event(std::string type, std::string detail);
  TelemetryRecord make_record() const;

  Scenario sc_;
  SimClock clock_;
  Rng rng_;
  DroneState drone_;
  BatteryState battery_;
  GripperState gripper_;
  MmcController mmc_;
  Perception perception_;
  Autonomy autonomy_;
  MissionMemory memory_;

  std::vector<ManeuverEvent> maneuver_events_;
  std::vector<TelemetryEvent> events_;
  AutonomyOutputs last_out_;
  Vec3 odom_anchor_;
  double odom_yaw_ = 0.0;

  int cable_index_ = 0;
  double cable_s_ = 0.5;
  double attach_s_ = 0.5;
  int attach_cable_ = 0;

  bool autostart_sent_ = false;
  std::size_t next_timed_ = 0;
  int landings_started_ = 0;
  bool disturbance_fired_ = false;

  double energy_in_wh_ = 0.0;
  double energy_out_wh_ = 0.0;
  double net_power_ = 0.0;
  double dc_link_j_ = 0.0;

  std::vector<CircuitSample> trace_;
  long trace_remaining_ = 0;

  bool done_ = false;
  std::string outcome_ = "running";
  TelemetryRecord latest_;
  bool logged_ = true;
};

}  // namespace perch

#endif  // PERCH_SIMULATOR_HPP_
