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

#ifndef PERCH_AUTONOMY_HPP_
#define PERCH_AUTONOMY_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "perch/drone.hpp"
#include "perch/gripper.hpp"
#include "perch/mmc.hpp"
#include "perch/perception.hpp"
#include "perch/planner.hpp"

namespace perch {

enum class ManeuverKind { None, Hover, FlyToCable, LandOnCable, TakeoffFromCable };
enum class LandingPhase { Staging, Ascending, Captured };
enum class TakeoffPhase { Spooling, Opening, Descending };
enum class ManeuverEventKind { Started, Succeeded, Aborted, Failed };

std::string_view to_string(ManeuverKind k);
std::string_view to_string(LandingPhase p);
std::string_view to_string(TakeoffPhase p);
std::string_view to_string(ManeuverEventKind k);

struct ManeuverEvent {
  ManeuverKind maneuver = ManeuverKind::None;
  ManeuverEventKind kind = ManeuverEventKind::Started;
  std::string reason;
};

struct LandingParams {
  double staging_offset = 1.5;  // m below the cable
  double ascent_speed = 0.5;    // m/s
  double safety_margin = 0.15;  // m
  int max_attempts = 0;         // 0 = unbounded
  double lateral_offset = 0.0;  // m, commanded gripper offset from the cable
  double staging_tolerance = 0.05;  // m
  double staging_speed_tolerance = 0.1;  // m/s
  double yaw_tolerance = 0.05;  // rad
  double closure_timeout = 1.0;  // s at the top of the ascent
  double capture_timeout = 5.0;  // s waiting for the MMC to report Closed
  double acquire_timeout = 5.0;  // s waiting for a confirmed track
};

struct TakeoffParams {
  double spool_time = 2.0;      // s
  double offset_below = 1.5;    // m
  double open_timeout = 5.0;    // s
  double arrive_tolerance = 0.05;  // m
};

struct HoverParams {
  double offset_below = 1.5;  // m under the target cable
  double yaw_gain = 2.0;      // 1/s
};

void validate(const LandingParams& p, const GripperGeometry& g);
void validate(const TakeoffParams& p);

// What the maneuvers see each flight step.
struct AutonomyInputs {
  double t = 0.0;
  DroneState drone;
  std::vector<Track> tracks;  // plane coordinates relative to the drone
  LineDirectionEstimate direction;
  GripperState gripper;
  MmcTelemetry mmc;
  bool can_lift_off = true;
};

struct AutonomyOutputs {
  Vec3 accel_cmd;
  double yaw_rate_cmd = 0.0;
  TrajectorySetpoint setpoint;
  std::optional<MmcCommand> mmc_command;
  bool request_arm = false;
  bool request_disarm_attach = false;
  bool request_detach = false;
  bool pressing = false;  // thrusting the gripper shut against the cable
  double lateral_error = 0.0;
  std::vector<ManeuverEvent> events;
};

// Yaw that puts the body y-axis along `direction`, choosing the sign
// closest to `current`.
double aligned_yaw(const Vec3& direction, double current);

// World position of a tracked cable point.
Vec3 track_world_position(const Track& track, const Vec3& drone_position,
                          const Vec3& direction);

class Autonomy {
 public:
  Autonomy() = default;
  Autonomy(const Planner& planner, const LandingParams& landing, const TakeoffParams& takeoff,
           const HoverParams& hover, const GripperGeometry& gripper, double max_yaw_rate);

  void start_hover(const Vec3& at);
  void start_fly_to_cable(double offset_below);
  void start_landing();
  void start_takeoff(const Vec3& cable_point);
  void stop();

  AutonomyOutputs tick(const AutonomyInputs& in);

  ManeuverKind active() const { return kind_; }
  std::string_view phase_name() const;
  LandingPhase landing_phase() const { return landing_phase_; }
  TakeoffPhase takeoff_phase() const { return takeoff_phase_; }
  int attempts() const { return attempts_; }
  int aborts() const { return aborts_; }
  // Time the current landing ascent began, or -1.
  double ascent_start() const { return ascent_start_; }

 private:
  AutonomyOutputs track_reference(const AutonomyInputs& in, const TrajectoryReference& ref,
                                  double yaw_target) const;
  AutonomyOutputs tick_landing(const AutonomyInputs& in);
  AutonomyOutputs tick_takeoff(const AutonomyInputs& in);
  AutonomyOutputs tick_cable_hover(const AutonomyInputs& in);

  Planner planner_;
  LandingParams landing_;
  TakeoffParams takeoff_;
  HoverParams hover_;
  GripperGeometry gripper_;
  double max_yaw_rate_ = 1.0;

  ManeuverKind kind_ = ManeuverKind::None;
  bool pending_start_ = false;
  Vec3 hover_point_;
  double fly_offset_ = 1.5;
  Vec3 last_cable_;
  bool have_cable_ = false;

  LandingPhase landing_phase_ = LandingPhase::Staging;
  int target_id_ = -1;
  int attempts_ = 0;
  int aborts_ = 0;
  double ascent_start_ = -1.0;
  double ascent_z0_ = 0.0;
  double top_since_ = -1.0;
  double captured_since_ = -1.0;
  double acquire_since_ = -1.0;

  TakeoffPhase takeoff_phase_ = TakeoffPhase::Spooling;
  double phase_since_ = 0.0;
  Vec3 takeoff_cable_;
  bool phase_started_ = false;
};

}  // namespace perch

#endif  // PERCH_AUTONOMY_HPP_
