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

#include "perch/autonomy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace perch {

std::string_view to_string(ManeuverKind k) {
  switch (k) {
    case ManeuverKind::None: return "None";
    case ManeuverKind::Hover: return "Hover";
    case ManeuverKind::FlyToCable: return "FlyToCable";
    case ManeuverKind::LandOnCable: return "LandOnCable";
    case ManeuverKind::TakeoffFromCable: return "TakeoffFromCable";
  }
  return "?";
}

std::string_view to_string(LandingPhase p) {
  switch (p) {
    case LandingPhase::Staging: return "Staging";
    case LandingPhase::Ascending: return "Ascending";
    case LandingPhase::Captured: return "Captured";
  }
  return "?";
}

std::string_view to_string(TakeoffPhase p) {
  switch (p) {
    case TakeoffPhase::Spooling: return "Spooling";
    case TakeoffPhase::Opening: return "Opening";
    case TakeoffPhase::Descending: return "Descending";
  }
  return "?";
}

std::string_view to_string(ManeuverEventKind k) {
  switch (k) {
    case ManeuverEventKind::Started: return "started";
    case ManeuverEventKind::Succeeded: return "succeeded";
    case ManeuverEventKind::Aborted: return "aborted";
    case ManeuverEventKind::Failed: return "failed";
  }
  return "?";
}

void validate(const LandingParams& p, const GripperGeometry& g) {
  if (!(p.safety_margin > 0.0) || !(p.safety_margin < g.max_misalignment)) {
    throw ConfigError("safety_margin must lie in (0, max_misalignment)");
  }
  if (!(p.ascent_speed > 0.0)) throw ConfigError("ascent_speed must be positive");
  if (!(p.staging_offset > g.guide_tip_height)) {
    throw ConfigError("staging_offset must keep the cable above the guide tips");
  }
  if (p.max_attempts < 0) throw ConfigError("max_attempts must be >= 0");
  if (!(p.staging_tolerance > 0.0) || !(p.staging_speed_tolerance > 0.0) ||
      !(p.yaw_tolerance > 0.0) || !(p.closure_timeout > 0.0) || !(p.capture_timeout > 0.0) ||
      !(p.acquire_timeout > 0.0)) {
    throw ConfigError("landing tolerances must be positive");
  }
}

void validate(const TakeoffParams& p) {
  if (!(p.spool_time >= 0.0) || !(p.offset_below > 0.0) || !(p.open_timeout > 0.0) ||
      !(p.arrive_tolerance > 0.0)) {
    throw ConfigError("takeoff parameters out of range");
  }
}

double aligned_yaw(const Vec3& direction, double current) {
  const double psi = std::atan2(-direction.x, direction.y);
  const double flipped = wrap_angle(psi + std::numbers::pi);
  return std::abs(wrap_angle(psi - current)) <= std::abs(wrap_angle(flipped - current)) ? psi
                                                                                       : flipped;
}

Vec3 track_world_position(const Track& track, const Vec3& drone_position,
                          const Vec3& direction) {
  const PlaneBasis b = plane_basis(direction);
  return drone_position + b.u * track.position.x() + b.v * track.position.y();
}

Autonomy::Autonomy(const Planner& planner, const LandingParams& landing,
                   const TakeoffParams& takeoff, const HoverParams& hover,
                   const GripperGeometry& gripper, double max_yaw_rate)
    : planner_(planner),
      landing_(landing),
      takeoff_(takeoff),
      hover_(hover),
      gripper_(gripper),
      max_yaw_rate_(max_yaw_rate) {}

void Autonomy::start_hover(const Vec3& at) {
  kind_ = ManeuverKind::Hover;
  hover_point_ = at;
  pending_start_ = true;
}

void Autonomy::start_fly_to_cable(double offset_below) {
  kind_ = ManeuverKind::FlyToCable;
  fly_offset_ = offset_below;
  pending_start_ = true;
}

void Autonomy::start_landing() {
  kind_ = ManeuverKind::LandOnCable;
  landing_phase_ = LandingPhase::Staging;
  target_id_ = -1;
  attempts_ = 0;
  ascent_start_ = -1.0;
  top_since_ = -1.0;
  captured_since_ = -1.0;
  acquire_since_ = -1.0;
  pending_start_ = true;
}

void Autonomy::start_takeoff(const Vec3& cable_point) {
  kind_ = ManeuverKind::TakeoffFromCable;
  takeoff_phase_ = TakeoffPhase::Spooling;
  takeoff_cable_ = cable_point;
  phase_started_ = false;
  pending_start_ = true;
}

void Autonomy::stop() { kind_ = ManeuverKind::None; }

std::string_view Autonomy::phase_name() const {
  switch (kind_) {
    case ManeuverKind::LandOnCable: return to_string(landing_phase_);
    case ManeuverKind::TakeoffFromCable: return to_string(takeoff_phase_);
    default: return "";
  }
}

AutonomyOutputs Autonomy::track_reference(const AutonomyInputs& in,
                                          const TrajectoryReference& ref,
                                          double yaw_target) const {
  AutonomyOutputs out;
  out.setpoint = planner_.plan_step(in.drone.position, in.drone.velocity, ref);
  out.setpoint.yaw = yaw_target;
  out.accel_cmd = out.setpoint.acceleration;
  out.yaw_rate_cmd = std::clamp(hover_.yaw_gain * wrap_angle(yaw_target - in.drone.yaw),
                                -max_yaw_rate_, max_yaw_rate_);
  return out;
}

AutonomyOutputs Autonomy::tick(const AutonomyInputs& in) {
  const bool announce = pending_start_;
  const ManeuverKind started = kind_;
  pending_start_ = false;
  AutonomyOutputs out;
  switch (kind_) {
    case ManeuverKind::None:
      out = track_reference(in, {in.drone.position, {}, in.drone.yaw}, in.drone.yaw);
      break;
    case ManeuverKind::Hover:
      out = track_reference(in, {hover_point_, {}, in.drone.yaw}, in.drone.yaw);
      break;
    case ManeuverKind::FlyToCable:
      out = tick_cable_hover(in);
      break;
    case ManeuverKind::LandOnCable:
      out = tick_landing(in);
      break;
    case ManeuverKind::TakeoffFromCable:
      out = tick_takeoff(in);
      break;
  }
  if (announce) {
    out.events.insert(out.events.begin(), {started, ManeuverEventKind::Started, ""});
  }
  return out;
}

AutonomyOutputs Autonomy::tick_cable_hover(const AutonomyInputs& in) {
  const auto target = select_target_cable(in.tracks);
  if (target) {
    last_cable_ = track_world_position(*target, in.drone.position, in.direction.direction);
    have_cable_ = true;
  }
  if (!have_cable_) {
    return track_reference(in, {in.drone.position, {}, in.drone.yaw}, in.drone.yaw);
  }
  const Vec3 goal = last_cable_ - Vec3{0.0, 0.0, fly_offset_};
  const double yaw = aligned_yaw(in.direction.direction, in.drone.yaw);
  return track_reference(in, {goal, {}, yaw}, yaw);
}

AutonomyOutputs Autonomy::tick_landing(const AutonomyInputs& in) {
  const double weight = in.drone.mass * kGravity;
  auto fail = [&](const std::string& reason, bool open_mmc) {
    AutonomyOutputs out =
        track_reference(in, {in.drone.position, {}, in.drone.yaw}, in.drone.yaw);
    out.events.push_back({ManeuverKind::LandOnCable, ManeuverEventKind::Failed, reason});
    if (open_mmc) out.mmc_command = MmcCommand::Open;
    kind_ = ManeuverKind::Hover;
    hover_point_ = in.drone.position;
    return out;
  };

  if (landing_phase_ != LandingPhase::Captured && in.gripper.phase == GripperPhase::Closed) {
    landing_phase_ = LandingPhase::Captured;
    captured_since_ = in.t;
    AutonomyOutputs out;
    out.accel_cmd = {};
    out.setpoint.position = in.drone.position;
    out.mmc_command = MmcCommand::Closed;
    out.pressing = true;
    return out;
  }

  if (landing_phase_ == LandingPhase::Captured) {
    AutonomyOutputs out;
    out.setpoint.position = in.drone.position;
    out.setpoint.yaw = in.drone.yaw;
    out.pressing = true;
    if (in.mmc.gripper_status == GripperStatus::Closed && in.mmc.holding_force >= weight) {
      out.request_disarm_attach = true;
      out.pressing = false;
      out.events.push_back({ManeuverKind::LandOnCable, ManeuverEventKind::Succeeded, ""});
      kind_ = ManeuverKind::None;
    } else if (in.t - captured_since_ > landing_.capture_timeout) {
      return fail("gripper status not confirmed", true);
    }
    return out;
  }

  const Track* target = nullptr;
  if (target_id_ < 0) {
    const auto sel = select_target_cable(in.tracks);
    if (!sel) {
      if (acquire_since_ < 0.0) acquire_since_ = in.t;
      if (in.t - acquire_since_ > landing_.acquire_timeout) return fail("no confirmed track", false);
      return track_reference(in, {in.drone.position, {}, in.drone.yaw}, in.drone.yaw);
    }
    target_id_ = sel->id;
  }
  for (const auto& t : in.tracks) {
    if (t.id == target_id_ && t.confirmed) target = &t;
  }
  if (!target) return fail("track lost", false);

  const Vec3 dir = in.direction.direction;
  const PlaneBasis basis = plane_basis(dir);
  const Vec3 cable = track_world_position(*target, in.drone.position, dir);
  const double lateral = target->position.x();
  const double yaw = aligned_yaw(dir, in.drone.yaw);
  const Vec3 column = cable - basis.u * landing_.lateral_offset;

  if (landing_phase_ == LandingPhase::Staging) {
    const Vec3 staging = column - Vec3{0.0, 0.0, landing_.staging_offset};
    AutonomyOutputs out = track_reference(in, {staging, {}, yaw}, yaw);
    out.lateral_error = lateral;
    const bool arrived = norm(in.drone.position - staging) < landing_.staging_tolerance &&
                         norm(in.drone.velocity) < landing_.staging_speed_tolerance &&
                         std::abs(wrap_angle(yaw - in.drone.yaw)) < landing_.yaw_tolerance;
    if (arrived) {
      if (landing_.max_attempts > 0 && attempts_ >= landing_.max_attempts) {
        return fail("landing attempts exhausted", false);
      }
      ++attempts_;
      landing_phase_ = LandingPhase::Ascending;
      ascent_start_ = in.t;
      ascent_z0_ = in.drone.position.z;
      top_since_ = -1.0;
    }
    return out;
  }

  // Ascending.
  if (!in.gripper.in_guides && std::abs(lateral - landing_.lateral_offset) > landing_.safety_margin) {
    ++aborts_;
    landing_phase_ = LandingPhase::Staging;
    ascent_start_ = -1.0;
    AutonomyOutputs out = track_reference(
        in, {column - Vec3{0.0, 0.0, landing_.staging_offset}, {}, yaw}, yaw);
    out.lateral_error = lateral;
    out.events.push_back({ManeuverKind::LandOnCable, ManeuverEventKind::Aborted,
                          "lateral error beyond safety margin"});
    return out;
  }
  const double z_top = cable.z - gripper_.core_height() + 0.05;
  double z_ref = ascent_z0_ + landing_.ascent_speed * (in.t - ascent_start_);
  double vz_ref = landing_.ascent_speed;
  if (z_ref >= z_top) {
    z_ref = z_top;
    vz_ref = 0.0;
    if (top_since_ < 0.0) top_since_ = in.t;
  }
  if (top_since_ >= 0.0 && in.t - top_since_ > landing_.closure_timeout) {
    ++aborts_;
    landing_phase_ = LandingPhase::Staging;
    ascent_start_ = -1.0;
    AutonomyOutputs out = track_reference(in, {in.drone.position, {}, yaw}, yaw);
    out.lateral_error = lateral;
    out.events.push_back(
        {ManeuverKind::LandOnCable, ManeuverEventKind::Aborted, "gripper did not close"});
    return out;
  }
  AutonomyOutputs out =
      track_reference(in, {Vec3{column.x, column.y, z_ref}, {0.0, 0.0, vz_ref}, yaw}, yaw);
  out.lateral_error = lateral;
  return out;
}

AutonomyOutputs Autonomy::tick_takeoff(const AutonomyInputs& in) {
  AutonomyOutputs out;
  out.setpoint.position = in.drone.position;
  out.setpoint.yaw = in.drone.yaw;
  if (!phase_started_) {
    phase_started_ = true;
    phase_since_ = in.t;
    if (takeoff_phase_ == TakeoffPhase::Spooling) {
      if (!in.can_lift_off) {
        out.events.push_back({ManeuverKind::TakeoffFromCable, ManeuverEventKind::Failed,
                              "battery below lift-off floor"});
        kind_ = ManeuverKind::None;
        return out;
      }
      out.request_arm = true;
    }
  }
  switch (takeoff_phase_) {
    case TakeoffPhase::Spooling:
      if (in.t - phase_since_ >= takeoff_.spool_time) {
        if (!in.can_lift_off || !in.drone.armed) {
          out.events.push_back({ManeuverKind::TakeoffFromCable, ManeuverEventKind::Failed,
                                "insufficient thrust"});
          out.request_disarm_attach = true;
          kind_ = ManeuverKind::None;
          return out;
        }
        takeoff_phase_ = TakeoffPhase::Opening;
        phase_since_ = in.t;
        out.mmc_command = MmcCommand::Open;
      }
      return out;
    case TakeoffPhase::Opening:
      if (in.gripper.phase == GripperPhase::Open) {
        out.request_detach = true;
        takeoff_phase_ = TakeoffPhase::Descending;
        phase_since_ = in.t;
      } else if (in.t - phase_since_ > takeoff_.open_timeout) {
        out.events.push_back({ManeuverKind::TakeoffFromCable, ManeuverEventKind::Failed,
                              "gripper did not open"});
        out.mmc_command = MmcCommand::Closed;
        out.request_disarm_attach = true;
        kind_ = ManeuverKind::None;
      }
      return out;
    case TakeoffPhase::Descending: {
      const Vec3 goal = takeoff_cable_ - Vec3{0.0, 0.0, takeoff_.offset_below};
      out = track_reference(in, {goal, {}, in.drone.yaw}, in.drone.yaw);
      if (norm(in.drone.position - goal) < takeoff_.arrive_tolerance &&
          norm(in.drone.velocity) < 0.1) {
        out.events.push_back({ManeuverKind::TakeoffFromCable, ManeuverEventKind::Succeeded, ""});
        kind_ = ManeuverKind::Hover;
        hover_point_ = goal;
      }
      return out;
    }
  }
  return out;
}

}  // namespace perch
