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

#ifndef PERCH_GRIPPER_HPP_
#define PERCH_GRIPPER_HPP_

#include <string>
#include <string_view>

#include "perch/drone.hpp"
#include "perch/geometry.hpp"

namespace perch {

// Heights are measured up from the drone reference point.
struct GripperGeometry {
  double guide_tip_separation = 0.45;  // m
  double max_misalignment = 0.225;     // m
  double guide_tip_height = 0.45;      // m, mouth of the guides
  double engage_depth = 0.20;          // m below the mouth, ribbon contact
  double closure_stroke = 0.10;        // m of further ascent to close
  double closure_force_required = 2.0;  // N
  double max_roll_misalignment = 0.2617993877991494;  // rad (15 deg)

  // Depth at which the guide walls meet.
  double funnel_depth() const { return 2.0 * engage_depth; }
  // Cable height above the drone reference when closed.
  double core_height() const { return guide_tip_height - engage_depth - closure_stroke; }
};

void validate(const GripperGeometry& g);

enum class GripperPhase { Open, Engaged, Closed };

std::string_view to_string(GripperPhase p);

struct GripperState {
  GripperPhase phase = GripperPhase::Open;
  double engagement_progress = 0.0;  // [0, 1] along the closure stroke
  // Cable passed the mouth inside the envelope and is between the guides.
  bool in_guides = false;
  // Cable struck the outside of a guide; cleared once it is below the mouth.
  bool blocked = false;
  double closure_force = 0.0;  // N, recorded when the core snaps shut
};

struct MechanismInput {
  double lateral_error = 0.0;     // m, gripper centerline to cable
  double vertical_offset = 0.0;   // m, cable height above the drone reference
  double vertical_velocity = 0.0;  // m/s, drone relative to cable
  double roll_misalignment = 0.0;  // rad
  double dt = 0.01;
};

// Depth of the cable below the guide mouth (negative while above it).
inline double guide_depth(const GripperGeometry& g, double vertical_offset) {
  return g.guide_tip_height - vertical_offset;
}

// Lateral half-width of the guide funnel at a given depth.
double funnel_halfwidth(const GripperGeometry& g, double depth);

GripperState update_mechanism(const GripperState& state, const GripperGeometry& g,
                              const MechanismInput& in);

// The passive core falls open once magnetic force drops below `release_force`
// and nothing presses it shut.
GripperState release_if_unheld(const GripperState& state, double holding_force,
                               double release_force, bool pressing);

struct AttachResult {
  bool ok = false;
  std::string reason;
  DroneState drone;
};

// Slaves the drone to the cable at fraction s. The drone reference hangs
// core_height below the cable.
AttachResult attach(const DroneState& drone, const GripperState& gripper, double holding_force,
                    const CableSpec& cable, double s, const GripperGeometry& g, double t = 0.0);

AttachResult detach(const DroneState& drone, const GripperState& gripper);

}  // namespace perch

#endif  // PERCH_GRIPPER_HPP_
