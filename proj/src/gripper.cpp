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

#include "perch/gripper.hpp"

#include <algorithm>
#include <cmath>

namespace perch {

void validate(const GripperGeometry& g) {
  if (!(g.guide_tip_separation > 0.0) || !(g.engage_depth > 0.0) ||
      !(g.closure_stroke > 0.0) || !(g.guide_tip_height > 0.0) ||
      !(g.closure_force_required > 0.0)) {
    throw ConfigError("gripper lengths and closure force must be positive");
  }
  if (std::abs(g.max_misalignment - 0.5 * g.guide_tip_separation) > 1e-9) {
    throw ConfigError("max_misalignment must equal half the guide tip separation");
  }
  if (g.engage_depth + g.closure_stroke > g.guide_tip_height) {
    throw ConfigError("closure point lies below the drone reference");
  }
  if (!(g.max_roll_misalignment > 0.0)) {
    throw ConfigError("max_roll_misalignment must be positive");
  }
}

std::string_view to_string(GripperPhase p) {
  switch (p) {
    case GripperPhase::Open: return "Open";
    case GripperPhase::Engaged: return "Engaged";
    case GripperPhase::Closed: return "Closed";
  }
  return "?";
}

double funnel_halfwidth(const GripperGeometry& g, double depth) {
  if (depth <= 0.0) return g.max_misalignment;
  return g.max_misalignment * std::max(0.0, 1.0 - depth / g.funnel_depth());
}

GripperState update_mechanism(const GripperState& state, const GripperGeometry& g,
                              const MechanismInput& in) {
  GripperState s = state;
  const double depth = guide_depth(g, in.vertical_offset);

  if (s.phase == GripperPhase::Closed) return s;

  if (depth < 0.0) {
    s.in_guides = false;
    s.blocked = false;
    s.phase = GripperPhase::Open;
    s.engagement_progress = 0.0;
    return s;
  }

  if (!s.in_guides && !s.blocked) {
    const bool fits = std::abs(in.lateral_error) <= g.max_misalignment &&
                      std::abs(in.roll_misalignment) <= g.max_roll_misalignment;
    if (fits && in.vertical_velocity > 0.0) {
      s.in_guides = true;
    } else {
      s.blocked = true;
    }
  }
  if (!s.in_guides) return s;

  if (depth < g.engage_depth) {
    s.phase = GripperPhase::Open;
    s.engagement_progress = 0.0;
    return s;
  }

  s.phase = GripperPhase::Engaged;
  s.engagement_progress = std::clamp((depth - g.engage_depth) / g.closure_stroke, 0.0, 1.0);
  if (s.engagement_progress >= 1.0 && in.vertical_velocity > 0.0) {
    s.phase = GripperPhase::Closed;
    s.closure_force = g.closure_force_required;
  }
  return s;
}

GripperState release_if_unheld(const GripperState& state, double holding_force,
                               double release_force, bool pressing) {
  if (state.phase != GripperPhase::Closed || pressing || holding_force >= release_force) {
    return state;
  }
  GripperState s = state;
  s.phase = GripperPhase::Open;
  s.engagement_progress = 0.0;
  return s;
}

AttachResult attach(const DroneState& drone, const GripperState& gripper, double holding_force,
                    const CableSpec& cable, double s, const GripperGeometry& g, double t) {
  AttachResult r;
  r.drone = drone;
  if (gripper.phase != GripperPhase::Closed) {
    r.reason = "gripper not closed";
    return r;
  }
  const double weight = drone.mass * kGravity;
  if (holding_force < weight) {
    r.reason = "holding force below drone weight";
    return r;
  }
  r.ok = true;
  r.drone.attached = true;
  r.drone.position = cable_point_at(cable, s, t) - Vec3{0.0, 0.0, g.core_height()};
  r.drone.velocity = {};
  return r;
}

AttachResult detach(const DroneState& drone, const GripperState& gripper) {
  AttachResult r;
  r.drone = drone;
  if (gripper.phase != GripperPhase::Open) {
    r.reason = "gripper still closed";
    return r;
  }
  r.ok = true;
  r.drone.attached = false;
  return r;
}

}  // namespace perch
