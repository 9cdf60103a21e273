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

#include "perch/drone.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "perch/geometry.hpp"

namespace perch {

DroneState step_drone(const DroneState& state, const Vec3& accel_cmd,
                      double yaw_rate_cmd, double dt, const DroneLimits& limits,
                      bool lift_capable) {
  if (state.attached) {
    throw std::logic_error("step_drone: drone is attached to the cable");
  }
  DroneState next = state;

  Vec3 accel{0.0, 0.0, -kGravity};
  if (state.armed) {
    Vec3 cmd = accel_cmd;
    const double n = norm(cmd);
    if (n > limits.accel_limit) cmd *= limits.accel_limit / n;
    Vec3 thrust = cmd + Vec3{0.0, 0.0, kGravity};
    if (!lift_capable) {
      thrust.z = std::min(thrust.z, limits.depleted_thrust_ratio * kGravity);
    }
    thrust.z = std::max(thrust.z, 0.0);
    accel = thrust - Vec3{0.0, 0.0, kGravity};
  }

  next.velocity = state.velocity + accel * dt;
  next.position = state.position + next.velocity * dt;
  if (next.position.z <= limits.ground_z) {
    next.position.z = limits.ground_z;
    next.velocity.z = std::max(0.0, next.velocity.z);
    if (next.velocity.z == 0.0) {
      // Ground contact stops horizontal drift as well.
      next.velocity.x = 0.0;
      next.velocity.y = 0.0;
      next.position.x = state.position.x;
      next.position.y = state.position.y;
    }
  }
  const double rate = std::clamp(yaw_rate_cmd, -limits.max_yaw_rate, limits.max_yaw_rate);
  next.yaw = wrap_angle(state.yaw + rate * dt);
  return next;
}

SimClock::SimClock(double flight_dt, double circuit_dt, double realtime_factor)
    : flight_dt_(flight_dt), circuit_dt_(circuit_dt), realtime_factor_(realtime_factor) {
  if (!(flight_dt > 0.0) || !(circuit_dt > 0.0)) {
    throw ConfigError("clock steps must be positive");
  }
  if (circuit_dt > flight_dt) throw ConfigError("circuit_dt must not exceed flight_dt");
  const double ratio = flight_dt / circuit_dt;
  substeps_ = static_cast<int>(std::lround(ratio));
  if (std::abs(ratio - substeps_) > 1e-9 * ratio) {
    throw ConfigError("circuit_dt must divide flight_dt exactly");
  }
  if (realtime_factor < 0.0) throw ConfigError("realtime_factor must be >= 0");
}

}  // namespace perch
