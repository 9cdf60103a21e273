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

#ifndef PERCH_DRONE_HPP_
#define PERCH_DRONE_HPP_

#include <cstdint>

#include "perch/vec3.hpp"

namespace perch {

struct DroneState {
  Vec3 position;
  Vec3 velocity;
  double yaw = 0.0;  // rad, body x-axis from world East, CCW
  bool armed = true;
  bool attached = false;
  double mass = 4.3;  // kg
};

struct DroneLimits {
  double accel_limit = 3.0;    // m/s^2, norm of commanded acceleration
  double max_yaw_rate = 1.0;   // rad/s
  double ground_z = 0.0;       // m
  // Upward specific thrust available with a depleted pack, as a fraction
  // of g. Below 1 the vehicle cannot hold altitude.
  double depleted_thrust_ratio = 0.97;
};

// Yaw-augmented double integrator. Throws std::logic_error when the drone
// is attached (the cable owns the pose).
DroneState step_drone(const DroneState& state, const Vec3& accel_cmd,
                      double yaw_rate_cmd, double dt, const DroneLimits& limits,
                      bool lift_capable);

// World-frame direction of the body y-axis.
inline Vec3 body_y_axis(double yaw) { return rotate_yaw(Vec3{0.0, 1.0, 0.0}, yaw); }

// Integer-step clock; t is always steps * flight_dt.
class SimClock {
 public:
  SimClock() = default;
  SimClock(double flight_dt, double circuit_dt, double realtime_factor = 0.0);

  double t() const { return static_cast<double>(steps_) * flight_dt_; }
  std::int64_t steps() const { return steps_; }
  double flight_dt() const { return flight_dt_; }
  double circuit_dt() const { return circuit_dt_; }
  int substeps() const { return substeps_; }
  double realtime_factor() const { return realtime_factor_; }

  void advance() { ++steps_; }

 private:
  std::int64_t steps_ = 0;
  double flight_dt_ = 0.01;
  double circuit_dt_ = 1e-4;
  int substeps_ = 100;
  double realtime_factor_ = 0.0;
};

}  // namespace perch

#endif  // PERCH_DRONE_HPP_
