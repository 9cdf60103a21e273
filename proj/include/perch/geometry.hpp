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

#ifndef PERCH_GEOMETRY_HPP_
#define PERCH_GEOMETRY_HPP_

#include <stdexcept>
#include <string>
#include <vector>

#include "perch/vec3.hpp"

namespace perch {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Lateral sinusoidal swing of a cable's cross-section position. Zero
// amplitude disables it.
struct CableOscillation {
  double amplitude = 0.0;  // m, at midspan
  double frequency = 0.0;  // Hz
};

struct CableSpec {
  Vec3 endpoint_a;
  Vec3 endpoint_b;
  double sag = 0.0;  // midpoint vertical drop, m
  int phase_id = 0;
  CableOscillation oscillation;
};

// Piecewise-constant RMS line current: segment i holds from start_time[i]
// until the next start.
struct CurrentSegment {
  double start_time = 0.0;  // s
  double rms = 0.0;         // A
};

struct PowerlineSpec {
  std::vector<CableSpec> cables;
  double line_frequency = 50.0;  // Hz
  std::vector<CurrentSegment> current_profile{{0.0, 288.0}};

  double current_rms(double t) const;
};

void validate(const CableSpec& cable);
void validate(const PowerlineSpec& line);

// Point on the parabolic-sag cable at fraction s in [0, 1].
Vec3 cable_point(const CableSpec& spec, double s);

// Unit tangent of the cable at fraction s.
Vec3 cable_tangent(const CableSpec& spec, double s);

// cable_point plus the configured oscillation at time t.
Vec3 cable_point_at(const CableSpec& spec, double s, double t);

struct NearestPoint {
  double s = 0.0;
  Vec3 point;
  double distance = 0.0;
};

NearestPoint nearest_point_on_cable(const CableSpec& spec, const Vec3& p);

// Three parallel cables along world +y: 10 m high, 1.5 m spacing,
// 100 m span, 0.5 m sag.
PowerlineSpec default_powerline();

}  // namespace perch

#endif  // PERCH_GEOMETRY_HPP_
