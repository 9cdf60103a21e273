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

#include "perch/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace perch {

double PowerlineSpec::current_rms(double t) const {
  double rms = 0.0;
  for (const auto& seg : current_profile) {
    if (seg.start_time <= t) rms = seg.rms;
  }
  return rms;
}

void validate(const CableSpec& cable) {
  if (!is_finite(cable.endpoint_a) || !is_finite(cable.endpoint_b)) {
    throw ConfigError("cable endpoints must be finite");
  }
  if (cable.endpoint_a == cable.endpoint_b) {
    throw ConfigError("cable endpoints must be distinct");
  }
  const double dx = cable.endpoint_b.x - cable.endpoint_a.x;
  const double dy = cable.endpoint_b.y - cable.endpoint_a.y;
  if (std::hypot(dx, dy) <= 0.0) {
    throw ConfigError("cable horizontal span must be positive");
  }
  if (!(cable.sag >= 0.0)) throw ConfigError("cable sag must be >= 0");
  if (cable.oscillation.amplitude < 0.0 || cable.oscillation.frequency < 0.0) {
    throw ConfigError("cable oscillation must be non-negative");
  }
}

void validate(const PowerlineSpec& line) {
  if (line.cables.empty()) throw ConfigError("powerline needs at least one cable");
  for (const auto& c : line.cables) validate(c);
  if (!(line.line_frequency > 0.0)) throw ConfigError("line_frequency must be > 0");
  if (line.current_profile.empty()) throw ConfigError("current profile is empty");
  double last = -1e300;
  for (const auto& seg : line.current_profile) {
    if (!(seg.rms >= 0.0)) throw ConfigError("current_rms must be >= 0");
    if (seg.start_time < last) throw ConfigError("current profile must be time-ordered");
    last = seg.start_time;
  }
}

Vec3 cable_point(const CableSpec& spec, double s) {
  const Vec3 straight = spec.endpoint_a + (spec.endpoint_b - spec.endpoint_a) * s;
  const double u = 2.0 * s - 1.0;
  return straight - Vec3{0.0, 0.0, spec.sag * (1.0 - u * u)};
}

Vec3 cable_tangent(const CableSpec& spec, double s) {
  const Vec3 chord = spec.endpoint_b - spec.endpoint_a;
  // d/ds of -sag*(1-(2s-1)^2) = 4*sag*(2s-1)
  const Vec3 d = chord + Vec3{0.0, 0.0, 4.0 * spec.sag * (2.0 * s - 1.0)};
  return normalized(d);
}

Vec3 cable_point_at(const CableSpec& spec, double s, double t) {
  Vec3 p = cable_point(spec, s);
  const auto& osc = spec.oscillation;
  if (osc.amplitude > 0.0) {
    const Vec3 chord = spec.endpoint_b - spec.endpoint_a;
    const Vec3 lateral = normalized(Vec3{-chord.y, chord.x, 0.0});
    const double swing = osc.amplitude * std::sin(std::numbers::pi * s) *
                         std::sin(2.0 * std::numbers::pi * osc.frequency * t);
    p += lateral * swing;
  }
  return p;
}

NearestPoint nearest_point_on_cable(const CableSpec& spec, const Vec3& p) {
  auto dist2 = [&](double s) {
    const Vec3 d = cable_point(spec, s) - p;
    return dot(d, d);
  };
  // Coarse scan brackets the global minimum; golden section refines it.
  constexpr int kCoarse = 64;
  int best = 0;
  double best_d2 = dist2(0.0);
  for (int i = 1; i <= kCoarse; ++i) {
    const double d2 = dist2(static_cast<double>(i) / kCoarse);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  double lo = std::max(0, best - 1) / static_cast<double>(kCoarse);
  double hi = std::min(kCoarse, best + 1) / static_cast<double>(kCoarse);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - inv_phi * (hi - lo);
  double b = lo + inv_phi * (hi - lo);
  double fa = dist2(a);
  double fb = dist2(b);
  while (hi - lo > 1e-10) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - inv_phi * (hi - lo);
      fa = dist2(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + inv_phi * (hi - lo);
      fb = dist2(b);
    }
  }
  double s = 0.5 * (lo + hi);
  // Endpoints are never interior minima of the bracket search; check them.
  for (double edge : {0.0, 1.0}) {
    if (dist2(edge) < dist2(s)) s = edge;
  }
  const Vec3 q = cable_point(spec, s);
  return {s, q, norm(q - p)};
}

PowerlineSpec default_powerline() {
  PowerlineSpec line;
  for (int i = 0; i < 3; ++i) {
    const double x = 1.5 * (i - 1);
    CableSpec c;
    c.endpoint_a = {x, 0.0, 10.0};
    c.endpoint_b = {x, 100.0, 10.0};
    c.sag = 0.5;
    c.phase_id = i;
    line.cables.push_back(c);
  }
  return line;
}

}  // namespace perch
