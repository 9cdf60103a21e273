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

#include "perch/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "perch/geometry.hpp"

namespace perch {

void validate(const CircuitParams& p) {
  if (!(p.turns > 0.0) || !(p.magnetizing_inductance > 0.0) ||
      !(p.winding_resistance > 0.0) || !(p.switch_resistance >= 0.0) ||
      !(p.force_constant > 0.0) || !(p.output_voltage > 0.0) ||
      !(p.release_clamp_voltage > 0.0) || !(p.dc_setpoint >= 0.0)) {
    throw ConfigError("circuit parameters must be positive");
  }
}

double line_current(double t, double rms, double frequency) {
  return std::numbers::sqrt2 * rms * std::sin(2.0 * std::numbers::pi * frequency * t);
}

CircuitState step_circuit(const CircuitState& state, const CircuitParams& p,
                          const SwitchDrive& drive, double ip_inst, double dt) {
  CircuitState next = state;
  next.ip_inst = ip_inst;
  next.sw1 = drive.sw1_closed && !drive.sw2_closed;
  next.sw2 = drive.sw2_closed;
  next.bus_power = 0.0;
  next.battery_drain = 0.0;
  next.sw1_current = 0.0;

  const double i_s = ip_inst / p.turns;
  const double im = state.im;
  const double L = p.magnetizing_inductance;
  double v = 0.0;

  if (drive.sw2_closed) {
    // Ideal current regulator limited by the pack voltage.
    const double want = L * (p.dc_setpoint - im) / dt + p.winding_resistance * im;
    v = std::clamp(want, -drive.battery_voltage, drive.battery_voltage);
    next.i_load = i_s - im;
    next.battery_drain = v * im;
  } else if (drive.sw1_closed) {
    v = p.switch_resistance * (i_s - im);
    next.i_load = 0.0;
    next.sw1_current = i_s - im;
  } else {
    const double branch = i_s - im;
    if (drive.path == OutputPath::Bus) {
      // Rectifier-less: the regulated bus holds the node at +v_bus and
      // absorbs (or returns) the branch current.
      v = p.output_voltage;
      next.i_load = branch;
      next.bus_power = p.output_voltage * branch;
    } else {
      // Bidirectional release clamp; it blocks while I_m can follow i_s
      // below the clamp level.
      const double clamp = p.release_clamp_voltage;
      const double follow = L * branch / dt + p.winding_resistance * im;
      if (std::abs(follow) < clamp) {
        v = follow;
        next.i_load = 0.0;
      } else {
        v = branch > 0.0 ? clamp : -clamp;
        next.i_load = branch;
      }
    }
  }
  next.node_voltage = v;
  next.im = im + dt * (v - p.winding_resistance * im) / L;
  return next;
}

double cycle_average_power(std::span<const CircuitSample> cycle) {
  if (cycle.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : cycle) sum += s.bus_power;
  return sum / static_cast<double>(cycle.size());
}

void CycleAccumulator::add(const CircuitState& s) {
  ++n_;
  bus_ += s.bus_power;
  drain_ += s.battery_drain;
  im_ += s.im;
  im_abs_ += std::abs(s.im);
  ip_sq_ += s.ip_inst * s.ip_inst;
  load_ += s.i_load;
  load_sq_ += s.i_load * s.i_load;
  if (s.sw1) {
    ++n_closed_;
    sw1_ += s.sw1_current;
    sw1_sq_ += s.sw1_current * s.sw1_current;
  }
}

CycleSummary CycleAccumulator::finish() {
  CycleSummary out;
  if (n_ > 0) {
    const double n = static_cast<double>(n_);
    out.samples = n_;
    out.harvested_power = bus_ / n;
    out.battery_drain = drain_ / n;
    out.im_mean = im_ / n;
    out.im_mean_abs = im_abs_ / n;
    out.ip_rms = std::sqrt(ip_sq_ / n);
    const double load_mean = load_ / n;
    out.load_current_ac_rms = std::sqrt(std::max(0.0, load_sq_ / n - load_mean * load_mean));
    out.closed_fraction = n_closed_ / n;
    if (n_closed_ > 0) {
      // AC part only: a trapped DC I_m flows through the short even with
      // no line current.
      const double m = sw1_ / n_closed_;
      out.sw1_closed_current_rms = std::sqrt(std::max(0.0, sw1_sq_ / n_closed_ - m * m));
    }
  }
  *this = CycleAccumulator{};
  return out;
}

double holding_force(double im_mean_abs, const CircuitParams& params, bool gripper_closed) {
  if (!gripper_closed) return 0.0;
  return params.force_constant * im_mean_abs * im_mean_abs;
}

}  // namespace perch
