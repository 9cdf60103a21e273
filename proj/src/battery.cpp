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

#include "perch/battery.hpp"

#include <algorithm>
#include <cmath>

#include "perch/geometry.hpp"

namespace perch {

double OcvCurve::operator()(double s) const {
  s = std::clamp(s, soc.front(), soc.back());
  for (std::size_t i = 1; i < soc.size(); ++i) {
    if (s <= soc[i]) {
      const double f = (s - soc[i - 1]) / (soc[i] - soc[i - 1]);
      return volts[i - 1] + f * (volts[i] - volts[i - 1]);
    }
  }
  return volts.back();
}

void validate(const BatteryParams& p) {
  if (!(p.capacity_ah > 0.0) || p.cells <= 0 || !(p.nominal_cell_voltage > 0.0)) {
    throw ConfigError("battery capacity, cells and cell voltage must be positive");
  }
  if (!(p.internal_resistance >= 0.0)) throw ConfigError("internal_resistance must be >= 0");
  for (std::size_t i = 1; i < p.ocv.soc.size(); ++i) {
    if (!(p.ocv.soc[i] > p.ocv.soc[i - 1]) || !(p.ocv.volts[i] > p.ocv.volts[i - 1])) {
      throw ConfigError("ocv curve must be strictly increasing");
    }
  }
}

void validate(const PowertrainParams& p) {
  validate(p.battery);
  if (!(p.liftoff_soc > 0.0 && p.liftoff_soc < 1.0)) {
    throw ConfigError("liftoff_soc must lie in (0, 1)");
  }
  if (!(p.reference_mass > 0.0) || !(p.endurance_min > 0.0)) {
    throw ConfigError("hover reference mass and endurance must be positive");
  }
}

BatteryState make_battery(const BatteryParams& params, double soc) {
  BatteryState s;
  s.soc = std::clamp(soc, 0.0, 1.0);
  s.terminal_voltage = params.ocv(s.soc);
  return s;
}

double hover_power(double mass, const PowertrainParams& params) {
  const double window_wh = (1.0 - params.liftoff_soc) * params.battery.usable_energy_wh();
  const double reference_w = window_wh / (params.endurance_min / 60.0);
  return reference_w * std::pow(std::max(mass, 0.0) / params.reference_mass, 1.5);
}

double terminal_voltage(const BatteryParams& params, double soc, double net_power) {
  const double ocv = params.ocv(soc);
  const double sign = net_power >= 0.0 ? 1.0 : -1.0;
  double v = ocv;
  // Fixed point of V = ocv +/- (|P| / V) R.
  for (int i = 0; i < 50; ++i) {
    const double next = ocv + sign * std::abs(net_power) / v * params.internal_resistance;
    if (std::abs(next - v) < 1e-9) {
      v = next;
      break;
    }
    v = next;
  }
  return v;
}

BatteryState step_battery(const BatteryState& state, const BatteryParams& params,
                          double net_power, double dt) {
  BatteryState next = state;
  double accepted = net_power;
  if (accepted > 0.0 && state.soc >= 1.0) accepted = 0.0;
  if (accepted < 0.0 && state.soc <= 0.0) accepted = 0.0;
  const double wh = accepted * dt / 3600.0;
  next.soc = std::clamp(state.soc + wh / params.usable_energy_wh(), 0.0, 1.0);
  next.energy_throughput_wh = state.energy_throughput_wh + std::abs(wh);
  next.terminal_voltage = terminal_voltage(params, next.soc, accepted);
  return next;
}

}  // namespace perch
