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

#ifndef PERCH_BATTERY_HPP_
#define PERCH_BATTERY_HPP_

#include <array>

namespace perch {

// Piecewise-linear open-circuit voltage table, strictly increasing in SoC.
struct OcvCurve {
  std::array<double, 5> soc{0.0, 0.2, 0.45, 0.8, 1.0};
  std::array<double, 5> volts{21.0, 22.2, 22.9, 24.4, 25.2};

  double operator()(double soc) const;
};

struct BatteryParams {
  double capacity_ah = 7.0;
  int cells = 6;
  double nominal_cell_voltage = 3.7;
  double internal_resistance = 0.05;  // ohm, whole pack
  OcvCurve ocv;

  // 7 Ah x 22.2 V = 155.4 Wh.
  double usable_energy_wh() const { return capacity_ah * cells * nominal_cell_voltage; }
};

struct PowertrainParams {
  BatteryParams battery;
  double liftoff_soc = 0.45;
  // Hover draw is sized so the pack's usable window above the lift-off
  // floor lasts `endurance_min` at `reference_mass`.
  double reference_mass = 4.3;  // kg
  double endurance_min = 7.5;   // min
};

struct BatteryState {
  double soc = 1.0;
  double terminal_voltage = 25.2;
  double energy_throughput_wh = 0.0;
};

void validate(const BatteryParams& params);
void validate(const PowertrainParams& params);

BatteryState make_battery(const BatteryParams& params, double soc);

// Hover draw in watts; scales as mass^1.5 (momentum theory).
double hover_power(double mass, const PowertrainParams& params);

// net_power > 0 charges, < 0 discharges. A full pack accepts no charge.
BatteryState step_battery(const BatteryState& state, const BatteryParams& params,
                          double net_power, double dt);

// Loaded terminal voltage for a given SoC and signed pack power.
double terminal_voltage(const BatteryParams& params, double soc, double net_power);

inline bool can_lift_off(const BatteryState& state, const PowertrainParams& params) {
  return state.soc >= params.liftoff_soc;
}

}  // namespace perch

#endif  // PERCH_BATTERY_HPP_
