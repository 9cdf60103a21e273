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

#ifndef PERCH_CIRCUIT_HPP_
#define PERCH_CIRCUIT_HPP_

#include <span>

namespace perch {

// Reduced equivalent circuit of the split-core current transformer: the
// line current reflected through N turns is an ideal source i_s feeding
// the magnetizing branch (L_m in series with the winding resistance R_w),
// the SW1 short, and a full-bridge output clamped either at the DC bus or
// at the release clamp.
struct CircuitParams {
  double turns = 60.0;
  double magnetizing_inductance = 12.0;  // H
  double winding_resistance = 30.0;      // ohm, tau = L_m / R_w = 0.4 s
  double switch_resistance = 0.01;       // ohm, SW1 on-resistance
  double force_constant = 1.0e4;         // N/A^2
  double output_voltage = 25.2;          // V, regulated bus
  double release_clamp_voltage = 800.0;  // V, used while opening
  double dc_setpoint = 0.15;             // A, mode-1 magnetizing current

  double tau() const { return magnetizing_inductance / winding_resistance; }
};

void validate(const CircuitParams& params);

enum class OutputPath { Bus, ReleaseClamp };

struct SwitchDrive {
  bool sw1_closed = true;
  bool sw2_closed = false;  // battery DC drive (mode 1)
  OutputPath path = OutputPath::Bus;
  double battery_voltage = 25.2;  // limits the mode-1 drive
};

struct CircuitState {
  double ip_inst = 0.0;      // A, primary (line) current
  double im = 0.0;           // A, magnetizing current
  double i_load = 0.0;       // A, output branch current
  double sw1_current = 0.0;  // A
  bool sw1 = true;
  bool sw2 = false;
  double bus_power = 0.0;      // W, instantaneous power into the DC bus
  double battery_drain = 0.0;  // W, instantaneous mode-1 draw
  double node_voltage = 0.0;   // V, across the magnetizing branch
};

// sqrt(2) * rms * sin(2 pi f t).
double line_current(double t, double rms, double frequency);

// One explicit-Euler substep. `ip_inst` is the primary current at the start
// of the step (zero when the core is open). dt must not exceed 1e-4 s.
CircuitState step_circuit(const CircuitState& state, const CircuitParams& params,
                          const SwitchDrive& drive, double ip_inst, double dt);

// Per-substep sample kept for cycle statistics and debug traces.
struct CircuitSample {
  double t = 0.0;
  double ip = 0.0;
  double im = 0.0;
  double i_load = 0.0;
  double sw1_current = 0.0;
  bool sw1 = true;
  double bus_power = 0.0;
  double battery_drain = 0.0;
};

// Mean of the bus power over a full line cycle of samples.
double cycle_average_power(std::span<const CircuitSample> cycle);

// Line-cycle summary the controller and telemetry work from.
struct CycleSummary {
  double harvested_power = 0.0;       // W
  double battery_drain = 0.0;         // W
  double im_mean = 0.0;               // A, signed
  double im_mean_abs = 0.0;           // A
  double ip_rms = 0.0;                // A, primary
  double sw1_closed_current_rms = 0.0;  // AC component
  double closed_fraction = 0.0;
  double load_current_ac_rms = 0.0;
  int samples = 0;
};

class CycleAccumulator {
 public:
  void add(const CircuitState& s);
  CycleSummary finish();  // resets the accumulator
  int samples() const { return n_; }

 private:
  int n_ = 0;
  int n_closed_ = 0;
  double bus_ = 0.0;
  double drain_ = 0.0;
  double im_ = 0.0;
  double im_abs_ = 0.0;
  double ip_sq_ = 0.0;
  double sw1_ = 0.0;
  double sw1_sq_ = 0.0;
  double load_ = 0.0;
  double load_sq_ = 0.0;
};

// k_f * mean(|I_m|)^2 while the core is closed, 0 otherwise.
double holding_force(double im_mean_abs, const CircuitParams& params, bool gripper_closed);

}  // namespace perch

#endif  // PERCH_CIRCUIT_HPP_
