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

#ifndef PERCH_MMC_HPP_
#define PERCH_MMC_HPP_

#include <optional>
#include <string_view>

#include "perch/circuit.hpp"

namespace perch {

enum class MmcMode { Mode1_DC, Mode2_Charging, Mode3_ACHold, Opening, Idle };
enum class MmcCommand { Open, Closed };
enum class GripperStatus { Open, Closed };

std::string_view to_string(MmcMode m);
std::string_view to_string(MmcCommand c);
std::string_view to_string(GripperStatus s);

struct MmcThresholds {
  double ip_hold_min = 40.0;  // A RMS
  double v_full = 25.2;       // V, enter AC hold at or above
  double v_resume = 25.0;     // V, leave AC hold below
};

// Phase interval (radians) of the positive half-cycle during which SW1 is
// open.
struct TransferWindow {
  double start_phase = 0.0;
  double width = 0.0;
  double step_size = 0.0;
};

// `current` supplies the hysteresis between charging and AC hold.
MmcMode select_mode(MmcCommand cmd, double ip_rms, double battery_voltage,
                    const MmcThresholds& thresholds, MmcMode current = MmcMode::Idle);

// True when SW1 is closed at `phase` (radians, any range).
bool mode3_switch_schedule(const TransferWindow& window, double phase);

// One substep spanning phases [phase, phase + dphase) under a window
// schedule. A window edge falling inside the substep splits it, so the
// result is continuous in start_phase and width. Output quantities are
// time-weighted over the pieces; sw1 reports open if any piece was open.
CircuitState step_windowed(const CircuitState& state, const CircuitParams& params,
                           const TransferWindow& window, double phase, double dphase,
                           double ip_inst, double dt, double battery_voltage);

// Clips start/width into the positive half-cycle. width >= 0.
TransferWindow clip_window(TransferWindow w);

// One line cycle of mode-2 operation with a fixed window, starting at
// phase 0 with magnetizing current `im0`.
struct WindowCycle {
  double im_end = 0.0;
  CycleSummary summary;
};

WindowCycle run_window_cycle(const CircuitParams& params, const TransferWindow& window,
                             double ip_rms, double frequency, double dt, double im0);

// Periodic steady state of the fixed-window cycle (Illinois regula falsi
// on the cycle map of I_m).
WindowCycle steady_state_cycle(const CircuitParams& params, const TransferWindow& window,
                               double ip_rms, double frequency, double dt);

// Perturb-and-observe over (start_phase, width), one parameter per
// observation, alternating.
struct PnoTracker {
  TransferWindow window;
  int start_direction = +1;
  int width_direction = +1;
  bool last_was_width = true;  // so the first perturbation moves start
  bool started = false;
};

PnoTracker pno_step(const PnoTracker& tracker, double observed_power_prev,
                    double observed_power_now);

// Latches SW1 at the next zero crossing of I_m. Until then SW1 opens into
// the release clamp only while that drives I_m toward zero.
class QuickOpener {
 public:
  void begin(double prior_cycle_mean_abs, double im_now, int substeps_per_cycle);
  // Advances one substep, including the latch event when I_m crosses zero
  // inside the step.
  CircuitState step(const CircuitState& state, const CircuitParams& params, double ip_inst,
                    double dt, double battery_voltage);

  bool active() const { return active_; }
  bool latched() const { return latched_; }
  bool fell_back() const { return fell_back_; }
  int latch_substep() const { return latch_substep_; }
  int waited_substeps() const { return waited_; }
  double prior_mean() const { return prior_mean_; }

 private:
  bool active_ = false;
  bool latched_ = false;
  bool fell_back_ = false;
  int waited_ = 0;
  int latch_substep_ = -1;
  int timeout_ = 200;
  double prior_mean_ = 0.0;
};

struct SensingParams {
  double reference_line_current = 288.0;  // A RMS
  double reference_power = 50.0;          // W
  double noise_floor_fraction = 0.005;
};

GripperStatus sense_gripper_status(MmcMode mode, const CycleSummary& cycle,
                                   const CircuitParams& circuit, const SensingParams& sensing);

struct MmcTelemetry {
  double battery_voltage = 0.0;
  double charging_power = 0.0;  // W into the pack, negative for mode-1 draw
  GripperStatus gripper_status = GripperStatus::Open;
  MmcMode mode = MmcMode::Idle;
  double holding_force = 0.0;
  double im_mean_abs = 0.0;
  double ip_rms = 0.0;
  TransferWindow window;
};

struct MmcConfig {
  MmcThresholds thresholds;
  SensingParams sensing;
  TransferWindow initial_window{20.0 * 3.14159265358979323846 / 180.0,
                                140.0 * 3.14159265358979323846 / 180.0,
                                1.0 * 3.14159265358979323846 / 180.0};
  TransferWindow hold_window{60.0 * 3.14159265358979323846 / 180.0,
                             60.0 * 3.14159265358979323846 / 180.0, 0.0};
  // After each perturbation the controller discards `pno_settle_cycles`
  // line cycles, then averages `pno_observe_cycles` for the observation.
  int pno_settle_cycles = 150;
  int pno_observe_cycles = 10;
  double release_force = 5.0;  // N, the passive core falls open below this
};

void validate(const MmcConfig& config);

// The controller runs once per circuit substep. Mode is re-selected at
// every line-cycle boundary; an Open command takes effect immediately.
class MmcController {
 public:
  MmcController() = default;
  MmcController(const CircuitParams& circuit, const MmcConfig& config, double line_frequency,
                double circuit_dt);

  void command(MmcCommand cmd);
  MmcCommand current_command() const { return command_; }

  // One substep. `ip_line` is the line current coupled into the core.
  void substep(double ip_line, int phase_index, double battery_voltage, bool core_closed);

  const CircuitState& circuit() const { return state_; }
  CircuitState& mutable_circuit() { return state_; }
  MmcMode mode() const { return mode_; }
  const MmcTelemetry& telemetry() const { return telemetry_; }
  const CycleSummary& last_cycle() const { return last_cycle_; }
  const QuickOpener& opener() const { return opener_; }
  const PnoTracker& pno() const { return pno_; }
  // Set when a line cycle completed during the last substep.
  bool cycle_completed() const { return cycle_completed_; }

  // Energy (J) moved into / out of the pack since the last call.
  double take_charge_energy();
  double take_drain_energy();

  bool dormant() const;

 private:
  void finish_cycle(double battery_voltage, bool core_closed);
  SwitchDrive drive_for(double phase, double battery_voltage) const;

  CircuitParams params_;
  MmcConfig config_;
  double frequency_ = 50.0;
  double dt_ = 1e-4;
  int substeps_per_cycle_ = 200;

  CircuitState state_;
  MmcCommand command_ = MmcCommand::Open;
  MmcMode mode_ = MmcMode::Idle;
  MmcTelemetry telemetry_;
  CycleSummary last_cycle_;
  CycleAccumulator acc_;
  QuickOpener opener_;
  PnoTracker pno_;
  double pno_power_sum_ = 0.0;
  int pno_cycles_ = 0;
  double pno_prev_power_ = 0.0;
  bool cycle_completed_ = false;
  double charge_j_ = 0.0;
  double drain_j_ = 0.0;
};

}  // namespace perch

#endif  // PERCH_MMC_HPP_
