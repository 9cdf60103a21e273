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

#include "perch/mmc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "perch/geometry.hpp"

namespace perch {

namespace {
constexpr double kPi = std::numbers::pi;
}  // namespace

std::string_view to_string(MmcMode m) {
  switch (m) {
    case MmcMode::Mode1_DC: return "Mode1_DC";
    case MmcMode::Mode2_Charging: return "Mode2_Charging";
    case MmcMode::Mode3_ACHold: return "Mode3_ACHold";
    case MmcMode::Opening: return "Opening";
    case MmcMode::Idle: return "Idle";
  }
  return "?";
}

std::string_view to_string(MmcCommand c) { return c == MmcCommand::Open ? "open" : "closed"; }

std::string_view to_string(GripperStatus s) {
  return s == GripperStatus::Open ? "Open" : "Closed";
}

MmcMode select_mode(MmcCommand cmd, double ip_rms, double battery_voltage,
                    const MmcThresholds& th, MmcMode current) {
  if (cmd == MmcCommand::Open) return MmcMode::Opening;
  if (ip_rms < th.ip_hold_min) return MmcMode::Mode1_DC;
  const double full = current == MmcMode::Mode3_ACHold ? th.v_resume : th.v_full;
  if (battery_voltage < full) return MmcMode::Mode2_Charging;
  return MmcMode::Mode3_ACHold;
}

bool mode3_switch_schedule(const TransferWindow& w, double phase) {
  double ph = std::fmod(phase, 2.0 * kPi);
  if (ph < 0.0) ph += 2.0 * kPi;
  if (ph >= kPi) return true;
  const bool open = ph >= w.start_phase && ph < w.start_phase + w.width;
  return !open;
}

CircuitState step_windowed(const CircuitState& state, const CircuitParams& params,
                           const TransferWindow& w, double phase, double dphase,
                           double ip_inst, double dt, double battery_voltage) {
  double p0 = std::fmod(phase, 2.0 * kPi);
  if (p0 < 0.0) p0 += 2.0 * kPi;
  const double p1 = p0 + dphase;
  const double a = std::max(w.start_phase, 0.0);
  const double b = std::min(w.start_phase + w.width, kPi);
  double cuts[4] = {p0, p1, p1, p1};
  int n = 1;
  for (double edge : {a, b}) {
    if (edge > cuts[n - 1] && edge < p1) cuts[n++] = edge;
  }
  cuts[n] = p1;

  SwitchDrive drive;
  drive.battery_voltage = battery_voltage;
  CircuitState s = state;
  CircuitState avg = state;
  avg.i_load = avg.sw1_current = avg.bus_power = avg.node_voltage = 0.0;
  bool any_open = false;
  for (int i = 0; i < n; ++i) {
    const double frac = (cuts[i + 1] - cuts[i]) / dphase;
    if (frac <= 0.0) continue;
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    drive.sw1_closed = !(mid >= a && mid < b);
    any_open = any_open || !drive.sw1_closed;
    s = step_circuit(s, params, drive, ip_inst, frac * dt);
    avg.i_load += frac * s.i_load;
    avg.sw1_current += frac * s.sw1_current;
    avg.bus_power += frac * s.bus_power;
    avg.node_voltage += frac * s.node_voltage;
  }
  avg.ip_inst = s.ip_inst;
  avg.im = s.im;
  avg.sw1 = !any_open;
  avg.sw2 = false;
  avg.battery_drain = 0.0;
  return avg;
}

TransferWindow clip_window(TransferWindow w) {
  w.width = std::clamp(w.width, 0.0, kPi);
  w.start_phase = std::clamp(w.start_phase, 0.0, kPi - w.width);
  return w;
}

WindowCycle run_window_cycle(const CircuitParams& params, const TransferWindow& window,
                             double ip_rms, double frequency, double dt, double im0) {
  const int n = static_cast<int>(std::lround(1.0 / (frequency * dt)));
  CircuitState s;
  s.im = im0;
  CycleAccumulator acc;
  const double dphase = 2.0 * kPi / n;
  for (int k = 0; k < n; ++k) {
    s = step_windowed(s, params, window, k * dphase, dphase,
                      line_current(k * dt, ip_rms, frequency), dt, params.output_voltage);
    acc.add(s);
  }
  return {s.im, acc.finish()};
}

WindowCycle steady_state_cycle(const CircuitParams& params, const TransferWindow& window,
                               double ip_rms, double frequency, double dt) {
  auto residual = [&](double im0) {
    return run_window_cycle(params, window, ip_rms, frequency, dt, im0).im_end - im0;
  };
  // The cycle map contracts, so the residual is strictly decreasing in im0.
  double lo = -1.0;
  double hi = 1.0;
  double g_lo = residual(lo);
  double g_hi = residual(hi);
  while (g_lo < 0.0) {
    lo *= 2.0;
    g_lo = residual(lo);
  }
  while (g_hi > 0.0) {
    hi *= 2.0;
    g_hi = residual(hi);
  }
  double x = 0.5 * (lo + hi);
  int side = 0;
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    x = (lo * g_hi - hi * g_lo) / (g_hi - g_lo);
    const double g = residual(x);
    if (g == 0.0) break;
    if (g > 0.0) {
      lo = x;
      g_lo = g;
      if (side == 1) g_hi *= 0.5;
      side = 1;
    } else {
      hi = x;
      g_hi = g;
      if (side == -1) g_lo *= 0.5;
      side = -1;
    }
  }
  return run_window_cycle(params, window, ip_rms, frequency, dt, x);
}

PnoTracker pno_step(const PnoTracker& in, double prev, double now) {
  PnoTracker t = in;
  if (t.started) {
    if (!(now > prev)) {
      if (t.last_was_width) {
        t.width_direction = -t.width_direction;
      } else {
        t.start_direction = -t.start_direction;
      }
    }
  }
  t.started = true;

  const bool perturb_width = !t.last_was_width;
  const double step = t.window.step_size;
  TransferWindow w = t.window;
  int& dir = perturb_width ? t.width_direction : t.start_direction;
  for (int attempt = 0; attempt < 2; ++attempt) {
    TransferWindow trial = w;
    if (perturb_width) {
      trial.width += dir * step;
    } else {
      trial.start_phase += dir * step;
    }
    const bool feasible = trial.width >= step - 1e-12 && trial.start_phase >= -1e-12 &&
                          trial.start_phase + trial.width <= kPi + 1e-12;
    if (feasible) {
      w = clip_window(trial);
      break;
    }
    // Blocked by the half-cycle boundary: turn around.
    dir = -dir;
  }
  t.window = w;
  t.last_was_width = perturb_width;
  return t;
}

void QuickOpener::begin(double prior_cycle_mean_abs, double im_now, int substeps_per_cycle) {
  active_ = true;
  latched_ = false;
  fell_back_ = false;
  waited_ = 0;
  latch_substep_ = -1;
  timeout_ = substeps_per_cycle;
  prior_mean_ = prior_cycle_mean_abs;
  if (std::abs(im_now) <= 0.01 * prior_cycle_mean_abs || std::abs(im_now) < 1e-9) {
    latched_ = true;
    latch_substep_ = 0;
  }
}

CircuitState QuickOpener::step(const CircuitState& state, const CircuitParams& params,
                               double ip_inst, double dt, double battery_voltage) {
  SwitchDrive closed;
  closed.battery_voltage = battery_voltage;
  if (!active_ || latched_) return step_circuit(state, params, closed, ip_inst, dt);

  if (waited_ >= timeout_) {
    // No crossing within a line cycle: plain short-circuit release.
    latched_ = true;
    fell_back_ = true;
    latch_substep_ = waited_;
    return step_circuit(state, params, closed, ip_inst, dt);
  }

  const double i_s = ip_inst / params.turns;
  SwitchDrive drive = closed;
  if ((i_s - state.im) * state.im < 0.0) {
    drive.sw1_closed = false;
    drive.path = OutputPath::ReleaseClamp;
  }
  CircuitState next = step_circuit(state, params, drive, ip_inst, dt);
  const bool crossed = (state.im > 0.0 && next.im <= 0.0) || (state.im < 0.0 && next.im >= 0.0);
  if (crossed) {
    // Locate the zero inside the step and close SW1 there.
    const double alpha = state.im / (state.im - next.im);
    CircuitState at_zero = step_circuit(state, params, drive, ip_inst, alpha * dt);
    at_zero.im = 0.0;
    next = step_circuit(at_zero, params, closed, ip_inst, (1.0 - alpha) * dt);
    latched_ = true;
    latch_substep_ = waited_;
  }
  ++waited_;
  return next;
}

GripperStatus sense_gripper_status(MmcMode mode, const CycleSummary& c,
                                   const CircuitParams& circuit, const SensingParams& sensing) {
  const double current_floor =
      sensing.noise_floor_fraction * sensing.reference_line_current / circuit.turns;
  const double power_floor = sensing.noise_floor_fraction * sensing.reference_power;
  double signal = 0.0;
  double floor = current_floor;
  switch (mode) {
    case MmcMode::Mode1_DC:
      signal = c.load_current_ac_rms;
      break;
    case MmcMode::Mode2_Charging:
      signal = c.harvested_power;
      floor = power_floor;
      break;
    case MmcMode::Mode3_ACHold:
      signal = c.sw1_closed_current_rms;
      break;
    case MmcMode::Opening:
    case MmcMode::Idle:
      signal = std::max(c.sw1_closed_current_rms, c.load_current_ac_rms);
      break;
  }
  return signal > floor ? GripperStatus::Closed : GripperStatus::Open;
}

void validate(const MmcConfig& c) {
  if (!(c.thresholds.ip_hold_min >= 0.0) || !(c.thresholds.v_full > 0.0) ||
      !(c.thresholds.v_resume <= c.thresholds.v_full)) {
    throw ConfigError("mmc thresholds must be positive");
  }
  for (const auto* w : {&c.initial_window, &c.hold_window}) {
    if (!(w->width > 0.0) || w->start_phase < 0.0 || w->start_phase + w->width > kPi + 1e-9) {
      throw ConfigError("transfer window must lie inside the positive half-cycle");
    }
  }
  if (!(c.initial_window.step_size > 0.0)) throw ConfigError("P&O step must be positive");
  if (c.pno_observe_cycles < 1 || c.pno_settle_cycles < 0) {
    throw ConfigError("P&O cycle counts are invalid");
  }
  if (!(c.release_force > 0.0)) throw ConfigError("release_force must be positive");
}

MmcController::MmcController(const CircuitParams& circuit, const MmcConfig& config,
                             double line_frequency, double circuit_dt)
    : params_(circuit), config_(config), frequency_(line_frequency), dt_(circuit_dt) {
  substeps_per_cycle_ = static_cast<int>(std::lround(1.0 / (line_frequency * circuit_dt)));
  pno_.window = config.initial_window;
}

void MmcController::command(MmcCommand cmd) {
  if (cmd == MmcCommand::Open) {
    if (command_ == MmcCommand::Closed || (mode_ != MmcMode::Idle && mode_ != MmcMode::Opening)) {
      mode_ = MmcMode::Opening;
      opener_.begin(last_cycle_.im_mean_abs, state_.im, substeps_per_cycle_);
    }
    command_ = cmd;
    return;
  }
  if (command_ != MmcCommand::Closed) {
    command_ = cmd;
    mode_ = select_mode(cmd, last_cycle_.ip_rms, telemetry_.battery_voltage, config_.thresholds, mode_);
    pno_cycles_ = 0;
    pno_power_sum_ = 0.0;
  }
}

SwitchDrive MmcController::drive_for(double phase, double battery_voltage) const {
  SwitchDrive d;
  d.battery_voltage = battery_voltage;
  switch (mode_) {
    case MmcMode::Mode1_DC:
      d.sw2_closed = true;
      break;
    case MmcMode::Mode2_Charging:
      d.sw1_closed = mode3_switch_schedule(pno_.window, phase);
      break;
    case MmcMode::Mode3_ACHold:
      d.sw1_closed = mode3_switch_schedule(config_.hold_window, phase);
      break;
    case MmcMode::Opening:
    case MmcMode::Idle:
      break;
  }
  return d;
}

void MmcController::substep(double ip_line, int phase_index, double battery_voltage,
                            bool core_closed) {
  cycle_completed_ = false;
  telemetry_.battery_voltage = battery_voltage;
  const double phase = 2.0 * kPi * phase_index / substeps_per_cycle_;
  const double dphase = 2.0 * kPi / substeps_per_cycle_;
  if (mode_ == MmcMode::Opening) {
    state_ = opener_.step(state_, params_, ip_line, dt_, battery_voltage);
  } else if (mode_ == MmcMode::Mode2_Charging) {
    state_ = step_windowed(state_, params_, pno_.window, phase, dphase, ip_line, dt_,
                           battery_voltage);
  } else if (mode_ == MmcMode::Mode3_ACHold) {
    state_ = step_windowed(state_, params_, config_.hold_window, phase, dphase, ip_line, dt_,
                           battery_voltage);
  } else {
    state_ = step_circuit(state_, params_, drive_for(phase, battery_voltage), ip_line, dt_);
  }
  acc_.add(state_);
  if (mode_ == MmcMode::Mode2_Charging) charge_j_ += state_.bus_power * dt_;
  if (mode_ == MmcMode::Mode1_DC && state_.battery_drain > 0.0) {
    drain_j_ += state_.battery_drain * dt_;
  }
  if (phase_index == substeps_per_cycle_ - 1) finish_cycle(battery_voltage, core_closed);
}

void MmcController::finish_cycle(double battery_voltage, bool core_closed) {
  cycle_completed_ = true;
  const MmcMode ran = mode_;
  last_cycle_ = acc_.finish();

  telemetry_.mode = ran;
  telemetry_.battery_voltage = battery_voltage;
  telemetry_.ip_rms = last_cycle_.ip_rms;
  telemetry_.im_mean_abs = last_cycle_.im_mean_abs;
  telemetry_.holding_force = holding_force(last_cycle_.im_mean_abs, params_, core_closed);
  telemetry_.gripper_status = sense_gripper_status(ran, last_cycle_, params_, config_.sensing);
  telemetry_.window = pno_.window;
  telemetry_.charging_power = ran == MmcMode::Mode2_Charging ? last_cycle_.harvested_power
                              : ran == MmcMode::Mode1_DC     ? -last_cycle_.battery_drain
                                                             : 0.0;

  if (ran == MmcMode::Mode2_Charging) {
    ++pno_cycles_;
    if (pno_cycles_ > config_.pno_settle_cycles) pno_power_sum_ += last_cycle_.harvested_power;
    if (pno_cycles_ == config_.pno_settle_cycles + config_.pno_observe_cycles) {
      const double observed = pno_power_sum_ / config_.pno_observe_cycles;
      pno_ = pno_step(pno_, pno_prev_power_, observed);
      pno_prev_power_ = observed;
      pno_cycles_ = 0;
      pno_power_sum_ = 0.0;
    }
  }

  if (mode_ == MmcMode::Opening) {
    if (opener_.latched() && telemetry_.holding_force < config_.release_force) {
      mode_ = MmcMode::Idle;
    }
    return;
  }
  if (command_ == MmcCommand::Closed) {
    const MmcMode next =
        select_mode(command_, last_cycle_.ip_rms, battery_voltage, config_.thresholds, mode_);
    if (next != mode_) {
      pno_cycles_ = 0;
      pno_power_sum_ = 0.0;
    }
    mode_ = next;
  }
}

double MmcController::take_charge_energy() {
  const double e = charge_j_;
  charge_j_ = 0.0;
  return e;
}

double MmcController::take_drain_energy() {
  const double e = drain_j_;
  drain_j_ = 0.0;
  return e;
}

bool MmcController::dormant() const {
  return mode_ == MmcMode::Idle && command_ == MmcCommand::Open && std::abs(state_.im) < 1e-6;
}

}  // namespace perch
