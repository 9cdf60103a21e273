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

#include "perch/sweep.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "perch/runner.hpp"

namespace perch {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

}  // namespace

double charge_time_55(double power_w, const BatteryParams& battery) {
  if (!(power_w > 0.0)) return std::numeric_limits<double>::infinity();
  return 0.55 * battery.usable_energy_wh() / power_w * 60.0;
}

SweepPoint sweep_point(const Scenario& sc, double ip_rms) {
  const double f = sc.powerline.line_frequency;
  const double dt = sc.clock.circuit_dt;
  const int spc = static_cast<int>(std::lround(1.0 / (f * dt)));
  MmcController mmc(sc.circuit, sc.mmc, f, dt);
  mmc.command(MmcCommand::Closed);
  const double amp = std::sqrt(2.0) * ip_rms;
  const int cycles = sc.sweep.cycles;
  const int tail = sc.sweep.average_cycles;

  SweepPoint p;
  p.ip_rms = ip_rms;
  double power = 0.0;
  double start = 0.0;
  double width = 0.0;
  int n = 0;
  TransferWindow last = mmc.pno().window;
  for (int c = 0; c < cycles; ++c) {
    for (int k = 0; k < spc; ++k) {
      mmc.substep(amp * std::sin(2.0 * std::numbers::pi * k / spc), k, sc.sweep.battery_voltage,
                  true);
    }
    const TransferWindow& w = mmc.pno().window;
    if (w.start_phase != last.start_phase || w.width != last.width) ++p.perturbations;
    last = w;
    if (c >= cycles - tail && mmc.telemetry().mode == MmcMode::Mode2_Charging) {
      power += mmc.last_cycle().harvested_power;
      start += w.start_phase;
      width += w.width;
      ++n;
    }
  }
  if (n > 0) {
    p.charging_power = power / n;
    p.window_start_deg = start / n / kDeg;
    p.window_width_deg = width / n / kDeg;
  }
  p.t55_min = charge_time_55(p.charging_power, sc.powertrain.battery);
  return p;
}

std::vector<SweepPoint> charging_sweep_serial(const Scenario& sc,
                                              const std::vector<double>& ip_values) {
  std::vector<SweepPoint> out;
  out.reserve(ip_values.size());
  for (double ip : ip_values) out.push_back(sweep_point(sc, ip));
  return out;
}

std::vector<SweepPoint> charging_sweep(const Scenario& sc, const std::vector<double>& ip_values) {
  std::vector<SweepPoint> out(ip_values.size());
  const long n = static_cast<long>(ip_values.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) out[i] = sweep_point(sc, ip_values[i]);
  return out;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points) {
  out << "# " << kCsvSchema << " sweep\n";
  out << "ip_rms,charging_power_w,t55_min,window_start_deg,window_width_deg\n";
  for (const auto& p : points) {
    out << p.ip_rms << ',' << p.charging_power << ',' << p.t55_min << ',' << p.window_start_deg
        << ',' << p.window_width_deg << '\n';
  }
}

AffineFit fit_affine(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_affine: size");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  AffineFit fit;
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  const double mean = sy / n;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (fit.slope * x[i] + fit.intercept);
    ss_res += e * e;
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

std::vector<TransferWindow> WindowGrid::windows() const {
  std::vector<TransferWindow> out;
  const int n = static_cast<int>(std::lround(180.0 / step_deg));
  for (int i = 0; i < n; ++i) {
    for (int j = 1; i + j <= n; ++j) {
      out.push_back({i * step_deg * kDeg, j * step_deg * kDeg, step_deg * kDeg});
    }
  }
  return out;
}

std::vector<double> window_power_map_serial(const CircuitParams& params,
                                            const std::vector<TransferWindow>& windows,
                                            double ip_rms, double frequency, double dt) {
  std::vector<double> out;
  out.reserve(windows.size());
  for (const auto& w : windows) {
    out.push_back(steady_state_cycle(params, w, ip_rms, frequency, dt).summary.harvested_power);
  }
  return out;
}

std::vector<double> window_power_map(const CircuitParams& params,
                                     const std::vector<TransferWindow>& windows, double ip_rms,
                                     double frequency, double dt) {
  std::vector<double> out(windows.size());
  const long n = static_cast<long>(windows.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (long i = 0; i < n; ++i) {
    out[i] = steady_state_cycle(params, windows[i], ip_rms, frequency, dt).summary.harvested_power;
  }
  return out;
}

WindowOptimum best_window(const std::vector<TransferWindow>& windows,
                          const std::vector<double>& power) {
  WindowOptimum best;
  best.power = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (power[i] > best.power) {
      best.power = power[i];
      best.window = windows[i];
    }
  }
  return best;
}

std::vector<RunSummary> batch_runs_serial(const Scenario& sc,
                                          const std::vector<std::uint64_t>& seeds) {
  std::vector<RunSummary> out;
  for (auto seed : seeds) {
    Scenario s = sc;
    s.seed = seed;
    out.push_back(run_scenario(s, {}).summary);
  }
  return out;
}

std::vector<RunSummary> batch_runs(const Scenario& sc, const std::vector<std::uint64_t>& seeds) {
  std::vector<RunSummary> out(seeds.size());
  const long n = static_cast<long>(seeds.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    Scenario s = sc;
    s.seed = seeds[i];
    out[i] = run_scenario(s, {}).summary;
  }
  return out;
}

}  // namespace perch
