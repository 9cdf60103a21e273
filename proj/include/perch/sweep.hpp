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

#ifndef PERCH_SWEEP_HPP_
#define PERCH_SWEEP_HPP_

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "perch/config.hpp"
#include "perch/telemetry.hpp"

namespace perch {

struct SweepPoint {
  double ip_rms = 0.0;
  double charging_power = 0.0;  // W, trailing average
  double t55_min = 0.0;         // minutes to charge 55% of the pack
  double window_start_deg = 0.0;  // trailing average of the P&O window
  double window_width_deg = 0.0;
  int perturbations = 0;
};

// Minutes to move 55% of the usable energy at `power_w`.
double charge_time_55(double power_w, const BatteryParams& battery);

// Runs the MMC in charging mode with P&O at one line current.
SweepPoint sweep_point(const Scenario& scenario, double ip_rms);

std::vector<SweepPoint> charging_sweep_serial(const Scenario& scenario,
                                              const std::vector<double>& ip_values);
// OpenMP over the current levels; results match the serial kernel exactly.
std::vector<SweepPoint> charging_sweep(const Scenario& scenario,
                                       const std::vector<double>& ip_values);

void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points);

struct AffineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

AffineFit fit_affine(const std::vector<double>& x, const std::vector<double>& y);

// Grid of transfer windows on the positive half-cycle: start in
// [0, 180 - step] degrees, width in [step, 180 - start] degrees.
struct WindowGrid {
  double step_deg = 1.0;

  std::vector<TransferWindow> windows() const;
};

// Steady-state cycle power for every window in the grid, in grid order.
std::vector<double> window_power_map_serial(const CircuitParams& params,
                                            const std::vector<TransferWindow>& windows,
                                            double ip_rms, double frequency, double dt);
std::vector<double> window_power_map(const CircuitParams& params,
                                     const std::vector<TransferWindow>& windows, double ip_rms,
                                     double frequency, double dt);

struct WindowOptimum {
  TransferWindow window;
  double power = 0.0;
};

WindowOptimum best_window(const std::vector<TransferWindow>& windows,
                          const std::vector<double>& power);

// Independent seeded runs of one scenario (no files written).
std::vector<RunSummary> batch_runs_serial(const Scenario& scenario,
                                          const std::vector<std::uint64_t>& seeds);
std::vector<RunSummary> batch_runs(const Scenario& scenario,
                                   const std::vector<std::uint64_t>& seeds);

}  // namespace perch

#endif  // PERCH_SWEEP_HPP_
