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


#include <optional>

#include <benchmark/benchmark.h>

#include "perch/mmc.hpp"
#include "perch/simulator.hpp"
#include "perch/sweep.hpp"

namespace perch {
namespace {

void BM_WindowMapSerial(benchmark::State& state) {
  const auto ws = WindowGrid{5.0}.windows();
  for (auto _ : state) {
    benchmark::DoNotOptimize(window_power_map_serial(CircuitParams{}, ws, 288.0, 50.0, 1e-4));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(ws.size()));
}
BENCHMARK(BM_WindowMapSerial)->Unit(benchmark::kMillisecond);

void BM_WindowMapOpenMP(benchmark::State& state) {
  const auto ws = WindowGrid{5.0}.windows();
  for (auto _ : state) {
    benchmark::DoNotOptimize(window_power_map(CircuitParams{}, ws, 288.0, 50.0, 1e-4));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(ws.size()));
}
BENCHMARK(BM_WindowMapOpenMP)->Unit(benchmark::kMillisecond);

Scenario short_sweep() {
  Scenario s;
  s.sweep.cycles = 2000;
  s.sweep.average_cycles = 100;
  return s;
}

void BM_ChargingSweepSerial(benchmark::State& state) {
  const Scenario s = short_sweep();
  for (auto _ : state) benchmark::DoNotOptimize(charging_sweep_serial(s, s.sweep.ip_values));
}
BENCHMARK(BM_ChargingSweepSerial)->Unit(benchmark::kMillisecond);

void BM_ChargingSweepOpenMP(benchmark::State& state) {
  const Scenario s = short_sweep();
  for (auto _ : state) benchmark::DoNotOptimize(charging_sweep(s, s.sweep.ip_values));
}
BENCHMARK(BM_ChargingSweepOpenMP)->Unit(benchmark::kMillisecond);

// Circuit substeps per second with the MMC charging.
void BM_MmcSubstep(benchmark::State& state) {
  MmcController mmc(CircuitParams{}, MmcConfig{}, 50.0, 1e-4);
  mmc.command(MmcCommand::Closed);
  long k = 0;
  for (auto _ : state) {
    mmc.substep(line_current(k * 1e-4, 288.0, 50.0), static_cast<int>(k % 200), 23.0, true);
    ++k;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_MmcSubstep);

// Flight steps per second while hovering and tracking cables.
void BM_SimulatorStepFlight(benchmark::State& state) {
  Scenario s;
  s.mission.auto_thresholds = false;
  s.clock.duration = 1e9;
  Simulator sim(s);
  for (auto _ : state) sim.step();
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SimulatorStepFlight);

// Flight steps per second while perched, circuit substeps included.
void BM_SimulatorStepCharging(benchmark::State& state) {
  Scenario s;
  s.mission.auto_thresholds = false;
  s.clock.duration = 1e9;
  s.drone.initial_soc = 0.5;
  Simulator sim(s);
  while (!sim.latest().mission_started) sim.step();
  const std::optional<CommandAck> ack = sim.step(OperatorCommand::InitiateCharging);
  if (!ack || !ack->accepted) {
    state.SkipWithError("initiate charging refused");
    return;
  }
  while (sim.mission().state != MissionState::Charging) sim.step();
  for (auto _ : state) sim.step();
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SimulatorStepCharging);

}  // namespace
}  // namespace perch

BENCHMARK_MAIN();
