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

#include "perch/runner.hpp"

#include <filesystem>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <thread>

#include "perch/simulator.hpp"

namespace perch {

Pacer::Pacer(double speedup) : speedup_(speedup), wall0_(std::chrono::steady_clock::now()) {}

void Pacer::reset(double sim_t) {
  sim0_ = sim_t;
  wall0_ = std::chrono::steady_clock::now();
}

void Pacer::wait_until(double sim_t) {
  if (speedup_ <= 0.0) return;
  const auto target =
      wall0_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                   std::chrono::duration<double>((sim_t - sim0_) / speedup_));
  std::this_thread::sleep_until(target);
}

namespace {

void write_trace(const std::string& path, const std::vector<CircuitSample>& trace) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f.precision(10);
  f << "# " << kCsvSchema << " circuit_trace\n";
  f << "t,ip,im,i_load,sw1_current,sw1,bus_power,battery_drain\n";
  for (const auto& s : trace) {
    f << s.t << ',' << s.ip << ',' << s.im << ',' << s.i_load << ',' << s.sw1_current << ','
      << (s.sw1 ? 1 : 0) << ',' << s.bus_power << ',' << s.battery_drain << '\n';
  }
}

}  // namespace

RunResult run_scenario(const Scenario& scenario, const RunOptions& options) {
  const auto wall0 = std::chrono::steady_clock::now();
  Simulator sim(scenario);
  std::ofstream log;
  std::unique_ptr<ExtractWriter> extracts;
  if (!options.out_dir.empty()) {
    std::filesystem::create_directories(options.out_dir);
    log.open(std::filesystem::path(options.out_dir) / "log.jsonl");
    if (!log) throw std::runtime_error("cannot write log in " + options.out_dir);
    log << log_header() << '\n';
    extracts = std::make_unique<ExtractWriter>(options.out_dir);
  }
  SummaryBuilder summary;
  auto emit = [&](const TelemetryRecord& r) {
    summary.add(r);
    if (log.is_open()) log << to_jsonl(r) << '\n';
    if (extracts) extracts->add(r);
    if (options.on_record) options.on_record(r);
  };

  Pacer pacer(options.speedup);
  emit(sim.latest());
  while (!sim.done()) {
    sim.step();
    if (sim.latest_logged()) emit(sim.latest());
    pacer.wait_until(sim.clock().t());
  }

  RunResult res;
  res.summary = summary.summary();
  res.outcome = sim.outcome();
  res.exit_code = sim.mission_failed() ? 2 : 0;
  res.steps = sim.clock().steps();
  if (extracts) {
    log.flush();
    extracts->finish(res.summary);
    if (scenario.telemetry.circuit_trace_cycles > 0) {
      write_trace((std::filesystem::path(options.out_dir) / "circuit_trace.csv").string(),
                  sim.circuit_trace());
    }
  }
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
  return res;
}

RunSummary replay_log(const std::string& log_path, const std::string& out_dir) {
  std::ifstream in(log_path);
  if (!in) throw std::runtime_error("cannot open log: " + log_path);
  SummaryBuilder summary;
  ExtractWriter extracts(out_dir);
  for_each_record(in, [&](const TelemetryRecord& r) {
    summary.add(r);
    extracts.add(r);
  });
  const RunSummary s = summary.summary();
  extracts.finish(s);
  return s;
}

}  // namespace perch
