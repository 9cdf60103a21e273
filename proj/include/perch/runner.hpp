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

#ifndef PERCH_RUNNER_HPP_
#define PERCH_RUNNER_HPP_

#include <chrono>
#include <functional>
#include <string>

#include "perch/config.hpp"
#include "perch/telemetry.hpp"

namespace perch {

// Holds simulated time at `speedup` times wall-clock time. 0 disables
// pacing.
class Pacer {
 public:
  explicit Pacer(double speedup);
  void wait_until(double sim_t);
  void reset(double sim_t);

 private:
  double speedup_;
  double sim0_ = 0.0;
  std::chrono::steady_clock::time_point wall0_;
};

struct RunOptions {
  std::string out_dir;  // empty = keep nothing on disk
  double speedup = 0.0;
  std::function<void(const TelemetryRecord&)> on_record;  // logged records only
};

struct RunResult {
  RunSummary summary;
  std::string outcome;
  int exit_code = 0;  // 0 completed, 2 mission failure
  long long steps = 0;
  double wall_seconds = 0.0;
};

// Headless batch run. Writes log.jsonl, summary.json and the CSV extracts
// (plus circuit_trace.csv when enabled) into out_dir.
RunResult run_scenario(const Scenario& scenario, const RunOptions& options);

// Rebuilds summary.json and the CSV extracts from a log.
RunSummary replay_log(const std::string& log_path, const std::string& out_dir);

}  // namespace perch

#endif  // PERCH_RUNNER_HPP_
