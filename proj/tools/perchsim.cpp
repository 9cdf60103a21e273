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

#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "perch/config.hpp"
#include "perch/runner.hpp"
#include "perch/service.hpp"
#include "perch/sweep.hpp"

namespace {

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted = true; }

constexpr int kOk = 0;
constexpr int kConfigError = 1;

perch::Scenario load(const std::string& path, const std::optional<std::uint64_t>& seed) {
  perch::Scenario s = perch::load_scenario(path);
  if (seed) s.seed = *seed;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"perchsim: powerline perching drone simulator"};
  app.require_subcommand(1);

  std::string config;
  std::optional<std::uint64_t> seed;
  double speedup = 0.0;
  int port = 8080;
  std::string out_dir = "out";
  std::string log_path;
  std::string sweep_out;
  bool serial = false;

  auto* run = app.add_subcommand("run", "headless batch run with logs and CSV extracts");
  run->add_option("--config", config, "scenario JSON")->required()->check(CLI::ExistingFile);
  auto* run_speedup =
      run->add_option("--speedup", speedup, "sim seconds per wall second, 0 = unthrottled");
  run->add_option("--seed", seed, "override the scenario seed");
  run->add_option("--out", out_dir, "output directory");

  auto* serve = app.add_subcommand("serve", "live service: /state /stream /command /summary");
  serve->add_option("--config", config, "scenario JSON")->required()->check(CLI::ExistingFile);
  serve->add_option("--port", port, "TCP port, 0 = any free port");
  auto* serve_speedup =
      serve->add_option("--speedup", speedup, "sim seconds per wall second, 0 = unthrottled");
  serve->add_option("--seed", seed, "override the scenario seed");
  serve->add_option("--out", out_dir, "directory for log.jsonl");

  auto* sweep = app.add_subcommand("sweep", "charging power and 55% charge time over I_p");
  sweep->add_option("--config", config, "scenario JSON")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", sweep_out, "CSV file (default stdout)");
  sweep->add_flag("--serial", serial, "use the single-threaded kernel");

  auto* replay = app.add_subcommand("replay", "rebuild summary and CSV extracts from a log");
  replay->add_option("--config", config, "scenario JSON the log was recorded with")
      ->check(CLI::ExistingFile);
  replay->add_option("--log", log_path, "log.jsonl (default <out>/log.jsonl)");
  replay->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*run) {
      const perch::Scenario s = load(config, seed);
      perch::RunOptions opt;
      opt.out_dir = out_dir;
      opt.speedup = run_speedup->count() ? speedup : s.clock.realtime_factor;
      const perch::RunResult r = perch::run_scenario(s, opt);
      std::cout << perch::to_json(r.summary).dump(2) << "\n";
      std::cerr << "outcome: " << r.outcome << ", " << r.steps << " steps in " << r.wall_seconds
                << " s\n";
      return r.exit_code;
    }
    if (*serve) {
      const perch::Scenario s = load(config, seed);
      perch::ServiceOptions opt;
      opt.port = port;
      opt.speedup = serve_speedup->count() ? speedup : s.clock.realtime_factor;
      opt.out_dir = out_dir;
      perch::Service service(s, opt);
      const int bound = service.start();
      std::cerr << "listening on http://" << opt.host << ":" << bound << "\n";
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      while (!g_interrupted.load()) std::this_thread::sleep_for(std::chrono::milliseconds(100));
      service.shutdown();
      return service.sim_done() ? service.exit_code() : kOk;
    }
    if (*sweep) {
      const perch::Scenario s = load(config, std::nullopt);
      const auto t0 = std::chrono::steady_clock::now();
      const auto points = serial ? perch::charging_sweep_serial(s, s.sweep.ip_values)
                                 : perch::charging_sweep(s, s.sweep.ip_values);
      if (sweep_out.empty()) {
        perch::write_sweep_csv(std::cout, points);
      } else {
        std::ofstream f(sweep_out);
        f.precision(10);
        perch::write_sweep_csv(f, points);
      }
      std::vector<double> x, y;
      for (const auto& p : points) {
        x.push_back(p.ip_rms);
        y.push_back(p.charging_power);
      }
      if (points.size() >= 2) {
        const auto fit = perch::fit_affine(x, y);
        std::cerr << "affine fit: P = " << fit.slope << " * I_p + " << fit.intercept
                  << "  R^2 = " << fit.r2 << "\n";
      }
      std::cerr << "sweep took "
                << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
                << " s\n";
      return kOk;
    }
    if (*replay) {
      if (!config.empty()) load(config, std::nullopt);
      if (log_path.empty()) log_path = out_dir + "/log.jsonl";
      if (!std::filesystem::exists(log_path)) {
        std::cerr << "no log at " << log_path << "\n";
        return kConfigError;
      }
      const perch::RunSummary s = perch::replay_log(log_path, out_dir);
      std::cout << perch::to_json(s).dump(2) << "\n";
      return kOk;
    }
  } catch (const perch::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kOk;
}
