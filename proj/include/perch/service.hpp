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

#ifndef PERCH_SERVICE_HPP_
#define PERCH_SERVICE_HPP_

#include <atomic>
#include <future>
#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "perch/config.hpp"
#include "perch/queue.hpp"

namespace httplib {
class Server;
}

namespace perch {

class Simulator;

struct ServiceOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  double speedup = 1.0;  // 0 = unthrottled
  std::string out_dir;   // empty = no log on disk
  std::size_t command_queue = 64;
  std::size_t subscriber_queue = 64;
};

using Frame = std::shared_ptr<const std::string>;

// Network-side holder of the latest snapshot and summary, and the fan-out
// point for stream subscribers. Written only by the simulation thread.
class TelemetryHub {
 public:
  explicit TelemetryHub(std::size_t subscriber_capacity) : capacity_(subscriber_capacity) {}

  void publish_state(Frame state, bool stream);
  void publish_summary(Frame summary);
  Frame state() const;
  Frame summary() const;

  std::shared_ptr<BoundedQueue<Frame>> subscribe();
  void unsubscribe(const std::shared_ptr<BoundedQueue<Frame>>& q);
  std::size_t subscribers() const;
  void close();

 private:
  std::size_t capacity_;
  mutable std::mutex m_;
  Frame state_;
  Frame summary_;
  std::list<std::shared_ptr<BoundedQueue<Frame>>> subs_;
};

struct PendingCommand {
  OperatorCommand command;
  std::shared_ptr<std::promise<CommandAck>> reply;
};

// GET /state, GET /stream, POST /command, GET /summary over HTTP, with the
// simulation on its own thread. The two threads share only the command
// queue and the hub.
class Service {
 public:
  Service(const Scenario& scenario, const ServiceOptions& options);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds and starts both threads. Returns the bound port.
  int start();
  void shutdown();
  // Blocks until shutdown() (or a fatal server error).
  void wait();

  // Same path as POST /command.
  CommandAck submit(OperatorCommand c);

  const TelemetryHub& hub() const { return hub_; }
  bool sim_done() const { return sim_done_.load(); }
  int exit_code() const { return exit_code_.load(); }

 private:
  void sim_loop();
  void setup_routes();

  Scenario scenario_;
  ServiceOptions options_;
  std::unique_ptr<Simulator> sim_;
  TelemetryHub hub_;
  BoundedQueue<PendingCommand> commands_;
  std::unique_ptr<httplib::Server> server_;
  std::thread http_thread_;
  std::thread sim_thread_;
  std::atomic<bool> stop_{false};
  std::atomic<bool> sim_done_{false};
  std::atomic<int> exit_code_{0};
  int port_ = 0;
};

}  // namespace perch

#endif  // PERCH_SERVICE_HPP_
