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

#include "perch/service.hpp"

#include <filesystem>
#include <fstream>

#include <httplib.h>

#include "perch/runner.hpp"
#include "perch/simulator.hpp"

namespace perch {

using nlohmann::json;

void TelemetryHub::publish_state(Frame state, bool stream) {
  std::lock_guard<std::mutex> lk(m_);
  state_ = state;
  if (!stream) return;
  for (auto& q : subs_) q->push_drop_oldest(state);
}

void TelemetryHub::publish_summary(Frame summary) {
  std::lock_guard<std::mutex> lk(m_);
  summary_ = std::move(summary);
}

Frame TelemetryHub::state() const {
  std::lock_guard<std::mutex> lk(m_);
  return state_;
}

Frame TelemetryHub::summary() const {
  std::lock_guard<std::mutex> lk(m_);
  return summary_;
}

std::shared_ptr<BoundedQueue<Frame>> TelemetryHub::subscribe() {
  auto q = std::make_shared<BoundedQueue<Frame>>(capacity_);
  std::lock_guard<std::mutex> lk(m_);
  subs_.push_back(q);
  return q;
}

void TelemetryHub::unsubscribe(const std::shared_ptr<BoundedQueue<Frame>>& q) {
  q->close();
  std::lock_guard<std::mutex> lk(m_);
  subs_.remove(q);
}

std::size_t TelemetryHub::subscribers() const {
  std::lock_guard<std::mutex> lk(m_);
  return subs_.size();
}

void TelemetryHub::close() {
  std::lock_guard<std::mutex> lk(m_);
  for (auto& q : subs_) q->close();
}

Service::Service(const Scenario& scenario, const ServiceOptions& options)
    : scenario_(scenario),
      options_(options),
      sim_(std::make_unique<Simulator>(scenario)),
      hub_(options.subscriber_queue),
      commands_(options.command_queue),
      server_(std::make_unique<httplib::Server>()) {
  hub_.publish_state(std::make_shared<const std::string>(to_jsonl(sim_->latest())), false);
  SummaryBuilder b;
  b.add(sim_->latest());
  hub_.publish_summary(std::make_shared<const std::string>(to_json(b.summary()).dump()));
  setup_routes();
}

Service::~Service() { shutdown(); }

namespace {

void reply_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

}  // namespace

void Service::setup_routes() {
  auto& svr = *server_;
  svr.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Headers", "Content-Type"}});
  svr.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  svr.Get("/state", [this](const httplib::Request&, httplib::Response& res) {
    res.set_content(*hub_.state(), "application/json");
  });

  svr.Get("/summary", [this](const httplib::Request&, httplib::Response& res) {
    res.set_content(*hub_.summary(), "application/json");
  });

  svr.Post("/command", [this](const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::exception&) {
      reply_json(res, 400, {{"accepted", false}, {"reason", "body is not JSON"}});
      return;
    }
    if (!body.is_object() || !body.contains("command") || !body["command"].is_string()) {
      reply_json(res, 400, {{"accepted", false}, {"reason", "missing string field 'command'"}});
      return;
    }
    const auto cmd = parse_operator_command(body["command"].get<std::string>());
    if (!cmd) {
      reply_json(res, 400, {{"accepted", false}, {"reason", "unknown command"}});
      return;
    }
    const CommandAck ack = submit(*cmd);
    reply_json(res, 200, {{"command", wire_name(*cmd)},
                          {"accepted", ack.accepted},
                          {"reason", ack.reason}});
  });

  svr.Get("/stream", [this](const httplib::Request&, httplib::Response& res) {
    auto q = hub_.subscribe();
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider(
        "application/x-ndjson",
        [this, q](std::size_t, httplib::DataSink& sink) {
          if (stop_.load()) {
            sink.done();
            return false;
          }
          auto frame = q->pop_for(std::chrono::milliseconds(500));
          if (!frame) {
            if (q->closed()) {
              sink.done();
              return false;
            }
            return true;
          }
          const std::string line = **frame + "\n";
          return sink.write(line.data(), line.size());
        },
        [this, q](bool) { hub_.unsubscribe(q); });
  });
}

CommandAck Service::submit(OperatorCommand c) {
  auto promise = std::make_shared<std::promise<CommandAck>>();
  auto fut = promise->get_future();
  if (!commands_.push({c, promise})) return {false, "command queue full"};
  if (fut.wait_for(std::chrono::seconds(10)) != std::future_status::ready) {
    return {false, "simulation did not respond"};
  }
  return fut.get();
}

int Service::start() {
  if (options_.port == 0) {
    port_ = server_->bind_to_any_port(options_.host);
  } else {
    port_ = server_->bind_to_port(options_.host, options_.port) ? options_.port : -1;
  }
  if (port_ < 0) throw std::runtime_error("cannot bind " + options_.host + ":" +
                                          std::to_string(options_.port));
  http_thread_ = std::thread([this] { server_->listen_after_bind(); });
  sim_thread_ = std::thread([this] { sim_loop(); });
  return port_;
}

void Service::shutdown() {
  if (stop_.exchange(true)) return;
  commands_.close();
  hub_.close();
  server_->stop();
  if (http_thread_.joinable()) http_thread_.join();
  if (sim_thread_.joinable()) sim_thread_.join();
}

void Service::wait() {
  if (http_thread_.joinable()) http_thread_.join();
}

void Service::sim_loop() {
  Simulator& sim = *sim_;
  std::ofstream log;
  if (!options_.out_dir.empty()) {
    std::filesystem::create_directories(options_.out_dir);
    log.open(std::filesystem::path(options_.out_dir) / "log.jsonl");
    if (log) log << log_header() << '\n';
  }
  SummaryBuilder summary;
  const long stride = std::max(
      1L, std::lround(1.0 / (scenario_.telemetry.stream_hz * scenario_.clock.flight_dt)));

  auto record = [&](bool force) {
    const TelemetryRecord& r = sim.latest();
    if (sim.latest_logged()) {
      summary.add(r);
      if (log.is_open()) log << to_jsonl(r) << '\n';
    }
    const bool tick = r.step % stride == 0;
    if (tick || force || sim.done()) {
      hub_.publish_state(std::make_shared<const std::string>(to_jsonl(r)), tick || sim.done());
      hub_.publish_summary(std::make_shared<const std::string>(to_json(summary.summary()).dump()));
    }
    if (sim.done() && !sim_done_.exchange(true)) {
      exit_code_ = sim.mission_failed() ? 2 : 0;
      if (log.is_open()) log.flush();
    }
  };
  auto reply = [](PendingCommand& p, const std::optional<CommandAck>& ack) {
    p.reply->set_value(ack.value_or(CommandAck{false, "command not consumed"}));
  };

  record(false);
  Pacer pacer(options_.speedup);
  bool running = scenario_.mission.autostart;
  while (!stop_.load()) {
    if (!running || sim.done()) {
      auto p = commands_.pop_for(std::chrono::milliseconds(100));
      if (!p) continue;
      if (sim.done()) {
        p->reply->set_value({false, "mission finished"});
      } else if (p->command != OperatorCommand::StartMission) {
        p->reply->set_value({false, "mission not started"});
      } else {
        running = true;
        pacer.reset(sim.clock().t());
        const auto ack = sim.step(p->command);
        reply(*p, ack);
        record(true);
      }
      continue;
    }
    auto p = commands_.try_pop();
    const auto ack = sim.step(p ? std::optional<OperatorCommand>(p->command) : std::nullopt);
    if (p) reply(*p, ack);
    record(p.has_value());
    pacer.wait_until(sim.clock().t());
  }
  while (auto p = commands_.try_pop()) p->reply->set_value({false, "service stopping"});
}

}  // namespace perch
