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

#include "perch/simulator.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace perch {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr double kDcLinkTau = 0.1;  // s

std::string maneuver_detail(const ManeuverEvent& e) {
  std::string d = std::string(to_string(e.maneuver)) + " " + std::string(to_string(e.kind));
  if (!e.reason.empty()) d += ": " + e.reason;
  return d;
}

}  // namespace

Simulator::Simulator(const Scenario& scenario)
    : sc_(scenario),
      clock_(scenario.clock.flight_dt, scenario.clock.circuit_dt, scenario.clock.realtime_factor),
      rng_(scenario.seed),
      drone_(scenario.drone.initial),
      battery_(make_battery(scenario.powertrain.battery, scenario.drone.initial_soc)),
      mmc_(scenario.circuit, scenario.mmc, scenario.powerline.line_frequency,
           scenario.clock.circuit_dt),
      perception_(scenario.sensor, scenario.tracker) {
  sc_.mpc.dt = sc_.clock.flight_dt;
  sc_.mpc.accel_limit = sc_.drone.limits.accel_limit;
  validate(sc_);
  autonomy_ = Autonomy(Planner(sc_.mpc), sc_.landing, sc_.takeoff, sc_.hover, sc_.gripper,
                       sc_.drone.limits.max_yaw_rate);
  odom_anchor_ = drone_.position;
  odom_yaw_ = drone_.yaw;
  update_gripper(0.0);
  latest_ = make_record();
}

bool Simulator::mission_failed() const {
  return outcome_ == "incomplete" || outcome_.rfind("failed", 0) == 0;
}

void Simulator::event(std::string type, std::string detail) {
  events_.push_back({std::move(type), std::move(detail)});
}

std::optional<OperatorCommand> Simulator::scripted_command(const char*& source) {
  if (!memory_.started && !memory_.finished && sc_.mission.autostart && !autostart_sent_) {
    autostart_sent_ = true;
    source = "config";
    return OperatorCommand::StartMission;
  }
  const OperatorScript& op = sc_.operator_script;
  source = "script";
  if (op.mode == OperatorMode::Timed && next_timed_ < op.commands.size() &&
      clock_.t() >= op.commands[next_timed_].t) {
    return op.commands[next_timed_++].command;
  }
  if (op.mode == OperatorMode::SocSwing && memory_.started) {
    if (memory_.state == MissionState::Inspecting && battery_.soc <= op.initiate_below) {
      return OperatorCommand::InitiateCharging;
    }
    if (memory_.state == MissionState::Charging && battery_.soc >= op.interrupt_above &&
        can_lift_off(battery_, sc_.powertrain)) {
      return OperatorCommand::InterruptCharging;
    }
  }
  return std::nullopt;
}

void Simulator::apply_actions(const std::vector<MissionAction>& actions) {
  for (MissionAction a : actions) {
    switch (a) {
      case MissionAction::BeginInspecting:
        autonomy_.start_fly_to_cable(sc_.mission.inspect_hover_offset);
        break;
      case MissionAction::BeginLanding:
        ++landings_started_;
        autonomy_.start_landing();
        break;
      case MissionAction::BeginTakeoff: {
        const CableSpec& c = sc_.powerline.cables[attach_cable_];
        autonomy_.start_takeoff(cable_point_at(c, attach_s_, clock_.t()));
        break;
      }
      case MissionAction::HoldCharging:
        break;
      case MissionAction::Finish:
        if (!drone_.attached) autonomy_.start_hover(drone_.position);
        break;
    }
  }
}

void Simulator::run_fsm(std::optional<OperatorCommand> cmd, const char* source,
                        std::optional<CommandAck>* ack) {
  FsmInputs in;
  in.battery_voltage = battery_.terminal_voltage;
  in.can_lift_off = can_lift_off(battery_, sc_.powertrain);
  in.command = cmd;
  if (!ack) in.events = maneuver_events_;
  const MissionState before = memory_.state;
  const FsmResult r = step_fsm(memory_, sc_.mission, in);
  if (cmd && r.ack) {
    std::string d = std::string(wire_name(*cmd)) + (r.ack->accepted ? " accepted" : " rejected");
    if (!r.ack->reason.empty()) d += ": " + r.ack->reason;
    d += std::string(" (") + source + ")";
    event("command", d);
    if (ack) *ack = r.ack;
  }
  memory_ = r.memory;
  if (memory_.state != before) {
    event("mission", std::string(to_string(before)) + "->" + std::string(to_string(memory_.state)));
  }
  for (MissionAction a : r.actions) {
    if (a == MissionAction::Finish) event("mission", "finished");
  }
  apply_actions(r.actions);
}

void Simulator::update_gripper(double t) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sc_.powerline.cables.size(); ++i) {
    const NearestPoint np = nearest_point_on_cable(sc_.powerline.cables[i], drone_.position);
    if (np.distance < best) {
      best = np.distance;
      cable_index_ = static_cast<int>(i);
      cable_s_ = np.s;
    }
  }
  if (drone_.attached || t <= 0.0) return;

  const CableSpec& cable = sc_.powerline.cables[cable_index_];
  const Vec3 c = cable_point_at(cable, cable_s_, t);
  const PlaneBasis basis = plane_basis(cable_tangent(cable, cable_s_));
  MechanismInput in;
  in.lateral_error = dot(c - drone_.position, basis.u);
  in.vertical_offset = c.z - drone_.position.z;
  in.vertical_velocity = drone_.velocity.z;
  in.dt = clock_.flight_dt();
  const GripperPhase before = gripper_.phase;
  gripper_ = update_mechanism(gripper_, sc_.gripper, in);

  if (gripper_.in_guides && gripper_.phase != GripperPhase::Closed) {
    const double hw = funnel_halfwidth(sc_.gripper, guide_depth(sc_.gripper, in.vertical_offset));
    if (std::abs(in.lateral_error) > hw) {
      const double excess = in.lateral_error - std::copysign(hw, in.lateral_error);
      drone_.position += basis.u * excess;
      drone_.velocity -= basis.u * dot(drone_.velocity, basis.u);
    }
  }
  if (gripper_.phase != before) {
    event("gripper", std::string(to_string(before)) + "->" + std::string(to_string(gripper_.phase)));
  }
}

void Simulator::run_circuit(double t) {
  const bool core_closed = gripper_.phase == GripperPhase::Closed;
  if (gripper_.phase == GripperPhase::Open && mmc_.dormant()) return;
  const int n = clock_.substeps();
  const int spc = static_cast<int>(
      std::lround(1.0 / (sc_.powerline.line_frequency * clock_.circuit_dt())));
  const double amp = std::sqrt(2.0) * sc_.powerline.current_rms(t);
  const std::int64_t base = clock_.steps() * n;
  const MmcMode before = mmc_.mode();
  for (int k = 0; k < n; ++k) {
    const int phase = static_cast<int>((base + k) % spc);
    const double ip =
        core_closed ? amp * std::sin(2.0 * std::numbers::pi * phase / spc) : 0.0;
    mmc_.substep(ip, phase, battery_.terminal_voltage, core_closed);
    if (trace_remaining_ > 0) {
      --trace_remaining_;
      const CircuitState& s = mmc_.circuit();
      trace_.push_back({static_cast<double>(base + k) * clock_.circuit_dt(), s.ip_inst, s.im,
                        s.i_load, s.sw1_current, s.sw1, s.bus_power, s.battery_drain});
    }
  }
  if (mmc_.mode() != before) {
    event("mmc_mode", std::string(to_string(before)) + "->" + std::string(to_string(mmc_.mode())));
  }
}

void Simulator::release_from_cable() {
  const AttachResult r = detach(drone_, gripper_);
  if (!r.ok) {
    event("detach", "refused: " + r.reason);
    return;
  }
  drone_ = r.drone;
  gripper_ = GripperState{};
  perception_.reset();
  odom_anchor_ = drone_.position;
  odom_yaw_ = drone_.yaw;
  event("detach", "released from cable");
}

std::optional<CommandAck> Simulator::step(std::optional<OperatorCommand> external) {
  if (done_) return std::nullopt;
  events_.clear();
  std::optional<CommandAck> ack;
  const double t = clock_.t();
  const double dt = clock_.flight_dt();

  // Operator input: an external command takes the step, scripted input
  // waits for the next free one.
  const char* source = "operator";
  std::optional<OperatorCommand> cmd = external;
  if (!cmd) cmd = scripted_command(source);
  run_fsm(cmd, source, &ack);

  if (!drone_.attached) {
    OdometryDelta odom;
    odom.translation = drone_.position - odom_anchor_;
    odom.yaw_delta = wrap_angle(drone_.yaw - odom_yaw_);
    if (sc_.drone.odometry_noise > 0.0) {
      std::normal_distribution<double> n(0.0, sc_.drone.odometry_noise);
      odom.translation += Vec3{n(rng_), n(rng_), n(rng_)};
      odom.noise_scale = sc_.drone.odometry_noise;
    }
    perception_.step(sc_.powerline, drone_, odom, t, rng_);
    odom_anchor_ = drone_.position;
    odom_yaw_ = drone_.yaw;
  }

  AutonomyInputs ai;
  ai.t = t;
  ai.drone = drone_;
  ai.tracks = perception_.tracks().tracks();
  ai.direction = perception_.direction();
  ai.gripper = gripper_;
  ai.mmc = mmc_.telemetry();
  ai.can_lift_off = can_lift_off(battery_, sc_.powertrain);
  AutonomyOutputs out = autonomy_.tick(ai);
  maneuver_events_ = out.events;
  for (const auto& e : out.events) event("maneuver", maneuver_detail(e));

  if (out.mmc_command) {
    mmc_.command(*out.mmc_command);
    event("mmc_command", std::string(to_string(*out.mmc_command)));
    if (*out.mmc_command == MmcCommand::Closed && sc_.telemetry.circuit_trace_cycles > 0) {
      trace_remaining_ = static_cast<long>(sc_.telemetry.circuit_trace_cycles) *
                         std::lround(1.0 / (sc_.powerline.line_frequency * clock_.circuit_dt()));
    }
  }
  if (out.request_arm && !drone_.armed) {
    drone_.armed = true;
    event("arm", "armed");
  }

  // Vehicle motion.
  const double t_next = t + dt;
  if (drone_.attached) {
    const CableSpec& c = sc_.powerline.cables[attach_cable_];
    drone_.position = cable_point_at(c, attach_s_, t_next) - Vec3{0.0, 0.0, sc_.gripper.core_height()};
    drone_.velocity = {};
  } else if (gripper_.phase == GripperPhase::Closed) {
    const CableSpec& c = sc_.powerline.cables[cable_index_];
    drone_.position = cable_point_at(c, cable_s_, t_next) - Vec3{0.0, 0.0, sc_.gripper.core_height()};
    drone_.velocity = {};
    drone_.yaw = wrap_angle(drone_.yaw + out.yaw_rate_cmd * dt);
  } else {
    drone_ = step_drone(drone_, out.accel_cmd, out.yaw_rate_cmd, dt, sc_.drone.limits,
                        can_lift_off(battery_, sc_.powertrain));
  }

  const DisturbanceConfig& dist = sc_.disturbance;
  if (dist.enabled && !disturbance_fired_ && landings_started_ == dist.landing_index &&
      autonomy_.active() == ManeuverKind::LandOnCable && autonomy_.attempts() == 1 &&
      autonomy_.ascent_start() >= 0.0 && t_next - autonomy_.ascent_start() >= dist.delay) {
    disturbance_fired_ = true;
    const PlaneBasis basis = plane_basis(perception_.direction().direction);
    drone_.position += basis.u * dist.magnitude;
    event("disturbance", "lateral " + std::to_string(dist.magnitude) + " m");
  }

  const GripperPhase grip_before = gripper_.phase;
  update_gripper(t_next);
  const bool closed_now = grip_before != GripperPhase::Closed && gripper_.phase == GripperPhase::Closed;

  run_circuit(t);

  const GripperPhase pre_release = gripper_.phase;
  gripper_ = release_if_unheld(gripper_, mmc_.telemetry().holding_force,
                               sc_.mmc.release_force, out.pressing || closed_now);
  if (gripper_.phase != pre_release) {
    event("gripper", std::string(to_string(pre_release)) + "->" + std::string(to_string(gripper_.phase)));
    // An open core no longer holds the vehicle.
    if (drone_.attached) release_from_cable();
  }

  // The DC link buffers the half-cycle energy pulses before the pack.
  const double charge_j = mmc_.take_charge_energy();
  const double drain_j = mmc_.take_drain_energy();
  dc_link_j_ += charge_j - drain_j;
  const double delivered_j = dc_link_j_ * (1.0 - std::exp(-dt / kDcLinkTau));
  dc_link_j_ -= delivered_j;
  const double hover = drone_.armed ? hover_power(drone_.mass, sc_.powertrain) : 0.0;
  net_power_ = -hover + delivered_j / dt;
  battery_ = step_battery(battery_, sc_.powertrain.battery, net_power_, dt);
  energy_in_wh_ += charge_j / 3600.0;
  energy_out_wh_ += (hover * dt + drain_j) / 3600.0;

  if (out.request_disarm_attach) {
    const CableSpec& c = sc_.powerline.cables[cable_index_];
    const AttachResult r = attach(drone_, gripper_, mmc_.telemetry().holding_force, c, cable_s_,
                                  sc_.gripper, t_next);
    if (r.ok) {
      drone_ = r.drone;
      drone_.armed = false;
      attach_cable_ = cable_index_;
      attach_s_ = cable_s_;
      event("attach", "disarmed on cable " + std::to_string(c.phase_id));
    } else {
      event("attach", "refused: " + r.reason);
    }
  }
  if (out.request_detach && drone_.attached) release_from_cable();

  // Maneuver outcomes reach the mission in the step they happen.
  if (!maneuver_events_.empty()) run_fsm(std::nullopt, "", nullptr);
  maneuver_events_.clear();
  last_out_ = out;

  clock_.advance();
  if (!drone_.attached && drone_.position.z <= sc_.drone.limits.ground_z) {
    done_ = true;
    outcome_ = "failed: ground contact";
    event("fault", "ground contact");
  } else if (memory_.finished) {
    done_ = true;
    const bool short_run =
        sc_.mission.max_cycles > 0 && memory_.cycles_completed < sc_.mission.max_cycles;
    outcome_ = short_run ? "incomplete" : "completed";
  } else if (clock_.t() >= sc_.clock.duration - 0.5 * dt) {
    done_ = true;
    const bool short_run =
        sc_.mission.max_cycles > 0 && memory_.cycles_completed < sc_.mission.max_cycles;
    outcome_ = short_run ? "incomplete" : "completed";
  }
  if (done_) event("run", outcome_);

  latest_ = make_record();
  logged_ = clock_.steps() % sc_.telemetry.log_every == 0 || !latest_.events.empty();
  return ack;
}

TelemetryRecord Simulator::make_record() const {
  TelemetryRecord r;
  r.step = clock_.steps();
  r.t = clock_.t();
  r.mission_state = std::string(to_string(memory_.state));
  r.mission_started = memory_.started;
  r.cycles_completed = memory_.cycles_completed;
  r.landing_attempts = memory_.landing_attempts;
  r.position = drone_.position;
  r.velocity = drone_.velocity;
  r.yaw = drone_.yaw;
  r.altitude = drone_.position.z - sc_.drone.limits.ground_z;
  r.armed = drone_.armed;
  r.attached = drone_.attached;
  r.soc = battery_.soc;
  r.battery_voltage = battery_.terminal_voltage;
  r.net_power = net_power_;
  r.energy_in_wh = energy_in_wh_;
  r.energy_out_wh = energy_out_wh_;
  const MmcTelemetry& m = mmc_.telemetry();
  r.mmc_mode = std::string(to_string(mmc_.mode()));
  r.gripper_status = std::string(to_string(m.gripper_status));
  const bool powered = mmc_.mode() == MmcMode::Mode1_DC || mmc_.mode() == MmcMode::Mode2_Charging;
  r.charging_power = powered ? m.charging_power : 0.0;
  r.holding_force = m.holding_force;
  r.im_mean_abs = m.im_mean_abs;
  r.ip_rms = m.ip_rms;
  r.window_start_deg = mmc_.pno().window.start_phase * kRadToDeg;
  r.window_width_deg = mmc_.pno().window.width * kRadToDeg;
  r.gripper_phase = std::string(to_string(gripper_.phase));
  r.engagement_progress = gripper_.engagement_progress;
  r.maneuver = std::string(to_string(autonomy_.active()));
  r.maneuver_phase = std::string(autonomy_.phase_name());
  r.lateral_error = last_out_.lateral_error;
  r.setpoint = last_out_.setpoint.position;
  r.aborts = autonomy_.aborts();
  r.confirmed_tracks = perception_.tracks().confirmed_count();
  r.events = events_;
  return r;
}

}  // namespace perch
