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


#include <cmath>
#include <complex>

#include <gtest/gtest.h>

#include "gen.hpp"
#include "perch/autonomy.hpp"
#include "perch/planner.hpp"

namespace perch {
namespace {

using testing::Gen;
using testing::kCases;

struct Model {
  Eigen::Matrix2d A;
  Eigen::Vector2d B;
  Eigen::Matrix2d Q;
  double R;
};

Model axis_model(const MpcParams& p) {
  Model m;
  m.A << 1.0, p.dt, 0.0, 1.0;
  m.B << 0.5 * p.dt * p.dt, p.dt;
  m.Q = Eigen::Matrix2d::Zero();
  m.Q(0, 0) = p.q_pos;
  m.Q(1, 1) = p.q_vel;
  m.R = p.r_acc;
  return m;
}

// Oracle: stable invariant subspace of the symplectic pencil.
Eigen::Matrix2d dare_by_eigenvectors(const Model& m) {
  const Eigen::Matrix2d Ait = m.A.inverse().transpose();
  const Eigen::Matrix2d G = m.B * m.B.transpose() / m.R;
  Eigen::Matrix4d Z;
  Z.topLeftCorner<2, 2>() = m.A + G * Ait * m.Q;
  Z.topRightCorner<2, 2>() = -G * Ait;
  Z.bottomLeftCorner<2, 2>() = -Ait * m.Q;
  Z.bottomRightCorner<2, 2>() = Ait;
  Eigen::EigenSolver<Eigen::Matrix4d> es(Z);
  Eigen::Matrix<std::complex<double>, 4, 2> V;
  int k = 0;
  for (int i = 0; i < 4 && k < 2; ++i) {
    if (std::abs(es.eigenvalues()(i)) < 1.0) V.col(k++) = es.eigenvectors().col(i);
  }
  EXPECT_EQ(k, 2);
  const Eigen::Matrix2cd X1 = V.topRows<2>();
  const Eigen::Matrix2cd X2 = V.bottomRows<2>();
  return (X2 * X1.inverse()).real();
}

TEST(Planner, DareMatchesEigenvectorOracle) {
  Gen g(51);
  for (int i = 0; i < 20; ++i) {
    MpcParams p;
    p.dt = g.uniform(0.005, 0.1);
    p.q_pos = g.uniform(0.5, 20);
    p.q_vel = g.uniform(0.1, 5);
    p.r_acc = g.uniform(0.2, 5);
    const Model m = axis_model(p);
    const Eigen::Matrix2d P = solve_dare(m.A, m.B, m.Q, m.R);
    const Eigen::Matrix2d O = dare_by_eigenvectors(m);
    EXPECT_LT((P - O).cwiseAbs().maxCoeff(), 1e-6 * O.cwiseAbs().maxCoeff());
  }
}

TEST(Planner, TerminalCostMakesGainsStationary) {
  MpcParams p;
  const AxisMpc mpc(p);
  const Model m = axis_model(p);
  const Eigen::Matrix2d& P = mpc.terminal_cost();
  const Eigen::RowVector2d K = (m.B.transpose() * P * m.A) / (m.R + m.B.dot(P * m.B));
  for (const auto& k : mpc.gains()) EXPECT_LT((k - K).cwiseAbs().maxCoeff(), 1e-6);
  const Eigen::Matrix2d cl = m.A - m.B * mpc.gain();
  EXPECT_LT(Eigen::EigenSolver<Eigen::Matrix2d>(cl).eigenvalues().cwiseAbs().maxCoeff(), 1.0);
}

TEST(Planner, ConvergesToReferenceFromRandomStarts) {
  Gen g(52);
  const Planner planner;
  for (int i = 0; i < kCases; ++i) {
    Vec3 p = g.vec(-3, 3);
    Vec3 v = g.vec(-1, 1);
    const TrajectoryReference ref{g.vec(-3, 3), {}, 0.0};
    for (int k = 0; k < 1500; ++k) {
      const TrajectorySetpoint sp = planner.plan_step(p, v, ref);
      EXPECT_LE(norm(sp.acceleration), planner.params().accel_limit + 1e-9);
      p = sp.position;
      v = sp.velocity;
    }
    EXPECT_LT(norm(p - ref.position), 1e-3);
  }
}

TEST(Planner, HoldsWhenGoalIsInsideObstacleMargin) {
  const Planner planner;
  const Vec3 here{1, 2, 3};
  const TrajectorySetpoint sp =
      planner.plan_step(here, {}, {{0, 0, 10}, {}, 0.0}, {{0, 0, 10.1}});
  EXPECT_TRUE(sp.held);
  EXPECT_LT(norm(sp.acceleration), 1e-12);
}

TEST(Planner, ValidationRejectsNonsense) {
  MpcParams p;
  p.horizon = 0;
  EXPECT_THROW(validate(p), ConfigError);
}

TEST(Autonomy, AlignedYawPutsBodyYAlongTheLine) {
  Gen g(53);
  for (int i = 0; i < kCases; ++i) {
    const double a = g.uniform(-3.1, 3.1);
    const Vec3 d{std::cos(a), std::sin(a), 0.0};
    const double cur = g.uniform(-3.1, 3.1);
    const double y = aligned_yaw(d, cur);
    EXPECT_NEAR(std::abs(dot(body_y_axis(y), d)), 1.0, 1e-9);
    EXPECT_LE(std::abs(wrap_angle(y - cur)), std::numbers::pi / 2 + 1e-9);
  }
}

TEST(Autonomy, TrackWorldPositionInvertsProjection) {
  Gen g(54);
  const Vec3 dir{0, 1, 0};
  const PlaneBasis b = plane_basis(dir);
  for (int i = 0; i < kCases; ++i) {
    const Vec3 drone = g.vec(-5, 5);
    Vec3 cable = g.vec(-5, 5);
    cable.y = drone.y;
    Track t;
    t.position = project_point(cable - drone, b);
    EXPECT_LT(norm(track_world_position(t, drone, dir) - cable), 1e-12);
  }
}

// Ideal closed loop: perfect tracks, the gripper mechanism, an MMC that
// reports Closed with ample force once captured.
struct LandingLoop {
  PowerlineSpec line = default_powerline();
  GripperGeometry geo;
  LandingParams landing;
  Autonomy autonomy;
  DroneState drone;
  GripperState gripper;
  std::vector<ManeuverEvent> events;
  double t = 0.0;
  double kick = 0.0;
  double kick_at = -1.0;
  bool attached = false;

  void init() {
    MpcParams mp;
    autonomy = Autonomy(Planner(mp), landing, {}, {}, geo, 1.0);
    drone.position = {0.3, 50.0, 7.5};
    autonomy.start_landing();
  }

  void run(double seconds) {
    const PlaneBasis b = plane_basis({0, 1, 0});
    for (; t < seconds && !attached; t += 0.01) {
      AutonomyInputs in;
      in.t = t;
      in.drone = drone;
      for (int i = 0; i < 3; ++i) {
        Track tr;
        tr.id = i + 1;
        tr.confirmed = true;
        tr.position = project_point(nearest_point_on_cable(line.cables[i], drone.position).point -
                                        drone.position, b);
        in.tracks.push_back(tr);
      }
      in.gripper = gripper;
      if (gripper.phase == GripperPhase::Closed) {
        in.mmc.gripper_status = GripperStatus::Closed;
        in.mmc.holding_force = 1000.0;
      }
      const AutonomyOutputs out = autonomy.tick(in);
      events.insert(events.end(), out.events.begin(), out.events.end());
      if (out.request_disarm_attach) {
        attached = true;
        break;
      }
      if (gripper.phase != GripperPhase::Closed) {
        drone = step_drone(drone, out.accel_cmd, out.yaw_rate_cmd, 0.01, {}, true);
        if (kick_at >= 0.0 && autonomy.ascent_start() >= 0.0 &&
            t - autonomy.ascent_start() >= kick_at) {
          drone.position.x += kick;
          kick_at = -1.0;
        }
      }
      const Track* target = &in.tracks[1];
      MechanismInput mi;
      mi.lateral_error = target->position.x();
      mi.vertical_offset = target->position.y();
      mi.vertical_velocity = drone.velocity.z;
      gripper = update_mechanism(gripper, geo, mi);
    }
  }

  int count(ManeuverEventKind k) const {
    int n = 0;
    for (const auto& e : events) n += e.maneuver == ManeuverKind::LandOnCable && e.kind == k;
    return n;
  }
};

TEST(Autonomy, LandingCapturesAndRequestsDisarm) {
  LandingLoop loop;
  loop.init();
  loop.run(60.0);
  EXPECT_TRUE(loop.attached);
  EXPECT_EQ(loop.gripper.phase, GripperPhase::Closed);
  EXPECT_EQ(loop.count(ManeuverEventKind::Started), 1);
  EXPECT_EQ(loop.count(ManeuverEventKind::Succeeded), 1);
  EXPECT_EQ(loop.count(ManeuverEventKind::Aborted), 0);
  EXPECT_EQ(loop.autonomy.attempts(), 1);
}

TEST(Autonomy, LateralKickDuringAscentAbortsThenRetries) {
  LandingLoop loop;
  loop.kick = 0.2;
  loop.kick_at = 0.5;
  loop.init();
  loop.run(60.0);
  EXPECT_TRUE(loop.attached);
  EXPECT_EQ(loop.count(ManeuverEventKind::Aborted), 1);
  EXPECT_EQ(loop.autonomy.aborts(), 1);
  EXPECT_EQ(loop.autonomy.attempts(), 2);
}

TEST(Autonomy, AttemptLimitFailsTheLanding) {
  LandingLoop loop;
  loop.landing.max_attempts = 1;
  loop.kick = 0.2;
  loop.kick_at = 0.5;
  loop.init();
  loop.run(60.0);
  EXPECT_FALSE(loop.attached);
  EXPECT_EQ(loop.count(ManeuverEventKind::Failed), 1);
  EXPECT_EQ(loop.autonomy.active(), ManeuverKind::Hover);
}

TEST(Autonomy, TakeoffRefusedBelowLiftOffFloor) {
  Autonomy a(Planner(), {}, {}, {}, {}, 1.0);
  a.start_takeoff({0, 50, 9.5});
  AutonomyInputs in;
  in.drone.armed = false;
  in.drone.attached = true;
  in.can_lift_off = false;
  const AutonomyOutputs out = a.tick(in);
  ASSERT_EQ(out.events.size(), 2u);
  EXPECT_EQ(out.events[1].kind, ManeuverEventKind::Failed);
  EXPECT_EQ(out.events[1].reason, "battery below lift-off floor");
  EXPECT_FALSE(out.request_arm);
  EXPECT_FALSE(out.mmc_command.has_value());
}

TEST(Autonomy, TakeoffSpoolsOpensAndDetaches) {
  Autonomy a(Planner(), {}, {}, {}, {}, 1.0);
  a.start_takeoff({0, 50, 9.5});
  AutonomyInputs in;
  in.drone.position = {0, 50, 9.35};
  in.drone.armed = false;
  in.drone.attached = true;
  in.gripper.phase = GripperPhase::Closed;
  AutonomyOutputs out = a.tick(in);
  EXPECT_TRUE(out.request_arm);
  in.drone.armed = true;
  bool opened = false;
  for (in.t = 0.01; in.t < 2.5 && !opened; in.t += 0.01) {
    out = a.tick(in);
    opened = out.mmc_command == MmcCommand::Open;
  }
  ASSERT_TRUE(opened);
  EXPECT_EQ(a.takeoff_phase(), TakeoffPhase::Opening);
  in.gripper.phase = GripperPhase::Open;
  out = a.tick(in);
  EXPECT_TRUE(out.request_detach);
  EXPECT_EQ(a.takeoff_phase(), TakeoffPhase::Descending);
}

}  // namespace
}  // namespace perch
