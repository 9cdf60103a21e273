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

#include "perch/planner.hpp"

#include <cmath>

#include "perch/geometry.hpp"

namespace perch {

void validate(const MpcParams& p) {
  if (p.horizon < 1) throw ConfigError("mpc horizon must be >= 1");
  if (!(p.dt > 0.0)) throw ConfigError("mpc dt must be positive");
  if (!(p.q_pos > 0.0) || !(p.q_vel >= 0.0) || !(p.r_acc > 0.0)) {
    throw ConfigError("mpc weights must be positive");
  }
  if (!(p.accel_limit > 0.0)) throw ConfigError("mpc accel_limit must be positive");
  if (!(p.obstacle_margin >= 0.0)) throw ConfigError("obstacle_margin must be >= 0");
}

Eigen::Matrix2d solve_dare(const Eigen::Matrix2d& A, const Eigen::Vector2d& B,
                           const Eigen::Matrix2d& Q, double R) {
  Eigen::Matrix2d P = Q;
  for (int i = 0; i < 100000; ++i) {
    const double s = R + B.dot(P * B);
    const Eigen::RowVector2d K = (B.transpose() * P * A) / s;
    Eigen::Matrix2d next = Q + A.transpose() * P * A - (A.transpose() * P * B) * K;
    next = 0.5 * (next + next.transpose());
    const double delta = (next - P).cwiseAbs().maxCoeff();
    P = next;
    if (delta < 1e-12 * std::max(1.0, P.cwiseAbs().maxCoeff())) break;
  }
  return P;
}

AxisMpc::AxisMpc(const MpcParams& params) {
  const double dt = params.dt;
  Eigen::Matrix2d A;
  A << 1.0, dt, 0.0, 1.0;
  const Eigen::Vector2d B(0.5 * dt * dt, dt);
  Eigen::Matrix2d Q = Eigen::Matrix2d::Zero();
  Q(0, 0) = params.q_pos;
  Q(1, 1) = params.q_vel;
  const double R = params.r_acc;

  terminal_ = solve_dare(A, B, Q, R);
  gains_.assign(params.horizon, Eigen::RowVector2d::Zero());
  Eigen::Matrix2d P = terminal_;
  for (int k = params.horizon - 1; k >= 0; --k) {
    const double s = R + B.dot(P * B);
    const Eigen::RowVector2d K = (B.transpose() * P * A) / s;
    gains_[k] = K;
    P = Q + A.transpose() * P * (A - B * K);
    P = 0.5 * (P + P.transpose());
  }
}

double AxisMpc::control(double p, double v, double p_ref, double v_ref) const {
  // A constant-velocity reference is itself a zero-input trajectory, so the
  // tracking error obeys the same dynamics.
  return -gain().dot(Eigen::Vector2d(p - p_ref, v - v_ref));
}

Planner::Planner(const MpcParams& params) : params_(params), axis_(params) {}

TrajectorySetpoint Planner::plan_step(const Vec3& position, const Vec3& velocity,
                                      const TrajectoryReference& ref,
                                      const std::vector<Vec3>& obstacles) const {
  TrajectoryReference r = ref;
  bool held = false;
  for (const auto& o : obstacles) {
    if (norm(ref.position - o) < params_.obstacle_margin) {
      held = true;
      break;
    }
  }
  if (held) {
    r.position = position;
    r.velocity = {};
  }
  Vec3 a{axis_.control(position.x, velocity.x, r.position.x, r.velocity.x),
         axis_.control(position.y, velocity.y, r.position.y, r.velocity.y),
         axis_.control(position.z, velocity.z, r.position.z, r.velocity.z)};
  const double n = norm(a);
  if (n > params_.accel_limit) a = a * (params_.accel_limit / n);

  const double dt = params_.dt;
  TrajectorySetpoint sp;
  sp.acceleration = a;
  sp.velocity = velocity + a * dt;
  sp.position = position + velocity * dt + a * (0.5 * dt * dt);
  sp.yaw = r.yaw;
  sp.held = held;
  return sp;
}

}  // namespace perch
