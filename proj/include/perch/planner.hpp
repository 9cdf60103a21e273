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

#ifndef PERCH_PLANNER_HPP_
#define PERCH_PLANNER_HPP_

#include <vector>

#include <Eigen/Dense>

#include "perch/vec3.hpp"

namespace perch {

struct MpcParams {
  int horizon = 20;
  double dt = 0.01;
  double q_pos = 9.0;
  double q_vel = 1.0;
  double r_acc = 1.0;
  double accel_limit = 3.0;      // m/s^2, norm
  double obstacle_margin = 0.3;  // m
};

void validate(const MpcParams& p);

// Infinite-horizon cost-to-go of the per-axis double integrator, used as
// the terminal weight.
Eigen::Matrix2d solve_dare(const Eigen::Matrix2d& A, const Eigen::Vector2d& B,
                           const Eigen::Matrix2d& Q, double R);

// Per-axis finite-horizon LQ tracker over x = [p, v], u = a.
class AxisMpc {
 public:
  explicit AxisMpc(const MpcParams& params = {});

  // First-step feedback gain of the H-step problem.
  const Eigen::RowVector2d& gain() const { return gains_.front(); }
  const std::vector<Eigen::RowVector2d>& gains() const { return gains_; }
  const Eigen::Matrix2d& terminal_cost() const { return terminal_; }

  // Unconstrained first control for tracking a constant-velocity
  // reference (p_ref + v_ref k dt).
  double control(double p, double v, double p_ref, double v_ref) const;

 private:
  std::vector<Eigen::RowVector2d> gains_;
  Eigen::Matrix2d terminal_;
};

struct TrajectoryReference {
  Vec3 position;
  Vec3 velocity;
  double yaw = 0.0;
};

struct TrajectorySetpoint {
  Vec3 position;
  Vec3 velocity;
  Vec3 acceleration;
  double yaw = 0.0;
  bool held = false;  // goal rejected by the obstacle margin
};

class Planner {
 public:
  explicit Planner(const MpcParams& params = {});

  // One receding-horizon step. A reference closer than obstacle_margin to
  // any obstacle point is replaced by holding the current position.
  TrajectorySetpoint plan_step(const Vec3& position, const Vec3& velocity,
                               const TrajectoryReference& ref,
                               const std::vector<Vec3>& obstacles = {}) const;

  const MpcParams& params() const { return params_; }
  const AxisMpc& axis() const { return axis_; }

 private:
  MpcParams params_;
  AxisMpc axis_;
};

}  // namespace perch

#endif  // PERCH_PLANNER_HPP_
