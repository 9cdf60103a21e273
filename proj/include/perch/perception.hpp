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

#ifndef PERCH_PERCEPTION_HPP_
#define PERCH_PERCEPTION_HPP_

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "perch/drone.hpp"
#include "perch/geometry.hpp"

namespace perch {

using Rng = std::mt19937_64;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

struct RadarScan {
  std::vector<Vec3> points;  // body frame
  double timestamp = 0.0;
};

struct LineDirectionEstimate {
  Vec3 direction{0.0, 1.0, 0.0};  // unit, level frame
  double confidence = 1.0;
};

struct SensorParams {
  double max_range = 10.0;       // m
  int points_per_cable = 20;
  double noise_sigma = 0.05;     // m
  double clutter_rate = 0.0;     // mean clutter points per scan
  double direction_kappa = 1e6;  // von Mises concentration of the yaw error
};

void validate(const SensorParams& p);

// Scan in the drone body frame (x forward, z up) at time t.
RadarScan synth_scan(const PowerlineSpec& line, const DroneState& drone, double t,
                     const SensorParams& params, Rng& rng);

// Level frame: body frame rotated back by yaw, origin at the drone.
std::vector<Vec3> body_to_level(const std::vector<Vec3>& body, double yaw);

// Draws from a von Mises distribution centred on 0 (Best-Fisher).
double sample_von_mises(double kappa, Rng& rng);

// True direction in the level frame plus von Mises yaw noise.
LineDirectionEstimate estimate_direction(const Vec3& true_direction, double kappa, Rng& rng);

// Orthonormal basis of the plane perpendicular to `direction`: v follows
// the projection of world up, u = direction x v. Throws std::invalid_argument
// when direction is (nearly) vertical.
struct PlaneBasis {
  Vec3 u;
  Vec3 v;
};
PlaneBasis plane_basis(const Vec3& direction);

Vec2 project_point(const Vec3& p, const PlaneBasis& basis);
std::vector<Vec2> project_to_plane(const std::vector<Vec3>& points, const Vec3& direction);

struct Track {
  int id = 0;
  Vec2 position = Vec2::Zero();
  Mat2 covariance = Mat2::Identity();
  int hits = 0;
  int misses = 0;
  bool confirmed = false;
};

struct OdometryDelta {
  Vec3 translation;  // m, level frame
  double yaw_delta = 0.0;
  double noise_scale = 0.0;  // m, std of the translation error
};

struct TrackerParams {
  double process_noise = 1e-4;  // m^2 per step
  double gate = 9.21;           // chi^2, 2 dof, 0.99
  int confirm_hits = 5;
  int delete_misses = 10;
  double cluster_radius = 0.3;  // m
  int min_cluster_points = 3;
  double initial_variance = 0.25;  // m^2
};

void validate(const TrackerParams& p);

Track kf_predict(const Track& track, const OdometryDelta& odom, const Vec3& direction,
                 double process_noise);

// Squared Mahalanobis distance of the innovation.
double mahalanobis2(const Track& track, const Vec2& z, const Mat2& R);

struct UpdateResult {
  Track track;
  bool accepted = false;
};

UpdateResult kf_update(const Track& track, const Vec2& z, const Mat2& R, double gate);

struct Measurement {
  Vec2 z = Vec2::Zero();
  Mat2 R = Mat2::Identity();
  int support = 0;
};

// Single-linkage clustering; each cluster's centroid becomes a
// measurement with covariance sigma^2 / n.
std::vector<Measurement> cluster_measurements(const std::vector<Vec2>& points,
                                              double noise_sigma, const TrackerParams& p);

class TrackSet {
 public:
  TrackSet() = default;
  explicit TrackSet(const TrackerParams& params) : params_(params) {}

  void predict(const OdometryDelta& odom, const Vec3& direction);
  // Greedy nearest-neighbour association, spawn, confirm, delete.
  void associate_and_manage(const std::vector<Measurement>& measurements);
  void clear() { tracks_.clear(); }

  const std::vector<Track>& tracks() const { return tracks_; }
  const Track* find(int id) const;
  int confirmed_count() const;

 private:
  TrackerParams params_;
  std::vector<Track> tracks_;
  int next_id_ = 1;
};

// Smallest plane distance to the drone among confirmed tracks; ties go to
// the lowest id. With a phase selector, the confirmed track whose u
// coordinate ranks `phase_index` from the left.
std::optional<Track> select_target_cable(const std::vector<Track>& tracks,
                                         std::optional<int> phase_index = std::nullopt);

// Per-scan pipeline: level-frame points, direction estimate, projection,
// clustering, association.
class Perception {
 public:
  Perception() = default;
  Perception(const SensorParams& sensor, const TrackerParams& tracker);

  void step(const PowerlineSpec& line, const DroneState& drone, const OdometryDelta& odom,
            double t, Rng& rng);
  void reset() { tracks_.clear(); }

  const TrackSet& tracks() const { return tracks_; }
  const LineDirectionEstimate& direction() const { return direction_; }
  const RadarScan& last_scan() const { return scan_; }

 private:
  SensorParams sensor_;
  TrackerParams tracker_params_;
  TrackSet tracks_;
  LineDirectionEstimate direction_;
  RadarScan scan_;
};

}  // namespace perch

#endif  // PERCH_PERCEPTION_HPP_
