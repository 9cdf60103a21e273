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

#include "perch/perception.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace perch {

void validate(const SensorParams& p) {
  if (!(p.max_range > 0.0)) throw ConfigError("sensor max_range must be positive");
  if (p.points_per_cable < 0) throw ConfigError("points_per_cable must be >= 0");
  if (!(p.noise_sigma >= 0.0)) throw ConfigError("noise_sigma must be >= 0");
  if (!(p.clutter_rate >= 0.0)) throw ConfigError("clutter_rate must be >= 0");
  if (!(p.direction_kappa > 0.0)) throw ConfigError("direction_kappa must be positive");
}

void validate(const TrackerParams& p) {
  if (!(p.process_noise >= 0.0) || !(p.gate > 0.0) || p.confirm_hits < 1 ||
      p.delete_misses < 1 || !(p.cluster_radius > 0.0) || p.min_cluster_points < 1 ||
      !(p.initial_variance > 0.0)) {
    throw ConfigError("tracker parameters out of range");
  }
}

RadarScan synth_scan(const PowerlineSpec& line, const DroneState& drone, double t,
                     const SensorParams& params, Rng& rng) {
  RadarScan scan;
  scan.timestamp = t;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double r = params.max_range;

  auto emit = [&](const Vec3& world) {
    Vec3 p = world - drone.position;
    if (params.noise_sigma > 0.0) {
      p += Vec3{noise(rng), noise(rng), noise(rng)} * params.noise_sigma;
    }
    scan.points.push_back(rotate_yaw(p, -drone.yaw));
  };

  for (const auto& cable : line.cables) {
    const NearestPoint np = nearest_point_on_cable(cable, drone.position);
    if (np.distance > r) continue;
    const double span = norm(cable.endpoint_b - cable.endpoint_a);
    const double half = std::sqrt(std::max(0.0, r * r - np.distance * np.distance)) / span;
    const double lo = std::max(0.0, np.s - half);
    const double hi = std::min(1.0, np.s + half);
    for (int i = 0; i < params.points_per_cable; ++i) {
      const double s = lo + (hi - lo) * unit(rng);
      const Vec3 p = cable_point_at(cable, s, t);
      if (norm(p - drone.position) > r) continue;
      emit(p);
    }
  }

  if (params.clutter_rate > 0.0) {
    std::poisson_distribution<int> count(params.clutter_rate);
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      // Uniform in the sensing ball.
      const double rad = r * std::cbrt(unit(rng));
      const double z = 2.0 * unit(rng) - 1.0;
      const double phi = 2.0 * std::numbers::pi * unit(rng);
      const double rho = std::sqrt(1.0 - z * z);
      emit(drone.position + Vec3{rho * std::cos(phi), rho * std::sin(phi), z} * rad);
    }
  }
  return scan;
}

std::vector<Vec3> body_to_level(const std::vector<Vec3>& body, double yaw) {
  std::vector<Vec3> out;
  out.reserve(body.size());
  for (const auto& p : body) out.push_back(rotate_yaw(p, yaw));
  return out;
}

double sample_von_mises(double kappa, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (kappa < 1e-8) return std::numbers::pi * (2.0 * unit(rng) - 1.0);
  if (kappa > 1e6) {
    std::normal_distribution<double> n(0.0, 1.0 / std::sqrt(kappa));
    return wrap_angle(n(rng));
  }
  double s;
  if (kappa < 1e-5) {
    s = 1.0 / kappa + kappa;
  } else {
    const double r = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
    const double rho = (r - std::sqrt(2.0 * r)) / (2.0 * kappa);
    s = (1.0 + rho * rho) / (2.0 * rho);
  }
  double w;
  for (;;) {
    const double z = std::cos(std::numbers::pi * unit(rng));
    w = (1.0 + s * z) / (s + z);
    const double y = kappa * (s - w);
    const double v = unit(rng);
    if (y * (2.0 - y) - v >= 0.0 || std::log(y / v) + 1.0 - y >= 0.0) break;
  }
  const double angle = std::acos(std::clamp(w, -1.0, 1.0));
  return unit(rng) < 0.5 ? -angle : angle;
}

LineDirectionEstimate estimate_direction(const Vec3& true_direction, double kappa, Rng& rng) {
  LineDirectionEstimate e;
  e.direction = normalized(rotate_yaw(true_direction, sample_von_mises(kappa, rng)));
  e.confidence = 1.0 - 1.0 / (1.0 + kappa);
  return e;
}

PlaneBasis plane_basis(const Vec3& direction) {
  const Vec3 up{0.0, 0.0, 1.0};
  const Vec3 v_raw = up - direction * dot(up, direction);
  const double n = norm(v_raw);
  if (n < 1e-6) throw std::invalid_argument("line direction is parallel to world up");
  PlaneBasis b;
  b.v = v_raw / n;
  b.u = cross(direction, b.v);
  return b;
}

Vec2 project_point(const Vec3& p, const PlaneBasis& b) { return {dot(p, b.u), dot(p, b.v)}; }

std::vector<Vec2> project_to_plane(const std::vector<Vec3>& points, const Vec3& direction) {
  const PlaneBasis b = plane_basis(direction);
  std::vector<Vec2> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(project_point(p, b));
  return out;
}

Track kf_predict(const Track& track, const OdometryDelta& odom, const Vec3& direction,
                 double process_noise) {
  Track t = track;
  t.position -= project_point(odom.translation, plane_basis(direction));
  const double q = process_noise + odom.noise_scale * odom.noise_scale;
  t.covariance += q * Mat2::Identity();
  return t;
}

double mahalanobis2(const Track& track, const Vec2& z, const Mat2& R) {
  const Vec2 y = z - track.position;
  const Mat2 S = track.covariance + R;
  return y.dot(S.ldlt().solve(y));
}

UpdateResult kf_update(const Track& track, const Vec2& z, const Mat2& R, double gate) {
  UpdateResult r;
  r.track = track;
  if (mahalanobis2(track, z, R) > gate) {
    ++r.track.misses;
    return r;
  }
  const Mat2& P = track.covariance;
  const Mat2 S = P + R;
  const Mat2 K = P * S.inverse();
  const Mat2 I_K = Mat2::Identity() - K;
  r.track.position = track.position + K * (z - track.position);
  // Joseph form keeps the covariance symmetric positive-definite.
  Mat2 Pn = I_K * P * I_K.transpose() + K * R * K.transpose();
  r.track.covariance = 0.5 * (Pn + Pn.transpose());
  ++r.track.hits;
  r.track.misses = 0;
  r.accepted = true;
  return r;
}

std::vector<Measurement> cluster_measurements(const std::vector<Vec2>& points,
                                              double noise_sigma, const TrackerParams& p) {
  const std::size_t n = points.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  };
  const double r2 = p.cluster_radius * p.cluster_radius;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if ((points[i] - points[j]).squaredNorm() <= r2) {
        const std::size_t a = find(i);
        const std::size_t b = find(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }
  std::vector<Vec2> sum(n, Vec2::Zero());
  std::vector<int> count(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = find(i);
    sum[root] += points[i];
    ++count[root];
  }
  std::vector<Measurement> out;
  const double var = std::max(noise_sigma * noise_sigma, 1e-8);
  for (std::size_t i = 0; i < n; ++i) {
    if (count[i] < p.min_cluster_points) continue;
    Measurement m;
    m.z = sum[i] / count[i];
    m.R = (var / count[i]) * Mat2::Identity();
    m.support = count[i];
    out.push_back(m);
  }
  return out;
}

void TrackSet::predict(const OdometryDelta& odom, const Vec3& direction) {
  for (auto& t : tracks_) t = kf_predict(t, odom, direction, params_.process_noise);
}

void TrackSet::associate_and_manage(const std::vector<Measurement>& meas) {
  struct Pair {
    double d2;
    std::size_t track;
    std::size_t meas;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < tracks_.size(); ++i) {
    for (std::size_t j = 0; j < meas.size(); ++j) {
      const double d2 = mahalanobis2(tracks_[i], meas[j].z, meas[j].R);
      if (d2 <= params_.gate) pairs.push_back({d2, i, j});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [&](const Pair& a, const Pair& b) {
    if (a.d2 != b.d2) return a.d2 < b.d2;
    if (tracks_[a.track].id != tracks_[b.track].id) {
      return tracks_[a.track].id < tracks_[b.track].id;
    }
    return a.meas < b.meas;
  });
  std::vector<bool> track_used(tracks_.size(), false);
  std::vector<bool> meas_used(meas.size(), false);
  for (const auto& pr : pairs) {
    if (track_used[pr.track] || meas_used[pr.meas]) continue;
    track_used[pr.track] = true;
    meas_used[pr.meas] = true;
    const Measurement& m = meas[pr.meas];
    tracks_[pr.track] = kf_update(tracks_[pr.track], m.z, m.R, params_.gate).track;
    if (tracks_[pr.track].hits >= params_.confirm_hits) tracks_[pr.track].confirmed = true;
  }
  std::vector<Track> kept;
  kept.reserve(tracks_.size() + meas.size());
  for (std::size_t i = 0; i < tracks_.size(); ++i) {
    Track t = tracks_[i];
    if (!track_used[i]) ++t.misses;
    if (t.misses >= params_.delete_misses) continue;
    kept.push_back(t);
  }
  // Two tracks on one cable steal each other's returns; keep the older.
  std::vector<Track> merged;
  merged.reserve(kept.size());
  for (const auto& t : kept) {
    bool dup = false;
    for (auto& m : merged) {
      if ((m.position - t.position).norm() > params_.cluster_radius) continue;
      dup = true;
      if (t.hits > m.hits) m = Track{m.id, t.position, t.covariance, t.hits, t.misses, t.confirmed || m.confirmed};
      break;
    }
    if (!dup) merged.push_back(t);
  }
  kept = std::move(merged);
  const std::size_t existing = kept.size();
  for (std::size_t j = 0; j < meas.size(); ++j) {
    if (meas_used[j]) continue;
    bool near = false;
    for (std::size_t i = 0; i < existing; ++i) {
      if ((kept[i].position - meas[j].z).norm() <= params_.cluster_radius) near = true;
    }
    if (near) continue;
    Track t;
    t.id = next_id_++;
    t.position = meas[j].z;
    t.covariance = params_.initial_variance * Mat2::Identity();
    t.hits = 1;
    t.confirmed = t.hits >= params_.confirm_hits;
    kept.push_back(t);
  }
  tracks_ = std::move(kept);
}

const Track* TrackSet::find(int id) const {
  for (const auto& t : tracks_) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

int TrackSet::confirmed_count() const {
  return static_cast<int>(
      std::count_if(tracks_.begin(), tracks_.end(), [](const Track& t) { return t.confirmed; }));
}

std::optional<Track> select_target_cable(const std::vector<Track>& tracks,
                                         std::optional<int> phase_index) {
  std::vector<Track> confirmed;
  for (const auto& t : tracks) {
    if (t.confirmed) confirmed.push_back(t);
  }
  if (confirmed.empty()) return std::nullopt;
  if (phase_index) {
    std::sort(confirmed.begin(), confirmed.end(), [](const Track& a, const Track& b) {
      if (a.position.x() != b.position.x()) return a.position.x() < b.position.x();
      return a.id < b.id;
    });
    if (*phase_index < 0 || *phase_index >= static_cast<int>(confirmed.size())) {
      return std::nullopt;
    }
    return confirmed[*phase_index];
  }
  const Track* best = nullptr;
  for (const auto& t : confirmed) {
    if (!best || t.position.norm() < best->position.norm() ||
        (t.position.norm() == best->position.norm() && t.id < best->id)) {
      best = &t;
    }
  }
  return *best;
}

Perception::Perception(const SensorParams& sensor, const TrackerParams& tracker)
    : sensor_(sensor), tracker_params_(tracker), tracks_(tracker) {}

void Perception::step(const PowerlineSpec& line, const DroneState& drone,
                      const OdometryDelta& odom, double t, Rng& rng) {
  scan_ = synth_scan(line, drone, t, sensor_, rng);
  Vec3 truth{0.0, 1.0, 0.0};
  double best = 1e300;
  for (const auto& c : line.cables) {
    const NearestPoint np = nearest_point_on_cable(c, drone.position);
    if (np.distance < best) {
      best = np.distance;
      truth = cable_tangent(c, np.s);
    }
  }
  // The image pipeline only resolves the horizontal line direction.
  truth.z = 0.0;
  direction_ = estimate_direction(normalized(truth), sensor_.direction_kappa, rng);
  tracks_.predict(odom, direction_.direction);
  const auto level = body_to_level(scan_.points, drone.yaw);
  const auto plane = project_to_plane(level, direction_.direction);
  tracks_.associate_and_manage(cluster_measurements(plane, sensor_.noise_sigma, tracker_params_));
}

}  // namespace perch
