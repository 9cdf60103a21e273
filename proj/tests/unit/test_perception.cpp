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

#include <gtest/gtest.h>

#include "gen.hpp"
#include "perch/perception.hpp"
#include "truth.hpp"

namespace perch {
namespace {

using testing::Gen;
using testing::kCases;

bool spd(const Mat2& m) {
  if (std::abs(m(0, 1) - m(1, 0)) > 1e-12) return false;
  Eigen::SelfAdjointEigenSolver<Mat2> es(m);
  return es.eigenvalues().minCoeff() > 0.0;
}

// Scalar Kalman update applied per axis with diagonal P and R.
TEST(Kalman, UpdateMatchesScalarOracle) {
  Gen g(41);
  for (int i = 0; i < kCases; ++i) {
    Track t;
    t.position = {g.uniform(-3, 3), g.uniform(-3, 3)};
    const double p0 = g.uniform(1e-4, 1.0);
    const double p1 = g.uniform(1e-4, 1.0);
    t.covariance = Mat2::Zero();
    t.covariance(0, 0) = p0;
    t.covariance(1, 1) = p1;
    const double r0 = g.uniform(1e-4, 1.0);
    const double r1 = g.uniform(1e-4, 1.0);
    Mat2 R = Mat2::Zero();
    R(0, 0) = r0;
    R(1, 1) = r1;
    const Vec2 z = t.position + Vec2{g.uniform(-0.1, 0.1), g.uniform(-0.1, 0.1)};
    const UpdateResult u = kf_update(t, z, R, 1e9);
    ASSERT_TRUE(u.accepted);
    const double k0 = p0 / (p0 + r0);
    const double k1 = p1 / (p1 + r1);
    EXPECT_NEAR(u.track.position.x(), t.position.x() + k0 * (z.x() - t.position.x()), 1e-9);
    EXPECT_NEAR(u.track.position.y(), t.position.y() + k1 * (z.y() - t.position.y()), 1e-9);
    EXPECT_NEAR(u.track.covariance(0, 0), p0 * r0 / (p0 + r0), 1e-9);
    EXPECT_NEAR(u.track.covariance(1, 1), p1 * r1 / (p1 + r1), 1e-9);
    EXPECT_NEAR(u.track.covariance(0, 1), 0.0, 1e-12);
  }
}

TEST(Kalman, CovarianceStaysSpdUnderRandomSequences) {
  Gen g(42);
  const Vec3 dir{0, 1, 0};
  for (int i = 0; i < 50; ++i) {
    Track t;
    for (int k = 0; k < 200; ++k) {
      OdometryDelta od;
      od.translation = g.vec(-0.05, 0.05);
      od.noise_scale = g.uniform(0, 0.01);
      t = kf_predict(t, od, dir, 1e-4);
      ASSERT_TRUE(spd(t.covariance));
      Mat2 A = Mat2::Random();
      const Mat2 R = A * A.transpose() + 1e-6 * Mat2::Identity();
      t = kf_update(t, t.position + Vec2::Random() * 0.05, R, 1e9).track;
      ASSERT_TRUE(spd(t.covariance));
    }
  }
}

TEST(Kalman, PredictShiftsByProjectedOdometry) {
  Track t;
  t.position = {1.0, 2.0};
  OdometryDelta od;
  od.translation = {0.5, 3.0, -0.25};
  const Track n = kf_predict(t, od, {0, 1, 0}, 0.01);
  const PlaneBasis b = plane_basis({0, 1, 0});
  EXPECT_NEAR((n.position - (t.position - project_point(od.translation, b))).norm(), 0.0, 1e-12);
  EXPECT_NEAR(n.covariance(0, 0), 1.01, 1e-12);
}

TEST(Kalman, GateRejectsOutliers) {
  Track t;
  t.covariance = 0.01 * Mat2::Identity();
  const UpdateResult u = kf_update(t, {5.0, 0.0}, 0.01 * Mat2::Identity(), 9.21);
  EXPECT_FALSE(u.accepted);
  EXPECT_EQ(u.track.misses, 1);
  EXPECT_NEAR(mahalanobis2(t, {0.2, 0.0}, 0.01 * Mat2::Identity()), 2.0, 1e-12);
}

TEST(Projection, BasisIsOrthonormal) {
  Gen g(43);
  for (int i = 0; i < kCases; ++i) {
    Vec3 d = g.vec(-1, 1);
    d.z *= 0.3;
    if (norm(d) < 0.1) continue;
    d = normalized(d);
    const PlaneBasis b = plane_basis(d);
    EXPECT_NEAR(norm(b.u), 1.0, 1e-12);
    EXPECT_NEAR(norm(b.v), 1.0, 1e-12);
    EXPECT_NEAR(dot(b.u, b.v), 0.0, 1e-12);
    EXPECT_NEAR(dot(b.u, d), 0.0, 1e-12);
    EXPECT_GT(b.v.z, 0.0);
  }
  EXPECT_THROW(plane_basis({0, 0, 1}), std::invalid_argument);
}

TEST(Projection, BodyToLevelInvertsTheScanRotation) {
  Gen g(44);
  for (int i = 0; i < kCases; ++i) {
    const Vec3 p = g.vec(-5, 5);
    const double yaw = g.uniform(-3, 3);
    const auto lvl = body_to_level({rotate_yaw(p, -yaw)}, yaw);
    EXPECT_LT(norm(lvl[0] - p), 1e-12);
  }
}

// Oracle: E[cos x] = I1(kappa) / I0(kappa).
TEST(Direction, VonMisesFirstMoment) {
  for (double kappa : {0.5, 2.0, 20.0}) {
    Rng rng(7);
    double c = 0.0;
    double s = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double x = sample_von_mises(kappa, rng);
      ASSERT_LE(std::abs(x), std::numbers::pi);
      c += std::cos(x);
      s += std::sin(x);
    }
    EXPECT_NEAR(c / n, std::cyl_bessel_i(1.0, kappa) / std::cyl_bessel_i(0.0, kappa), 0.005);
    EXPECT_NEAR(s / n, 0.0, 0.005);
  }
}

TEST(Clustering, CentroidsAndShrinkingCovariance) {
  std::vector<Vec2> pts;
  for (int i = 0; i < 10; ++i) pts.push_back({0.01 * i, 0.0});
  for (int i = 0; i < 4; ++i) pts.push_back({5.0, 0.01 * i});
  pts.push_back({-9.0, -9.0});
  TrackerParams tp;
  const auto m = cluster_measurements(pts, 0.05, tp);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_NEAR(m[0].z.x(), 0.045, 1e-12);
  EXPECT_EQ(m[0].support, 10);
  EXPECT_NEAR(m[0].R(0, 0), 0.0025 / 10, 1e-15);
  EXPECT_NEAR(m[1].z.y(), 0.015, 1e-12);
}

TEST(Tracks, ConfirmAfterHitsAndDeleteAfterMisses) {
  TrackerParams tp;
  TrackSet set(tp);
  Measurement m;
  m.z = {1.0, 2.0};
  m.R = 1e-4 * Mat2::Identity();
  for (int k = 0; k < tp.confirm_hits; ++k) {
    EXPECT_EQ(set.confirmed_count(), 0);
    set.associate_and_manage({m});
  }
  ASSERT_EQ(set.tracks().size(), 1u);
  EXPECT_EQ(set.confirmed_count(), 1);
  for (int k = 0; k < tp.delete_misses; ++k) set.associate_and_manage({});
  EXPECT_TRUE(set.tracks().empty());
}

TEST(Tracks, TargetSelection) {
  std::vector<Track> ts(3);
  ts[0] = {1, {-1.5, 2.5}, Mat2::Identity(), 5, 0, true};
  ts[1] = {2, {0.0, 2.5}, Mat2::Identity(), 5, 0, true};
  ts[2] = {3, {0.1, 0.1}, Mat2::Identity(), 1, 0, false};
  EXPECT_EQ(select_target_cable(ts)->id, 2);
  EXPECT_EQ(select_target_cable(ts, 0)->id, 1);
  EXPECT_FALSE(select_target_cable(ts, 2).has_value());
  ts[0].position = {0.0, -2.5};
  EXPECT_EQ(select_target_cable(ts)->id, 1);
}

TEST(Perception, ThreeCablesConfirmed) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto e = testing::run_perception(seed);
    EXPECT_EQ(e.confirmed, 3);
    EXPECT_LE(e.rmse, 0.05);
  }
}

TEST(Perception, ScanRespectsRange) {
  Rng rng(3);
  SensorParams sp;
  sp.noise_sigma = 0.0;
  DroneState d;
  d.position = {0, 50, 7.5};
  const RadarScan s = synth_scan(default_powerline(), d, 0.0, sp, rng);
  EXPECT_EQ(s.points.size(), 60u);
  for (const auto& p : s.points) EXPECT_LE(norm(p), sp.max_range + 1e-9);
}

}  // namespace
}  // namespace perch
