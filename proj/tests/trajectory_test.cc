// Copyright 2026 The Prefplan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "prefplan/trajectory.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "test_util.h"

namespace prefplan {
namespace {

using testing::StraightLine;

// Trapezoid rule on central second differences of the position.
double QuadratureEnergy(const std::function<Vec3(double)>& x, double t0,
                        double t1, int samples) {
  const double h = (t1 - t0) / samples;
  double total = 0.0;
  for (int k = 1; k < samples; ++k) {
    const double t = t0 + k * h;
    const Vec3 acc = (x(t + h) - 2.0 * x(t) + x(t - h)) / (h * h);
    total += acc.squaredNorm() * h;
  }
  return total;
}

std::vector<Waypoint> Curved() {
  return {
      {Vec3(0, 0, 0), 0.0}, {Vec3(0.5, 0.3, 0.2), 0.5}, {Vec3(1, 0, 0), 1.0}};
}

TEST(InterpolateTest, TwoPointsGiveStraightLine) {
  const std::vector<Waypoint> w{{Vec3(0, 0, 0), 0.0}, {Vec3(1, 0, 0), 1.0}};
  const ContinuousTrajectory traj = Interpolate(w);
  EXPECT_TRUE(traj.Position(0.5).isApprox(Vec3(0.5, 0, 0), 1e-15));
  EXPECT_NEAR(traj.IntegratedSquaredAcceleration(), 0.0, 1e-15);
}

TEST(InterpolateTest, CollinearThreePointsStayOnLine) {
  const std::vector<Waypoint> w{
      {Vec3(0, 0, 0), 0.0}, {Vec3(0.5, 0, 0), 0.5}, {Vec3(1, 0, 0), 1.0}};
  const ContinuousTrajectory traj = Interpolate(w);
  EXPECT_NEAR((traj.Position(0.5) - Vec3(0.5, 0, 0)).norm(), 0.0, 1e-15);
  EXPECT_NEAR((traj.Position(0.2) - Vec3(0.2, 0, 0)).norm(), 0.0, 1e-12);
}

TEST(InterpolateTest, PassesThroughWaypointsAndMatchesQuadrature) {
  const auto w = Curved();
  const ContinuousTrajectory traj = Interpolate(w);
  for (const Waypoint& p : w) {
    EXPECT_LT((traj.Position(p.time) - p.position).norm(), 1e-9);
  }
  const double quadrature = QuadratureEnergy(
      [&](double t) { return traj.Position(t); }, 0.0, 1.0, 10000);
  EXPECT_NEAR(traj.IntegratedSquaredAcceleration(), quadrature,
              1e-3 * quadrature);
}

TEST(InterpolateTest, SecondDerivativeContinuousAndNaturalAtEnds) {
  const ContinuousTrajectory traj = Interpolate(Curved());
  const double eps = 1e-9;
  EXPECT_LT(
      (traj.Acceleration(0.5 - eps) - traj.Acceleration(0.5 + eps)).norm(),
      1e-5);
  EXPECT_LT((traj.Velocity(0.5 - eps) - traj.Velocity(0.5 + eps)).norm(), 1e-6);
  EXPECT_LT(traj.Acceleration(0.0).norm(), 1e-9);
  EXPECT_LT(traj.Acceleration(1.0).norm(), 1e-9);
}

// Adding a bump that vanishes with its first two derivatives at every knot
// keeps a C2 interpolant; none of them may have lower energy.
TEST(InterpolateTest, NaturalSplineMinimizesEnergy) {
  const auto w = Curved();
  const ContinuousTrajectory spline = Interpolate(w);
  const auto energy = [&](const std::function<Vec3(double)>& x) {
    return QuadratureEnergy(x, 0.0, 1.0, 10000);
  };
  const double best = energy([&](double t) { return spline.Position(t); });
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss(0.0, 0.05);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec3 a(gauss(rng), gauss(rng), gauss(rng));
    const Vec3 b(gauss(rng), gauss(rng), gauss(rng));
    const auto perturbed = [&](double t) {
      const double s = t < 0.5 ? t / 0.5 : (t - 0.5) / 0.5;
      const double bump = std::pow(std::sin(M_PI * s), 3);
      return Vec3(spline.Position(t) + (t < 0.5 ? a : b) * bump);
    };
    EXPECT_LE(best, energy(perturbed) + 1e-9) << "trial " << trial;
  }
}

TEST(InterpolateTest, RejectsBadWaypoints) {
  using enum ErrorCode;
  const std::vector<Waypoint> one{{Vec3::Zero(), 0.0}};
  EXPECT_ERROR_CODE(Interpolate(one), kInvalidWaypoints);
  const std::vector<Waypoint> dup{{Vec3::Zero(), 0.0}, {Vec3::Ones(), 0.0}};
  EXPECT_ERROR_CODE(Interpolate(dup), kInvalidWaypoints);
  const std::vector<Waypoint> back{{Vec3::Zero(), 1.0}, {Vec3::Ones(), 0.0}};
  EXPECT_ERROR_CODE(Interpolate(back), kInvalidWaypoints);
}

TEST(ResampleTest, CountTimesAndAnalyticValues) {
  const ContinuousTrajectory traj = Interpolate(Curved());
  const DiscreteTrajectory d = Resample(traj, 80);
  ASSERT_EQ(d.size(), 80u);
  for (std::size_t k = 0; k < d.size(); ++k) {
    const double t = static_cast<double>(k) / 79.0;
    EXPECT_NEAR(d[k].t, t, 1e-15);
    EXPECT_LT((d[k].x - traj.Position(d[k].t)).norm(), 1e-15);
    EXPECT_LT((d[k].v - traj.Velocity(d[k].t)).norm(), 1e-15);
  }
}

TEST(ResampleTest, Deterministic) {
  const DiscreteTrajectory a = Resample(Interpolate(Curved()), 80);
  const DiscreteTrajectory b = Resample(Interpolate(Curved()), 80);
  EXPECT_TRUE(a == b);
}

TEST(ResampleTest, ConstantVelocityTimesGiveUniformSpacing) {
  const Vec3 s(0.3, -0.2, 0.1), g(0.7, 0.4, 0.3);
  const Vec3 m = s + 0.3 * (g - s);
  const auto times = PathTimeVector(s, m, g, 5.0);
  const std::vector<Waypoint> w{{s, times[0]}, {m, times[1]}, {g, times[2]}};
  const DiscreteTrajectory d = Resample(Interpolate(w), 80);
  const double step = (g - s).norm() / 79.0;
  for (std::size_t k = 1; k < d.size(); ++k) {
    EXPECT_NEAR((d[k].x - d[k - 1].x).norm(), step, 1e-6);
  }
}

TEST(ResampleTest, ArcLengthPinsEndsAndSpacesEvenly) {
  // Slow first half, fast second half.
  std::vector<State> states;
  for (int k = 0; k <= 20; ++k) {
    const double t = k;
    const double y = k <= 10 ? 0.01 * k : 0.1 + 0.05 * (k - 10);
    states.push_back({t, Vec3(0, y, 0), Vec3::Zero()});
  }
  const DiscreteTrajectory raw(states);
  const DiscreteTrajectory even = ResampleByArcLength(raw, 31);
  ASSERT_EQ(even.size(), 31u);
  EXPECT_EQ(even.front().x, raw.front().x);
  EXPECT_EQ(even.back().x, raw.back().x);
  EXPECT_EQ(even.back().t, raw.back().t);
  for (std::size_t k = 1; k < even.size(); ++k) {
    EXPECT_NEAR(even[k].x.y() - even[k - 1].x.y(), 0.6 / 30.0, 1e-12);
  }
}

TEST(ResampleTest, ByTimeIsUniformInTime) {
  const DiscreteTrajectory line =
      StraightLine(Vec3::Zero(), Vec3(0.4, 0, 0), 0.2, 11);
  const DiscreteTrajectory d = ResampleByTime(line, 5);
  for (std::size_t k = 0; k < d.size(); ++k) {
    EXPECT_NEAR(d[k].t, 0.5 * k, 1e-12);
    EXPECT_NEAR(d[k].x.x(), 0.1 * k, 1e-12);
  }
}

TEST(DiscreteTrajectoryTest, RejectsInvalidStates) {
  using enum ErrorCode;
  EXPECT_ERROR_CODE(DiscreteTrajectory({{0.0, Vec3::Zero(), Vec3::Zero()}}),
                    kInvalidArgument);
  EXPECT_ERROR_CODE(DiscreteTrajectory({{0.0, Vec3::Zero(), Vec3::Zero()},
                                        {0.0, Vec3::Ones(), Vec3::Zero()}}),
                    kInvalidArgument);
  EXPECT_ERROR_CODE(DiscreteTrajectory({{0.0, Vec3::Zero(), Vec3::Zero()},
                                        {1.0, Vec3(NAN, 0, 0), Vec3::Zero()}}),
                    kInvalidArgument);
}

TEST(DiscreteTrajectoryTest, TranslationMovesPositionsOnly) {
  const DiscreteTrajectory line =
      StraightLine(Vec3::Zero(), Vec3(0.4, 0, 0), 0.2, 5);
  const DiscreteTrajectory moved = line.Translated(Vec3(1, 2, 3));
  for (std::size_t k = 0; k < line.size(); ++k) {
    EXPECT_EQ(moved[k].t, line[k].t);
    EXPECT_EQ(moved[k].v, line[k].v);
    EXPECT_TRUE(moved[k].x.isApprox(line[k].x + Vec3(1, 2, 3)));
  }
}

TEST(SegmentTest, ConstantSpeedLine) {
  const Context ctx = testing::TrainingScene();
  const DiscreteTrajectory line = StraightLine(ctx.start, ctx.goal, 0.2, 80);
  const SegmentSet segs = SegmentTrajectory(line, 10, ctx);
  ASSERT_EQ(segs.size(), 10u);
  for (std::size_t r = 0; r < segs.size(); ++r) {
    EXPECT_NEAR(segs[r].mean_speed, 0.2, 1e-9);
    EXPECT_EQ(segs[r].first, 8 * r);
    EXPECT_EQ(segs[r].last, 8 * r + 7);
  }
}

TEST(SegmentTest, RemainderGoesToLastSegment) {
  const Context ctx = testing::TrainingScene();
  const DiscreteTrajectory line = StraightLine(ctx.start, ctx.goal, 0.2, 83);
  const SegmentSet segs = SegmentTrajectory(line, 10, ctx);
  EXPECT_EQ(segs.back().first, 72u);
  EXPECT_EQ(segs.back().last, 82u);
  EXPECT_EQ(segs.back().end_waypoint, line.back().x);
  EXPECT_EQ(segs.back().end_time, line.back().t);
}

TEST(SegmentTest, ArcLengthsSumToPolylineAndStatisticsAreDirect) {
  const Context ctx = testing::TrainingScene();
  const DiscreteTrajectory traj = Resample(Interpolate(Curved()), 80);
  const SegmentSet segs = SegmentTrajectory(traj, 7, ctx);
  double sum = 0.0;
  for (const Segment& s : segs) {
    sum += s.arc_length;
    Vec3 mean = Vec3::Zero();
    double speed = 0.0;
    for (std::size_t k = s.first; k <= s.last; ++k) {
      mean += traj[k].x;
      speed += traj[k].v.norm();
    }
    const double count = static_cast<double>(s.last - s.first + 1);
    EXPECT_LT((s.mean_position - mean / count).norm(), 1e-12);
    EXPECT_NEAR(s.mean_speed, speed / count, 1e-12);
    EXPECT_NEAR(s.obstacle_distance,
                (mean / count - ctx.obstacle_center).norm(), 1e-12);
  }
  double polyline = 0.0;
  for (std::size_t k = 1; k < traj.size(); ++k) {
    polyline += (traj[k].x - traj[k - 1].x).norm();
  }
  EXPECT_NEAR(sum, polyline, 1e-9);
}

TEST(SegmentTest, RejectsBadCounts) {
  const Context ctx = testing::TrainingScene();
  const DiscreteTrajectory line = StraightLine(ctx.start, ctx.goal, 0.2, 10);
  EXPECT_ERROR_CODE(SegmentTrajectory(line, 10, ctx),
                    ErrorCode::kInvalidSegmentation);
  EXPECT_ERROR_CODE(SegmentTrajectory(line, 1, ctx),
                    ErrorCode::kInvalidSegmentation);
}

TEST(PathTimeVectorTest, Examples) {
  const Vec3 s(0, 0, 0), g(1, 0, 0);
  const auto a = PathTimeVector(s, Vec3(0.4, 0, 0), g, 5.0);
  EXPECT_DOUBLE_EQ(a[0], 0.0);
  EXPECT_DOUBLE_EQ(a[1], 2.0);
  EXPECT_DOUBLE_EQ(a[2], 5.0);
  EXPECT_DOUBLE_EQ(PathTimeVector(s, Vec3(0.5, 0, 0), g, 4.0)[1], 2.0);
  EXPECT_DOUBLE_EQ(PathTimeVector(s, s, g, 5.0)[1], 0.1);
  EXPECT_DOUBLE_EQ(PathTimeVector(s, Vec3(3, 0, 0), g, 5.0)[1], 4.9);
  EXPECT_ERROR_CODE(PathTimeVector(s, g, s, 5.0),
                    ErrorCode::kDegenerateContext);
}

TEST(PathLengthTest, Examples) {
  const Vec3 a(0.1, 0.2, 0.3), b(0.5, -0.1, 0.3);
  EXPECT_NEAR(PathLength(StraightLine(a, b, 0.1, 50)), (b - a).norm(), 1e-12);
  const DiscreteTrajectory still(
      {{0.0, a, Vec3::Zero()}, {1.0, a, Vec3::Zero()}, {2.0, a, Vec3::Zero()}});
  EXPECT_EQ(PathLength(still), 0.0);
  const ContinuousTrajectory curve = Interpolate(Curved());
  const double coarse = PathLength(Resample(curve, 80));
  const double dense = PathLength(Resample(curve, 10000));
  EXPECT_NEAR(coarse, dense, 0.005 * dense);
}

}  // namespace
}  // namespace prefplan
