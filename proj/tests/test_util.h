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

#ifndef PREFPLAN_TESTS_TEST_UTIL_H_
#define PREFPLAN_TESTS_TEST_UTIL_H_

#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "prefplan/context.h"
#include "prefplan/error.h"
#include "prefplan/oracle.h"
#include "prefplan/params.h"
#include "prefplan/trajectory.h"

namespace prefplan::testing {

// Expects `statement` to throw prefplan::Error with the given code.
#define EXPECT_ERROR_CODE(statement, error_code)                     \
  do {                                                               \
    try {                                                            \
      statement;                                                     \
      ADD_FAILURE() << "no exception from " #statement;              \
    } catch (const ::prefplan::Error& e) {                           \
      EXPECT_EQ(e.code(), error_code) << e.what();                   \
    } catch (...) {                                                  \
      ADD_FAILURE() << "unexpected exception type from " #statement; \
    }                                                                \
  } while (false)

inline Context Scene(const Vec3& start, const Vec3& goal, const Vec3& obstacle,
                     double radius) {
  Context ctx;
  ctx.start = start;
  ctx.goal = goal;
  ctx.obstacle_center = obstacle;
  ctx.obstacle_radius = radius;
  ctx.table_height = 0.0;
  ctx.workspace_low = Vec3(0.25, -0.45, 0.02);
  ctx.workspace_upp = Vec3(0.85, 0.45, 0.6);
  return ctx;
}

// The training scene: a transfer along y past an obstacle on the line.
inline Context TrainingScene() {
  return Scene({0.55, -0.3, 0.1}, {0.55, 0.3, 0.1}, {0.55, 0.0, 0.1}, 0.08);
}

inline Context UnseenSceneA() {
  return Scene({0.45, -0.32, 0.12}, {0.65, 0.3, 0.08}, {0.53, 0.0, 0.1}, 0.07);
}

inline Context UnseenSceneB() {
  return Scene({0.62, 0.3, 0.08}, {0.48, -0.28, 0.14}, {0.56, 0.02, 0.12},
               0.09);
}

// Training scene with the obstacle moved off the line toward the start.
inline Context RelocatedScene() {
  Context ctx = TrainingScene();
  ctx.obstacle_center = Vec3(0.48, -0.12, 0.1);
  return ctx;
}

// Obstacle far below and behind the transfer line.
inline Context OpenScene() {
  return Scene({0.4, -0.3, 0.2}, {0.7, 0.3, 0.2}, {0.8, -0.4, 0.03}, 0.01);
}

// Velocity preference: about 0.1 m/s near the obstacle, 0.35 m/s elsewhere.
inline Eigen::VectorXd SlowNearFastFar() {
  Eigen::VectorXd theta(18);
  for (int i = 0; i < 9; ++i) {
    const double c = 0.05 + 0.55 * i / 8.0;
    theta[i] = 1.0 - 0.5 * std::pow((c - 0.1) / 0.1, 2);
    theta[9 + i] = 1.0 - 0.5 * std::pow((c - 0.35) / 0.1, 2);
  }
  return theta;
}

inline GroundTruthUser HighFarCloseUser(double sigma_pos = 0.0,
                                        double sigma_dur = 0.0) {
  GroundTruthUser user;
  user.theta_true_P = Vec3(0.5, -0.5, 0.5);
  user.theta_true_V = SlowNearFastFar();
  user.noise_sigma_pos = sigma_pos;
  user.noise_sigma_dur = sigma_dur;
  user.seed = 7;
  return user;
}

// Weights obstacle proximity and side, indifferent to height.
inline GroundTruthUser CarefulUser() {
  GroundTruthUser user = HighFarCloseUser();
  user.theta_true_P = Vec3(0.0, 1.0, 0.5);
  return user;
}

inline Scenario MakeScenario(const std::string& name, const Context& ctx) {
  return {name, ctx, DefaultParams(ctx)};
}

// Straight line from `a` to `b` at constant speed, `count` samples.
inline DiscreteTrajectory StraightLine(const Vec3& a, const Vec3& b,
                                       double speed, int count) {
  const double duration = (b - a).norm() / speed;
  const Vec3 v = (b - a) / duration;
  std::vector<State> states;
  for (int k = 0; k < count; ++k) {
    const double s = static_cast<double>(k) / (count - 1);
    states.push_back({s * duration, a + s * (b - a), v});
  }
  return DiscreteTrajectory(std::move(states));
}

inline double MinObstacleDistance(const DiscreteTrajectory& traj,
                                  const Context& ctx) {
  double best = INFINITY;
  for (const State& s : traj) {
    best = std::min(best, (s.x - ctx.obstacle_center).norm());
  }
  return best;
}

}  // namespace prefplan::testing

#endif  // PREFPLAN_TESTS_TEST_UTIL_H_
