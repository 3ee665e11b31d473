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

#ifndef PREFPLAN_FEATURES_H_
#define PREFPLAN_FEATURES_H_

#include <Eigen/Core>

#include "prefplan/context.h"
#include "prefplan/params.h"
#include "prefplan/trajectory.h"

namespace prefplan {

// Horizontal normal of the vertical plane through the obstacle center that
// contains the start->goal direction, oriented away from the robot base.
// Uses params.side_plane_normal when set.
Vec3 SidePlaneNormal(const Context& ctx, const PathFeatureParams& params);

// 1 / (1 + exp(-lambda * (h + p))) with h the height above the table.
double HeightFeature(const Vec3& x, const Context& ctx,
                     const PathFeatureParams& params);

// exp(-beta * d^2) with d the distance to the obstacle center.
double ObstacleDistanceFeature(const Vec3& x, const Context& ctx,
                               const PathFeatureParams& params);

// 2 / (1 + exp(gamma * S)) - 1 with S the signed distance to the side plane.
// Positive on the robot's side of the obstacle.
double ObstacleSideFeature(const Vec3& x, const Context& ctx,
                           const PathFeatureParams& params);

// psi_j = exp(-(epsilon * speed - c_j)^2) for the n centers.
Eigen::VectorXd VelocityRbf(double speed, const VelocityFeatureParams& params);

// Zero beyond d_safe, exp(kappa * (d_safe - d)) - 1 inside.
double CollisionCost(const Vec3& x, const Context& ctx,
                     const RobotObjectiveParams& params);

// Context-bound evaluator for the three path features; hoists the side plane
// normal out of per-sample loops.
class PathFeatureModel {
 public:
  PathFeatureModel(const Context& ctx, const PathFeatureParams& params);

  double Height(const Vec3& x) const;
  double Distance(const Vec3& x) const;
  double Side(const Vec3& x) const;
  // [height, distance, side]
  Vec3 operator()(const Vec3& x) const;

 private:
  Context ctx_;
  PathFeatureParams params_;
  Vec3 normal_;
};

// Sum of [height, distance, side] over all samples.
Vec3 PathFeatureCount(const DiscreteTrajectory& traj, const Context& ctx,
                      const PathFeatureParams& params);

// Cumulative feature counts of one trajectory. Velocity features are split
// into a close bin (segment obstacle distance < d_c) and a far bin. An empty
// bin has count 0 and holds the per-segment mean RBF vector of the other bin
// as its imputed value.
struct FeatureCount {
  Vec3 phi_P = Vec3::Zero();
  Eigen::VectorXd phi_V1;
  Eigen::VectorXd phi_V2;
  int count_V1 = 0;
  int count_V2 = 0;

  int segments() const { return count_V1 + count_V2; }
  // [phi_V1; phi_V2]
  Eigen::VectorXd phi_V() const;
};

// Velocity part only; phi_P is left at zero.
FeatureCount VelocityFeatureCount(const SegmentSet& segments,
                                  const VelocityFeatureParams& params);

// Full count of a trajectory sampled at params.sampling.N states. Throws
// Error(kDimensionMismatch) for any other sample count.
FeatureCount ComputeFeatureCount(const DiscreteTrajectory& traj,
                                 const Context& ctx, const ModelParams& params);

// theta_RP . [-length, -sum_k collision_cost(x_k)]
double RobotPathObjective(const DiscreteTrajectory& traj, const Context& ctx,
                          const RobotObjectiveParams& params);

// theta_RV * sum_r exp(-(epsilon * speed_r - epsilon * v_robot)^2)
double RobotVelocityObjective(const SegmentSet& segments,
                              const VelocityFeatureParams& velocity,
                              const RobotObjectiveParams& robot);

// Single-segment robot velocity reward, without theta_RV.
double RobotSpeedReward(double speed, const VelocityFeatureParams& velocity,
                        const RobotObjectiveParams& robot);

}  // namespace prefplan

#endif  // PREFPLAN_FEATURES_H_
