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

#include "prefplan/features.h"

#include <cmath>
#include <string>

#include "prefplan/error.h"

namespace prefplan {

Vec3 SidePlaneNormal(const Context& ctx, const PathFeatureParams& params) {
  if (params.side_plane_normal) return *params.side_plane_normal;
  Vec3 direction = ctx.goal - ctx.start;
  direction.z() = 0.0;
  Vec3 normal = direction.norm() > 1e-12
                    ? Vec3(-direction.y(), direction.x(), 0.0).normalized()
                    : Vec3::UnitX();
  // The robot base must lie on the negative side.
  if (normal.dot(ctx.robot_base - ctx.obstacle_center) > 0.0) normal = -normal;
  return normal;
}

double HeightFeature(const Vec3& x, const Context& ctx,
                     const PathFeatureParams& params) {
  const double h = x.z() - ctx.table_height;
  return 1.0 / (1.0 + std::exp(-params.lambda * (h + params.sigmoid_center)));
}

double ObstacleDistanceFeature(const Vec3& x, const Context& ctx,
                               const PathFeatureParams& params) {
  const double d2 = (x - ctx.obstacle_center).squaredNorm();
  return std::exp(-params.beta * d2);
}

double ObstacleSideFeature(const Vec3& x, const Context& ctx,
                           const PathFeatureParams& params) {
  return PathFeatureModel(ctx, params).Side(x);
}

Eigen::VectorXd VelocityRbf(double speed, const VelocityFeatureParams& params) {
  const std::vector<double> centers = params.Centers();
  Eigen::VectorXd psi(params.n);
  const double scaled = params.epsilon * speed;
  for (int j = 0; j < params.n; ++j) {
    const double r = scaled - centers[j];
    psi[j] = std::exp(-r * r);
  }
  return psi;
}

double CollisionCost(const Vec3& x, const Context& ctx,
                     const RobotObjectiveParams& params) {
  const double d = (x - ctx.obstacle_center).norm();
  if (d >= params.d_safe) return 0.0;
  return std::expm1(params.kappa * (params.d_safe - d));
}

PathFeatureModel::PathFeatureModel(const Context& ctx,
                                   const PathFeatureParams& params)
    : ctx_(ctx), params_(params), normal_(SidePlaneNormal(ctx, params)) {}

double PathFeatureModel::Height(const Vec3& x) const {
  return HeightFeature(x, ctx_, params_);
}

double PathFeatureModel::Distance(const Vec3& x) const {
  return ObstacleDistanceFeature(x, ctx_, params_);
}

double PathFeatureModel::Side(const Vec3& x) const {
  const double s = normal_.dot(x - ctx_.obstacle_center);
  // 2 / (1 + e^{gamma s}) - 1 == -tanh(gamma s / 2), which stays accurate for
  // small |s| and cannot overflow.
  return -std::tanh(0.5 * params_.gamma * s);
}

Vec3 PathFeatureModel::operator()(const Vec3& x) const {
  return Vec3(Height(x), Distance(x), Side(x));
}

Vec3 PathFeatureCount(const DiscreteTrajectory& traj, const Context& ctx,
                      const PathFeatureParams& params) {
  const PathFeatureModel model(ctx, params);
  Vec3 total = Vec3::Zero();
  for (const State& s : traj) total += model(s.x);
  return total;
}

Eigen::VectorXd FeatureCount::phi_V() const {
  Eigen::VectorXd out(phi_V1.size() + phi_V2.size());
  out << phi_V1, phi_V2;
  return out;
}

FeatureCount VelocityFeatureCount(const SegmentSet& segments,
                                  const VelocityFeatureParams& params) {
  FeatureCount out;
  out.phi_V1 = Eigen::VectorXd::Zero(params.n);
  out.phi_V2 = Eigen::VectorXd::Zero(params.n);
  for (const Segment& seg : segments) {
    const Eigen::VectorXd psi = VelocityRbf(seg.mean_speed, params);
    if (seg.obstacle_distance < params.d_c) {
      out.phi_V1 += psi;
      ++out.count_V1;
    } else {
      out.phi_V2 += psi;
      ++out.count_V2;
    }
  }
  if (out.count_V1 == 0 && out.count_V2 > 0) {
    out.phi_V1 = out.phi_V2 / out.count_V2;
  } else if (out.count_V2 == 0 && out.count_V1 > 0) {
    out.phi_V2 = out.phi_V1 / out.count_V1;
  }
  return out;
}

FeatureCount ComputeFeatureCount(const DiscreteTrajectory& traj,
                                 const Context& ctx,
                                 const ModelParams& params) {
  if (static_cast<int>(traj.size()) != params.sampling.N) {
    throw Error(ErrorCode::kDimensionMismatch,
                "feature counts need N=" + std::to_string(params.sampling.N) +
                    " samples, got " + std::to_string(traj.size()));
  }
  const SegmentSet segments = SegmentTrajectory(traj, params.sampling.M, ctx);
  FeatureCount out = VelocityFeatureCount(segments, params.velocity);
  out.phi_P = PathFeatureCount(traj, ctx, params.path);
  return out;
}

double RobotPathObjective(const DiscreteTrajectory& traj, const Context& ctx,
                          const RobotObjectiveParams& params) {
  double collision = 0.0;
  for (const State& s : traj) collision += CollisionCost(s.x, ctx, params);
  return -params.theta_RP[0] * PathLength(traj) -
         params.theta_RP[1] * collision;
}

double RobotSpeedReward(double speed, const VelocityFeatureParams& velocity,
                        const RobotObjectiveParams& robot) {
  const double r = velocity.epsilon * (speed - robot.v_robot);
  return std::exp(-r * r);
}

double RobotVelocityObjective(const SegmentSet& segments,
                              const VelocityFeatureParams& velocity,
                              const RobotObjectiveParams& robot) {
  double total = 0.0;
  for (const Segment& seg : segments) {
    total += RobotSpeedReward(seg.mean_speed, velocity, robot);
  }
  return robot.theta_RV * total;
}

}  // namespace prefplan
