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

#include "prefplan/params.h"

#include <cmath>
#include <string>

#include "prefplan/error.h"

namespace prefplan {
namespace {

void Require(bool ok, const std::string& what) {
  if (!ok)
    throw Error(ErrorCode::kInvalidArgument, "invalid parameter: " + what);
}

}  // namespace

void PathFeatureParams::Validate() const {
  Require(lambda > 0.0 && std::isfinite(lambda), "lambda must be positive");
  Require(std::isfinite(sigmoid_center), "sigmoid_center must be finite");
  Require(beta > 0.0 && std::isfinite(beta), "beta must be positive");
  Require(gamma > 0.0 && std::isfinite(gamma), "gamma must be positive");
  if (side_plane_normal) {
    Require(std::abs(side_plane_normal->norm() - 1.0) < 1e-9,
            "side_plane_normal must have unit norm");
    Require(std::abs(side_plane_normal->z()) < 1e-9,
            "side_plane_normal must be horizontal");
  }
}

std::vector<double> VelocityFeatureParams::Centers() const {
  std::vector<double> centers(static_cast<std::size_t>(n));
  const double lo = epsilon * v_min;
  const double hi = epsilon * v_max;
  for (int j = 0; j < n; ++j) {
    centers[j] = j + 1 == n ? hi : lo + (hi - lo) * j / (n - 1);
  }
  return centers;
}

void VelocityFeatureParams::Validate() const {
  Require(n >= 2, "n must be at least 2");
  Require(epsilon > 0.0 && std::isfinite(epsilon), "epsilon must be positive");
  Require(v_min > 0.0 && v_min < v_max && std::isfinite(v_max),
          "need 0 < v_min < v_max");
  Require(d_c > 0.0 && std::isfinite(d_c), "d_c must be positive");
}

void RobotObjectiveParams::Validate(const Context& ctx) const {
  Require(theta_RP.allFinite() && (theta_RP.array() >= 0.0).all(),
          "theta_RP must be non-negative");
  Require(theta_RV >= 0.0 && std::isfinite(theta_RV),
          "theta_RV must be non-negative");
  Require(v_robot > 0.0 && std::isfinite(v_robot), "v_robot must be positive");
  Require(d_safe > ctx.obstacle_radius && std::isfinite(d_safe),
          "d_safe must exceed obstacle_radius");
  Require(kappa > 0.0 && std::isfinite(kappa), "kappa must be positive");
}

void SamplingParams::Validate() const {
  Require(N >= 3, "N must be at least 3");
  Require(M >= 2 && M < N, "need 2 <= M < N");
  Require(t_g > 0.0 && std::isfinite(t_g), "t_g must be positive");
}

void OptimizerSettings::Validate() const {
  Require(grid >= 2, "grid must be at least 2");
  Require(restarts >= 1, "restarts must be at least 1");
  Require(tolerance > 0.0, "tolerance must be positive");
  Require(max_evaluations > 0, "max_evaluations must be positive");
  Require(velocity_max_evaluations > 0,
          "velocity_max_evaluations must be positive");
  Require(t_upp_factor >= 1.0, "t_upp_factor must be at least 1");
}

void LearningParams::Validate() const {
  Require(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
  if (theta_max) Require(*theta_max > 0.0, "theta_max must be positive");
}

void ModelParams::Validate(const Context& ctx) const {
  ctx.Validate();
  path.Validate();
  velocity.Validate();
  robot.Validate(ctx);
  sampling.Validate();
  optimizer.Validate();
  learning.Validate();
  Require(robot.v_robot >= velocity.v_min && robot.v_robot <= velocity.v_max,
          "v_robot must lie within [v_min, v_max]");
}

ModelParams DefaultParams(const Context& ctx) {
  ModelParams params;
  params.robot.d_safe = ctx.obstacle_radius + 0.05;
  return params;
}

}  // namespace prefplan
