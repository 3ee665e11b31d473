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

#ifndef PREFPLAN_PARAMS_H_
#define PREFPLAN_PARAMS_H_

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "prefplan/context.h"

namespace prefplan {

struct PathFeatureParams {
  double lambda = 10.0;           // 1/m, sigmoid slope
  double sigmoid_center = -0.20;  // m, enters as h + p
  double beta = 50.0;             // 1/m^2
  double gamma = 5.0;             // 1/m
  // Unit horizontal normal of the side plane. Derived from the context when
  // unset; see SidePlaneNormal().
  std::optional<Vec3> side_plane_normal;

  void Validate() const;
};

struct VelocityFeatureParams {
  int n = 9;
  double epsilon = 10.0;
  double v_min = 0.05;  // m/s
  double v_max = 0.60;  // m/s
  double d_c = 0.225;   // m, close/far bin threshold

  // n centers evenly spaced over [epsilon * v_min, epsilon * v_max].
  std::vector<double> Centers() const;
  void Validate() const;
};

struct RobotObjectiveParams {
  // Weights of the negated path length and the negated collision cost.
  Eigen::Vector2d theta_RP{2.0, 1.0};
  double theta_RV = 0.05;
  double v_robot = 0.15;  // m/s
  double d_safe = 0.11;   // m
  double kappa = 20.0;    // 1/m

  void Validate(const Context& ctx) const;
};

struct SamplingParams {
  int N = 80;
  int M = 10;
  double t_g = 5.0;  // s, nominal duration used only for path search

  void Validate() const;
};

struct OptimizerSettings {
  int grid = 9;                // grid cells per axis for path seeding
  int restarts = 5;            // best grid cells refined locally
  double tolerance = 1e-4;     // m, simplex size at convergence
  int max_evaluations = 4000;  // path objective budget per solve
  int velocity_max_evaluations = 20000;
  double t_upp_factor = 2.0;  // t_upp = factor * length / v_robot
  std::uint64_t seed = 1;

  void Validate() const;
};

struct LearningParams {
  double alpha = 0.1;
  std::optional<double> theta_max;  // symmetric clamp, off when unset

  void Validate() const;
};

// Everything the features, planner and learner need besides the context.
struct ModelParams {
  PathFeatureParams path;
  VelocityFeatureParams velocity;
  RobotObjectiveParams robot;
  SamplingParams sampling;
  OptimizerSettings optimizer;
  LearningParams learning;

  // Throws on the first violated invariant, including cross-checks against
  // the context (d_safe must exceed the obstacle radius).
  void Validate(const Context& ctx) const;
};

// Defaults with d_safe tied to the obstacle size.
ModelParams DefaultParams(const Context& ctx);

struct Scenario {
  std::string name;
  Context context;
  ModelParams params;
};

}  // namespace prefplan

#endif  // PREFPLAN_PARAMS_H_
