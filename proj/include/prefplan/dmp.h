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

#ifndef PREFPLAN_DMP_H_
#define PREFPLAN_DMP_H_

#include <Eigen/Core>
#include <vector>

#include "prefplan/context.h"
#include "prefplan/trajectory.h"

namespace prefplan {

// Discrete movement primitive with a steering coupling term and a surface
// barrier around the obstacle.
struct DmpConfig {
  int basis = 25;          // forcing RBFs per axis
  double stiffness = 100;  // K
  double damping = 20;     // D, critically damped for K = 100
  double phase_decay = 4;  // alpha_s
  int steps_per_tau = 1000;
  // Steering: gamma * R v * phi * exp(-beta * phi) * exp(-decay * clearance).
  double steer_gain = 600;
  double steer_beta = 3.0;
  double steer_decay = 20;  // 1/m
  // Barrier acting within `barrier_margin` of the obstacle surface.
  double barrier_gain = 2e-4;
  double barrier_margin = 0.04;  // m
  bool avoid_obstacle = true;
  double goal_tolerance = 5e-4;    // m, convergence radius
  double speed_tolerance = 5e-3;   // m/s
  double max_duration_factor = 3;  // rollout stops by this multiple of tau
  double ridge = 1e-9;

  // Throws Error(kInvalidArgument).
  void Validate() const;
};

struct DmpModel {
  DmpConfig config;
  Vec3 start = Vec3::Zero();
  Vec3 goal = Vec3::Zero();
  double tau = 1.0;                      // demonstration duration, s
  int samples = 0;                       // demonstration sample count
  Vec3 initial_velocity = Vec3::Zero();  // demonstrated, m/s
  Eigen::VectorXd centers;               // in phase
  Eigen::VectorXd widths;
  Eigen::MatrixXd weights;  // basis x 3
};

// Least-squares fit of the forcing term to a spline through the
// demonstration. Throws Error(kInvalidArgument) for fewer than 20 samples
// and Error(kDegenerateContext) when start and goal coincide.
DmpModel FitDmp(const DiscreteTrajectory& demo, const DmpConfig& config = {});

// Integrates from ctx.start toward ctx.goal, coupling to ctx's obstacle.
// Samples are spaced tau / (samples - 1) apart; integration continues past
// tau until the state rests at the goal, with the final sample exactly at
// the stopping time. Throws Error(kDivergence) with the state on blow-up.
DiscreteTrajectory RolloutDmp(const DmpModel& model, const Context& ctx);

struct Reproduction {
  double rmse = 0.0;               // m
  double speed_correlation = 0.0;  // Pearson, of speed profiles
};

// Compares a trajectory to a reference at the reference's timestamps,
// interpolating linearly.
Reproduction CompareToReference(const DiscreteTrajectory& reference,
                                const DiscreteTrajectory& traj);

}  // namespace prefplan

#endif  // PREFPLAN_DMP_H_
