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

#ifndef PREFPLAN_PLANNER_H_
#define PREFPLAN_PLANNER_H_

#include <Eigen/Core>
#include <functional>
#include <span>
#include <vector>

#include "prefplan/context.h"
#include "prefplan/features.h"
#include "prefplan/learning.h"
#include "prefplan/params.h"
#include "prefplan/trajectory.h"

namespace prefplan {

// Called with the fraction of the evaluation budget consumed so far.
using ProgressFn = std::function<void(double)>;

// Search for the middle waypoint of a start-mid-goal path.
struct PathProblem {
  Context context;
  Vec3 theta_HP = Vec3::Zero();
  ModelParams params;
};

struct PathSolution {
  Vec3 mid = Vec3::Zero();
  std::array<Vec3, 3> waypoints;
  double objective = 0.0;
  int evaluations = 0;
  int restarts = 0;
  bool converged = false;
};

// Start-mid-goal spline on the constant-velocity time vector, sampled at N
// uniform times.
DiscreteTrajectory PathTrajectory(const Vec3& mid, const Context& ctx,
                                  const SamplingParams& sampling);

// theta_HP . Phi_P + robot path objective of the trajectory through `mid`.
// Paths whose samples leave the workspace box score -1e6 * (1 + total
// excursion), so any path that stays inside is preferred. Throws
// Error(kOutOfBounds) if `mid` lies outside the workspace box.
double PathObjective(const Vec3& mid, const PathProblem& problem);

// Grid scan over the workspace box, then simplex refinement from the best
// cells. Equal objectives prefer the shorter path, then the
// lexicographically smaller waypoint.
PathSolution OptimizePath(const PathProblem& problem,
                          const ProgressFn& progress = {});

// Timing of a fixed path split into M segments.
struct VelocityProblem {
  std::vector<Vec3> waypoints;             // segment end points, last is goal
  std::vector<double> lengths;             // segment arc lengths
  std::vector<double> obstacle_distances;  // of segment mean positions
  Eigen::VectorXd theta_HV;                // [close bin; far bin]
  VelocityFeatureParams velocity;
  RobotObjectiveParams robot;
  double t_upp = 0.0;
  int max_evaluations = 20000;

  int segments() const { return static_cast<int>(lengths.size()); }
  // Throws Error(kInfeasible) if t_upp cannot be met at v_max and
  // Error(kInvalidArgument) for malformed inputs.
  void Validate() const;
};

// t_upp defaults to params.optimizer.t_upp_factor * length / v_robot.
VelocityProblem MakeVelocityProblem(const SegmentSet& segments,
                                    const Eigen::VectorXd& theta_HV,
                                    const ModelParams& params);

// Reward of one segment moving at `speed`:
// theta_bin . psi(speed) + theta_RV * robot speed reward.
double SegmentSpeedReward(double speed, int segment,
                          const VelocityProblem& problem);

// theta_HV . Phi_V + theta_RV * phi_RV for cumulative segment end times.
// Throws Error(kInfeasible) unless the times increase, every segment speed
// lies in [v_min, v_max] and the last time is at most t_upp.
double VelocityObjective(std::span<const double> times,
                         const VelocityProblem& problem);

struct VelocitySolution {
  std::vector<double> times;  // cumulative segment end times
  double objective = 0.0;
  int evaluations = 0;
  bool converged = false;
};

// Best speed per segment from a dense scan as a seed, then compass search
// over segment durations with the total-time cap.
VelocitySolution OptimizeVelocity(const VelocityProblem& problem,
                                  const ProgressFn& progress = {});

// Cumulative end times of `durations`, adjusted by at most a few ulps so
// that the speeds recomputed from them lie exactly within [v_min, v_max]
// and the last time does not exceed t_upp.
std::vector<double> FeasibleTimes(std::span<const double> durations,
                                  const VelocityProblem& problem);

// Spline through the start at t=0 and the segment end points at `times`,
// sampled at `count` uniform times.
DiscreteTrajectory AssembleTrajectory(const Vec3& start,
                                      std::span<const Vec3> waypoints,
                                      std::span<const double> times, int count);

struct PlanDiagnostics {
  int path_evaluations = 0;
  int velocity_evaluations = 0;
  int restarts = 0;
  bool path_converged = false;
  bool velocity_converged = false;
  bool collision = false;  // some sample inside the obstacle radius
  bool workspace_violation = false;
  double min_obstacle_distance = 0.0;
  double path_objective = 0.0;
  double velocity_objective = 0.0;
};

struct PlanResult {
  DiscreteTrajectory trajectory;
  Vec3 mid = Vec3::Zero();
  SegmentSet segments;        // of the constant-velocity path
  std::vector<double> times;  // optimized segment end times
  PlanDiagnostics diagnostics;
};

// Path search, segmentation, timing search and assembly.
PlanResult Plan(const WeightState& weights, const Context& ctx,
                const ModelParams& params, const ProgressFn& progress = {});

// Collision and workspace checks on a finished trajectory.
void CheckTrajectory(const DiscreteTrajectory& traj, const Context& ctx,
                     PlanDiagnostics* diagnostics);

}  // namespace prefplan

#endif  // PREFPLAN_PLANNER_H_
