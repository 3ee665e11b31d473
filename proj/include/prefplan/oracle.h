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

#ifndef PREFPLAN_ORACLE_H_
#define PREFPLAN_ORACLE_H_

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "prefplan/context.h"
#include "prefplan/learning.h"
#include "prefplan/params.h"
#include "prefplan/planner.h"
#include "prefplan/trajectory.h"

namespace prefplan {

// Simulated demonstrator: plans with its true weights, then perturbs the
// middle waypoint (Gaussian, meters) and every segment duration
// (log-normal factor).
struct GroundTruthUser {
  Vec3 theta_true_P = Vec3::Zero();
  Eigen::VectorXd theta_true_V;
  double noise_sigma_pos = 0.0;
  double noise_sigma_dur = 0.0;
  std::uint64_t seed = 0;

  WeightState Weights() const;
  void Validate(int rbf_count) const;
};

// Isotropic Gaussian offset of `sigma` meters, clamped to the workspace.
Vec3 PerturbWaypoint(const Vec3& mid, double sigma, const Context& ctx,
                     std::mt19937_64& rng);

// Applies the user's noise to an optimal plan. Returns the plan's
// trajectory unchanged when both sigmas are zero.
DiscreteTrajectory PerturbPlan(const PlanResult& optimum,
                               const GroundTruthUser& user, const Context& ctx,
                               const ModelParams& params, std::mt19937_64& rng);

DiscreteTrajectory Demonstrate(const GroundTruthUser& user, const Context& ctx,
                               const ModelParams& params, std::mt19937_64& rng);

// Uses a generator seeded with user.seed.
DiscreteTrajectory Demonstrate(const GroundTruthUser& user, const Context& ctx,
                               const ModelParams& params);

struct GridOptimum {
  Vec3 mid = Vec3::Zero();
  double objective = 0.0;
};

// Exhaustive scan of the path objective over `resolution`^3 evenly spaced
// points spanning the workspace box (bounds included). Throws
// Error(kInvalidArgument) for resolution < 11.
GridOptimum BruteForcePath(const Vec3& theta_HP, const Context& ctx,
                           const ModelParams& params, int resolution);

struct LevelOptimum {
  std::vector<double> times;
  std::vector<double> speeds;
  double objective = 0.0;
};

// Best assignment of one speed level per segment. Exhaustive for up to
// `exhaustive_limit` segments, multi-start coordinate descent beyond.
// Assignments that exceed t_upp are slowed down uniformly until they fit.
// Levels default to the RBF center speeds.
LevelOptimum BruteForceVelocity(const VelocityProblem& problem,
                                std::span<const double> levels = {},
                                int exhaustive_limit = 8);

// Per-feature path count error |Phi_i(traj) - Phi_i(reference)| / N.
struct PreferenceErrors {
  double height = 0.0;
  double distance = 0.0;
  double side = 0.0;

  double total() const { return height + distance + side; }
};

// Both trajectories are resampled evenly by arc length to N states first.
PreferenceErrors PathPreferenceErrors(const DiscreteTrajectory& reference,
                                      const DiscreteTrajectory& traj,
                                      const Context& ctx,
                                      const ModelParams& params);

// Euclidean norm of the normalized feedback [dPhi_P / N; dPhi_V / M]
// between the two trajectories.
double TotalFeatureError(const DiscreteTrajectory& reference,
                         const DiscreteTrajectory& traj, const Context& ctx,
                         const ModelParams& params);

// Mean distance between index-paired samples after resampling both
// trajectories evenly by arc length to `samples` states, divided by the
// start-goal distance.
double NormalizedDistance(const DiscreteTrajectory& reference,
                          const DiscreteTrajectory& traj, const Context& ctx,
                          int samples = 80);

// Index-wise mean of trajectories resampled evenly by arc length.
DiscreteTrajectory MeanTrajectory(std::span<const DiscreteTrajectory> trajs,
                                  int samples);

// True reward of a trajectory: theta_true . [Phi_P; Phi_V].
double TrueReward(const GroundTruthUser& user, const DiscreteTrajectory& traj,
                  const Context& ctx, const ModelParams& params);

struct BinSpeeds {
  std::optional<double> close;
  std::optional<double> far;
};

// Mean segment speed per distance bin.
BinSpeeds MeanBinSpeeds(const DiscreteTrajectory& traj, const Context& ctx,
                        const ModelParams& params);

// Two plans that each break one of the user's path preferences: the first
// with the height weight negated, the second with the side weight negated.
struct Dummies {
  PlanResult wrong_height;
  PlanResult wrong_side;
};

Dummies MakeDummies(const GroundTruthUser& user, const Context& ctx,
                    const ModelParams& params);

struct ScenarioScore {
  std::string name;
  bool trained = false;
  double distance_optimized = 0.0;
  double distance_wrong_height = 0.0;
  double distance_wrong_side = 0.0;
  PreferenceErrors error_optimized;
  PreferenceErrors error_wrong_height;
  PreferenceErrors error_wrong_side;
  double total_error_optimized = 0.0;
};

struct ExperimentReport {
  // Index 0 is the first plan, before any feedback.
  std::vector<double> total_error;
  std::vector<Eigen::VectorXd> error_vectors;
  std::vector<double> regret;
  std::vector<WeightState> weights;
  std::vector<ScenarioScore> scenarios;
  // Seconds per iteration; informational, not part of the document.
  std::vector<double> wall_clock_seconds;
};

// Trains on scenarios[0] until the total feature error against the noiseless
// demonstration drops below `tolerance` or `max_iters` feedback rounds have
// run, then scores plans with the learned weights in every scenario against
// noiseless demonstrations and both dummies.
ExperimentReport RunClosedLoop(const GroundTruthUser& user,
                               std::span<const Scenario> scenarios,
                               int max_iters, double tolerance = 0.0);

}  // namespace prefplan

#endif  // PREFPLAN_ORACLE_H_
