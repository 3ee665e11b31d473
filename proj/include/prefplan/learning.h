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

#ifndef PREFPLAN_LEARNING_H_
#define PREFPLAN_LEARNING_H_

#include <Eigen/Core>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prefplan/context.h"
#include "prefplan/features.h"
#include "prefplan/params.h"
#include "prefplan/trajectory.h"

namespace prefplan {

enum class FeedbackMode { kPathOnly, kVelocityOnly, kBoth };

// "path", "velocity", "both"
std::string_view FeedbackModeName(FeedbackMode mode);
std::optional<FeedbackMode> ParseFeedbackMode(std::string_view name);

struct WeightState {
  Vec3 theta_HP = Vec3::Zero();
  Eigen::VectorXd theta_HV;  // [close bin; far bin], 2n entries
  double alpha = 0.1;
  int iteration = 0;

  static WeightState Zero(int rbf_count, double alpha);
  void Validate() const;

  bool operator==(const WeightState& other) const;
};

// theta + alpha * (phi_human - phi_robot). Throws
// Error(kDimensionMismatch) on size mismatch and Error(kInvalidArgument)
// for alpha outside (0, 1].
Eigen::VectorXd UpdateWeights(const Eigen::VectorXd& theta,
                              const Eigen::VectorXd& phi_human,
                              const Eigen::VectorXd& phi_robot, double alpha);

// Feature-count difference between a demonstration and a plan.
struct Feedback {
  Vec3 delta_path = Vec3::Zero();
  Eigen::VectorXd delta_velocity;  // [close bin; far bin]
};

// Bin-matched difference. When one trajectory leaves a bin empty that the
// other occupies, the empty bin is imputed as its per-segment mean of the
// occupied bin times the other trajectory's count in that bin.
Feedback ComputeFeedback(const FeatureCount& human, const FeatureCount& robot);

// Both trajectories must carry params.sampling.N samples.
Feedback ComputeFeedback(const DiscreteTrajectory& demo,
                         const DiscreteTrajectory& plan, const Context& ctx,
                         const ModelParams& params);

// Path deltas divided by N, velocity deltas by M.
Feedback NormalizeFeedback(const Feedback& raw, int N, int M);

// One coactive step on the components selected by `mode`.
WeightState ApplyFeedback(const WeightState& weights,
                          const Feedback& normalized, FeedbackMode mode,
                          const LearningParams& learning);

// Learning history for one context. weights[i] is in effect at iteration i,
// plans[i] was planned with weights[i], and demonstrations[i] / modes[i]
// produced weights[i + 1].
struct Session {
  Context context;
  std::vector<WeightState> weights;
  std::vector<DiscreteTrajectory> plans;
  std::vector<DiscreteTrajectory> demonstrations;
  std::vector<FeedbackMode> modes;

  static Session Start(const Context& ctx, const WeightState& initial);

  int iteration() const { return static_cast<int>(weights.size()) - 1; }
  const WeightState& current() const { return weights.back(); }
  // Plan made with the current weights, if any.
  const DiscreteTrajectory* current_plan() const;

  // Throws Error(kInvalidArgument) if history lengths are inconsistent.
  void Validate() const;

  bool operator==(const Session&) const = default;
};

// Records `plan` as the plan for the current iteration, replacing any
// earlier one.
Session WithPlan(Session session, DiscreteTrajectory plan);

// Compares `demo` to the current plan (both resampled evenly by arc length
// to N states), applies the update and advances the iteration. Throws
// Error(kNoPlan) if the current iteration has not been planned yet.
Session StepSession(const Session& session, const DiscreteTrajectory& demo,
                    FeedbackMode mode, const ModelParams& params);

}  // namespace prefplan

#endif  // PREFPLAN_LEARNING_H_
