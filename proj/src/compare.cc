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

#include "prefplan/compare.h"

#include <algorithm>
#include <limits>

#include "prefplan/error.h"
#include "prefplan/planner.h"

namespace prefplan {
namespace {

constexpr double kSlowdownRatio = 0.8;

MethodScore Score(const DiscreteTrajectory& reference,
                  const DiscreteTrajectory& traj, const Scenario& scenario) {
  MethodScore score;
  score.error =
      PathPreferenceErrors(reference, traj, scenario.context, scenario.params);
  score.normalized_distance = NormalizedDistance(
      reference, traj, scenario.context, scenario.params.sampling.N);
  score.speeds = MeanBinSpeeds(traj, scenario.context, scenario.params);
  score.min_obstacle_distance = std::numeric_limits<double>::infinity();
  for (const State& s : traj) {
    score.min_obstacle_distance =
        std::min(score.min_obstacle_distance,
                 (s.x - scenario.context.obstacle_center).norm());
  }
  return score;
}

}  // namespace

bool MethodScore::SlowNearObstacle() const {
  return speeds.close && speeds.far &&
         *speeds.close <= kSlowdownRatio * *speeds.far;
}

Comparison RunComparison(const WeightState& learned,
                         const DiscreteTrajectory& demo,
                         const GroundTruthUser& user,
                         std::span<const Scenario> scenarios,
                         const DmpConfig& config) {
  if (scenarios.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no scenarios to compare");
  }
  const DmpModel model = FitDmp(demo, config);
  const DiscreteTrajectory replay = RolloutDmp(model, scenarios[0].context);

  Comparison out;
  out.fit = CompareToReference(demo, replay);
  out.fit_goal_error = (replay.back().x - scenarios[0].context.goal).norm();
  for (const Scenario& scenario : scenarios) {
    const DiscreteTrajectory reference =
        Demonstrate(GroundTruthUser{user.theta_true_P, user.theta_true_V, 0.0,
                                    0.0, user.seed},
                    scenario.context, scenario.params);
    const DiscreteTrajectory coactive =
        Plan(learned, scenario.context, scenario.params).trajectory;
    const DiscreteTrajectory dmp = RolloutDmp(model, scenario.context);
    out.rows.push_back({scenario.name, Score(reference, coactive, scenario),
                        Score(reference, dmp, scenario)});
  }
  return out;
}

}  // namespace prefplan
