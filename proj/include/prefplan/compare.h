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

#ifndef PREFPLAN_COMPARE_H_
#define PREFPLAN_COMPARE_H_

#include <span>
#include <string>
#include <vector>

#include "prefplan/dmp.h"
#include "prefplan/learning.h"
#include "prefplan/oracle.h"
#include "prefplan/params.h"
#include "prefplan/trajectory.h"

namespace prefplan {

// How one generated trajectory fares against the user's own plan.
struct MethodScore {
  PreferenceErrors error;
  double normalized_distance = 0.0;
  BinSpeeds speeds;
  double min_obstacle_distance = 0.0;

  // Close-bin mean speed at least 20% below the far-bin mean.
  bool SlowNearObstacle() const;
};

struct ComparisonRow {
  std::string name;
  MethodScore coactive;
  MethodScore dmp;
};

struct Comparison {
  Reproduction fit;  // DMP rollout vs the demonstration it was fit to
  double fit_goal_error = 0.0;  // m, rollout endpoint to the training goal
  std::vector<ComparisonRow> rows;
};

// Fits a DMP to `demo`, recorded in scenarios[0], then generates one
// trajectory per scenario with the learned weights and one with the DMP.
// Both are scored against the noiseless plan of `user`.
Comparison RunComparison(const WeightState& learned,
                         const DiscreteTrajectory& demo,
                         const GroundTruthUser& user,
                         std::span<const Scenario> scenarios,
                         const DmpConfig& config = {});

}  // namespace prefplan

#endif  // PREFPLAN_COMPARE_H_
