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

#ifndef PREFPLAN_CONTEXT_H_
#define PREFPLAN_CONTEXT_H_

#include <Eigen/Core>

namespace prefplan {

using Vec3 = Eigen::Vector3d;

// Task scene for one pick-and-place transfer. All lengths in meters, the z
// axis points up and the robot base sits at `robot_base`.
struct Context {
  Vec3 start = Vec3::Zero();
  Vec3 goal = Vec3::Zero();
  Vec3 obstacle_center = Vec3::Zero();
  double obstacle_radius = 0.0;
  double table_height = 0.0;
  Vec3 workspace_low = Vec3::Zero();
  Vec3 workspace_upp = Vec3::Zero();
  Vec3 robot_base = Vec3::Zero();

  // Throws Error(kDegenerateContext) if any invariant is violated.
  void Validate() const;

  bool InWorkspace(const Vec3& p, double slack = 0.0) const;

  // Same scene shifted rigidly by `offset`.
  Context Translated(const Vec3& offset) const;

  bool operator==(const Context&) const = default;
};

}  // namespace prefplan

#endif  // PREFPLAN_CONTEXT_H_
