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

#include "prefplan/context.h"

#include <cmath>
#include <string>

#include "prefplan/error.h"

namespace prefplan {
namespace {

bool AllFinite(const Vec3& v) { return v.allFinite(); }

}  // namespace

void Context::Validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kDegenerateContext, "invalid context: " + what);
  };
  if (!AllFinite(start) || !AllFinite(goal) || !AllFinite(obstacle_center) ||
      !AllFinite(workspace_low) || !AllFinite(workspace_upp) ||
      !AllFinite(robot_base) || !std::isfinite(obstacle_radius) ||
      !std::isfinite(table_height)) {
    fail("non-finite value");
  }
  if ((workspace_low.array() >= workspace_upp.array()).any()) {
    fail("workspace_low must be below workspace_upp on every axis");
  }
  if ((start - goal).norm() <= 0.0) fail("start equals goal");
  if (obstacle_radius <= 0.0) fail("obstacle_radius must be positive");
  if (!InWorkspace(start)) fail("start outside workspace");
  if (!InWorkspace(goal)) fail("goal outside workspace");
}

bool Context::InWorkspace(const Vec3& p, double slack) const {
  return (p.array() >= workspace_low.array() - slack).all() &&
         (p.array() <= workspace_upp.array() + slack).all();
}

Context Context::Translated(const Vec3& offset) const {
  Context out = *this;
  out.start += offset;
  out.goal += offset;
  out.obstacle_center += offset;
  out.table_height += offset.z();
  out.workspace_low += offset;
  out.workspace_upp += offset;
  out.robot_base += offset;
  return out;
}

}  // namespace prefplan
