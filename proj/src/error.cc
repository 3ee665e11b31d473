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

#include "prefplan/error.h"

#include <sstream>

namespace prefplan {
namespace {

std::string JoinIssues(const std::vector<ValidationError::Issue>& issues) {
  std::ostringstream out;
  out << "validation failed:";
  for (const auto& issue : issues) {
    out << " [" << issue.field << ": " << issue.message << "]";
  }
  return out.str();
}

}  // namespace

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "invalid-argument";
    case ErrorCode::kInvalidWaypoints:
      return "invalid-waypoints";
    case ErrorCode::kInvalidSegmentation:
      return "invalid-segmentation";
    case ErrorCode::kDegenerateContext:
      return "degenerate-context";
    case ErrorCode::kDimensionMismatch:
      return "dimension-mismatch";
    case ErrorCode::kOutOfBounds:
      return "out-of-bounds";
    case ErrorCode::kInfeasible:
      return "infeasible";
    case ErrorCode::kNoPlan:
      return "no-plan";
    case ErrorCode::kValidation:
      return "validation";
    case ErrorCode::kUnsupportedVersion:
      return "unsupported-version";
    case ErrorCode::kDivergence:
      return "divergence";
    case ErrorCode::kIo:
      return "io";
  }
  return "unknown";
}

ValidationError::ValidationError(std::vector<Issue> issues)
    : Error(ErrorCode::kValidation, JoinIssues(issues)),
      issues_(std::move(issues)) {}

}  // namespace prefplan
