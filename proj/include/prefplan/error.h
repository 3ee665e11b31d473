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

#ifndef PREFPLAN_ERROR_H_
#define PREFPLAN_ERROR_H_

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace prefplan {

enum class ErrorCode {
  kInvalidArgument,
  kInvalidWaypoints,
  kInvalidSegmentation,
  kDegenerateContext,
  kDimensionMismatch,
  kOutOfBounds,
  kInfeasible,
  kNoPlan,
  kValidation,
  kUnsupportedVersion,
  kDivergence,
  kIo,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Schema violation. Carries one entry per offending field so callers can
// report all of them at once.
class ValidationError : public Error {
 public:
  struct Issue {
    std::string field;
    std::string message;
  };

  explicit ValidationError(std::vector<Issue> issues);

  const std::vector<Issue>& issues() const { return issues_; }

 private:
  std::vector<Issue> issues_;
};

}  // namespace prefplan

#endif  // PREFPLAN_ERROR_H_
