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

#ifndef PREFPLAN_IO_H_
#define PREFPLAN_IO_H_

#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prefplan/compare.h"
#include "prefplan/context.h"
#include "prefplan/learning.h"
#include "prefplan/oracle.h"
#include "prefplan/params.h"
#include "prefplan/planner.h"
#include "prefplan/trajectory.h"

namespace prefplan {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

// Raw positions as recorded; velocities are recovered by PreprocessDemo.
struct DemoSample {
  double t = 0.0;
  Vec3 x = Vec3::Zero();

  bool operator==(const DemoSample&) const = default;
};

struct Demonstration {
  std::vector<DemoSample> samples;
  std::optional<FeedbackMode> mode;

  bool operator==(const Demonstration&) const = default;
};

struct TrajectoryRecord {
  DiscreteTrajectory trajectory;
  std::optional<PlanDiagnostics> diagnostics;
};

// Document <-> value conversions. The *FromJson functions reject unknown
// fields, check format_version and re-validate every invariant of the
// value. Schema problems throw ValidationError listing each offending
// field; a format_version other than the current one throws
// Error(kUnsupportedVersion).
Json ScenarioToJson(const Scenario& scenario);
Scenario ScenarioFromJson(const Json& doc);

Json DemonstrationToJson(const Demonstration& demo);
Demonstration DemonstrationFromJson(const Json& doc);

Json TrajectoryToJson(const TrajectoryRecord& record);
TrajectoryRecord TrajectoryFromJson(const Json& doc);

Json SessionToJson(const Session& session);
Session SessionFromJson(const Json& doc);

Json UserToJson(const GroundTruthUser& user);
GroundTruthUser UserFromJson(const Json& doc);

Json ReportToJson(const ExperimentReport& report);
ExperimentReport ReportFromJson(const Json& doc);

// Pieces shared with the service.
Json WeightsToJson(const WeightState& weights);
// Weights object as embedded in sessions and service responses.
WeightState WeightsFromJson(const Json& doc);
Json DiagnosticsToJson(const PlanDiagnostics& diagnostics);
Json PreferenceErrorsToJson(const PreferenceErrors& errors);
// Output only; comparisons are not read back.
Json ComparisonToJson(const Comparison& comparison);

// Two-space indented text with a trailing newline.
std::string Serialize(const Json& doc);
// Throws ValidationError for malformed text.
Json ParseJson(std::string_view text);

// Throws Error(kIo) when the file cannot be read.
Json ReadJsonFile(const std::filesystem::path& path);
// Writes a sibling temporary file, then renames it over `path`.
void WriteFileAtomic(const std::filesystem::path& path,
                     std::string_view contents);

Scenario LoadScenario(const std::filesystem::path& path);
Demonstration LoadDemonstration(const std::filesystem::path& path);
TrajectoryRecord LoadTrajectory(const std::filesystem::path& path);
Session LoadSession(const std::filesystem::path& path);
GroundTruthUser LoadUser(const std::filesystem::path& path);
ExperimentReport LoadReport(const std::filesystem::path& path);

void Save(const std::filesystem::path& path, const Json& doc);

// Directory named by PREFPLAN_CONFIG_DIR, or the working directory.
std::filesystem::path ConfigDir();
// `name` as given if it exists or is absolute, else relative to ConfigDir().
std::filesystem::path ResolveConfigPath(const std::filesystem::path& name);

// Centered moving average of positions (window 5, endpoints pinned),
// central-difference velocities smoothed the same way, then even arc-length
// resampling to N states. Throws ValidationError for non-increasing times
// and Error(kInvalidSegmentation) if the result cannot be split into M
// segments.
DiscreteTrajectory PreprocessDemo(const Demonstration& demo, const Context& ctx,
                                  const ModelParams& params);

// Preprocesses `demo` and steps the session against the current plan sent
// through the same preprocessing, so that resubmitting the plan is an exact
// zero step. Stored plans are left untouched.
// Throws Error(kNoPlan) if the current iteration has not been planned.
Session StepSessionWithDemo(const Session& session, const Demonstration& demo,
                            FeedbackMode mode, const ModelParams& params);

// Positions and times of a trajectory as a demonstration.
Demonstration ToDemonstration(const DiscreteTrajectory& traj,
                              std::optional<FeedbackMode> mode = {});

}  // namespace prefplan

#endif  // PREFPLAN_IO_H_
