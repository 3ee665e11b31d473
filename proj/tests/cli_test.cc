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

#include <gtest/gtest.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "prefplan/io.h"
#include "prefplan/oracle.h"
#include "test_util.h"

namespace prefplan {
namespace {

namespace fs = std::filesystem;
using testing::MakeScenario;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("prefplan_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Runs the CLI with `args`; returns the exit status.
  int Run(const std::string& args) {
    const std::string command = std::string(PREFPLAN_CLI) + " " + args + " > " +
                                (dir_ / "stdout").string() + " 2> " +
                                (dir_ / "stderr").string();
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string Slurp(const fs::path& path) const {
    std::ifstream in(path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
  }

  std::string Data(const std::string& relative) const {
    return (fs::path(PREFPLAN_DATA_DIR) / relative).string();
  }

  fs::path dir_;
};

TEST_F(CliTest, EvalOfDemoAgainstItselfIsZero) {
  const Context ctx = testing::TrainingScene();
  const DiscreteTrajectory demo = Demonstrate(
      testing::HighFarCloseUser(0.02, 0.05), ctx, DefaultParams(ctx));
  Save(dir_ / "demo.json", DemonstrationToJson(ToDemonstration(demo)));
  const std::string demo_path = (dir_ / "demo.json").string();
  ASSERT_EQ(Run("eval --scenario " + Data("scenarios/training.json") +
                " --demo " + demo_path + " --trajectory " + demo_path +
                " --out " + (dir_ / "eval.json").string()),
            0)
      << Slurp(dir_ / "stderr");
  const Json result = ReadJsonFile(dir_ / "eval.json");
  EXPECT_EQ(result["normalized_distance"], 0.0);
  EXPECT_EQ(result["error_total"], 0.0);
}

TEST_F(CliTest, SimulateIsDeterministic) {
  const std::string args =
      "simulate --scenario " + Data("scenarios/training.json") + " --user " +
      Data("users/high_far_close_noisy.json") + " --iters 3 --out ";
  ASSERT_EQ(Run(args + (dir_ / "a.json").string()), 0)
      << Slurp(dir_ / "stderr");
  ASSERT_EQ(Run(args + (dir_ / "b.json").string()), 0);
  const std::string a = Slurp(dir_ / "a.json");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, Slurp(dir_ / "b.json"));
  EXPECT_NO_THROW(ReportFromJson(ParseJson(a)));
}

TEST_F(CliTest, ZeroWeightPlanInOpenSceneIsNearlyStraight) {
  const Context ctx = testing::OpenScene();
  Save(dir_ / "open.json", ScenarioToJson(MakeScenario("open", ctx)));
  ASSERT_EQ(Run("plan --scenario " + (dir_ / "open.json").string() + " --out " +
                (dir_ / "plan.json").string()),
            0)
      << Slurp(dir_ / "stderr");
  const TrajectoryRecord plan = LoadTrajectory(dir_ / "plan.json");
  const Vec3 dir = (ctx.goal - ctx.start).normalized();
  double worst = 0.0;
  for (const State& s : plan.trajectory) {
    const Vec3 rel = s.x - ctx.start;
    worst = std::max(worst, (rel - rel.dot(dir) * dir).norm());
  }
  // The 41-point grid oracle's best lies on the line as well.
  const GridOptimum best =
      BruteForcePath(Vec3::Zero(), ctx, DefaultParams(ctx), 41);
  const Vec3 rel = best.mid - ctx.start;
  EXPECT_LT((rel - rel.dot(dir) * dir).norm(), 0.01);
  EXPECT_LT(worst, 0.01);
}

TEST_F(CliTest, TrainWritesSessionAndPlan) {
  const Context ctx = testing::TrainingScene();
  const DiscreteTrajectory demo =
      Demonstrate(testing::HighFarCloseUser(), ctx, DefaultParams(ctx));
  Save(dir_ / "demo.json", DemonstrationToJson(ToDemonstration(demo)));
  ASSERT_EQ(Run("train --scenario " + Data("scenarios/training.json") +
                " --demo " + (dir_ / "demo.json").string() + " --out " +
                (dir_ / "session.json").string() + " --plan-out " +
                (dir_ / "plan.json").string()),
            0)
      << Slurp(dir_ / "stderr");
  const Session session = LoadSession(dir_ / "session.json");
  EXPECT_EQ(session.iteration(), 1);
  ASSERT_NE(session.current_plan(), nullptr);
  EXPECT_TRUE(LoadTrajectory(dir_ / "plan.json").trajectory ==
              *session.current_plan());
  EXPECT_GT(session.current().theta_HP[0], 0.0);
}

TEST_F(CliTest, BadInputFailsWithMessage) {
  EXPECT_NE(Run("plan --scenario " + (dir_ / "missing.json").string()), 0);
  EXPECT_NE(Slurp(dir_ / "stderr").find("error"), std::string::npos);

  std::ofstream(dir_ / "broken.json") << "{\"format_version\": 1";
  EXPECT_NE(Run("plan --scenario " + (dir_ / "broken.json").string()), 0);
  EXPECT_NE(Run("frobnicate"), 0);
  EXPECT_NE(Run("train --scenario " + Data("scenarios/training.json")), 0);
}

}  // namespace
}  // namespace prefplan
