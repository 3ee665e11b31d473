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

// Command-line front end: plan, train, eval, simulate, compare, serve.

#include <CLI11.hpp>
#include <algorithm>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "prefplan/compare.h"
#include "prefplan/error.h"
#include "prefplan/io.h"
#include "prefplan/oracle.h"
#include "prefplan/planner.h"
#include "prefplan/service.h"

namespace fs = std::filesystem;
using namespace prefplan;  // NOLINT(build/namespaces)

namespace {

struct Options {
  std::vector<std::string> scenarios;
  std::string session;
  std::vector<std::string> demos;
  std::string trajectory;
  std::string user;
  std::string out;
  std::string plan_out;
  std::string mode = "both";
  std::optional<std::uint64_t> seed;
  int iters = 10;
  double tolerance = 0.0;
  std::string host = "127.0.0.1";
  int port = 8080;
  int workers = 2;
};

void Emit(const Json& doc, const std::string& out) {
  if (out.empty()) {
    std::cout << Serialize(doc);
  } else {
    Save(out, doc);
  }
}

Scenario LoadScenarioArg(const std::string& name) {
  return LoadScenario(ResolveConfigPath(name));
}

std::vector<Scenario> LoadScenarios(const Options& o) {
  if (o.scenarios.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "--scenario is required");
  }
  std::vector<Scenario> out;
  for (const std::string& name : o.scenarios) {
    out.push_back(LoadScenarioArg(name));
  }
  return out;
}

GroundTruthUser LoadUserArg(const Options& o) {
  if (o.user.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "--user is required");
  }
  GroundTruthUser user = LoadUser(ResolveConfigPath(o.user));
  if (o.seed) user.seed = *o.seed;
  return user;
}

Session StartOrLoadSession(const Options& o, const Scenario& scenario) {
  if (!o.session.empty() && fs::exists(ResolveConfigPath(o.session))) {
    Session session = LoadSession(ResolveConfigPath(o.session));
    if (!(session.context.start == scenario.context.start &&
          session.context.goal == scenario.context.goal &&
          session.context.obstacle_center ==
              scenario.context.obstacle_center)) {
      std::cerr << "warning: session context differs from the scenario; "
                   "planning in the session context\n";
    }
    return session;
  }
  return Session::Start(scenario.context,
                        WeightState::Zero(scenario.params.velocity.n,
                                          scenario.params.learning.alpha));
}

// Reads a trajectory document, or a demonstration document preprocessed
// into one.
DiscreteTrajectory LoadAnyTrajectory(const std::string& name,
                                     const Scenario& scenario) {
  const Json doc = ReadJsonFile(ResolveConfigPath(name));
  const Json* sample = nullptr;
  if (doc.is_object() && doc.contains("samples") && doc["samples"].is_array() &&
      !doc["samples"].empty()) {
    sample = &doc["samples"][0];
  }
  if (sample != nullptr && sample->is_object() && sample->contains("v")) {
    return TrajectoryFromJson(doc).trajectory;
  }
  return PreprocessDemo(DemonstrationFromJson(doc), scenario.context,
                        scenario.params);
}

ModelParams WithSeed(ModelParams params, const Options& o) {
  if (o.seed) params.optimizer.seed = *o.seed;
  return params;
}

int RunPlan(const Options& o) {
  const Scenario scenario = LoadScenarioArg(o.scenarios.at(0));
  const Session session = StartOrLoadSession(o, scenario);
  const PlanResult plan =
      Plan(session.current(), session.context, WithSeed(scenario.params, o));
  Emit(TrajectoryToJson({plan.trajectory, plan.diagnostics}), o.out);
  return 0;
}

int RunTrain(const Options& o) {
  const Scenario scenario = LoadScenarioArg(o.scenarios.at(0));
  const ModelParams params = WithSeed(scenario.params, o);
  if (o.demos.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "--demo is required");
  }
  const auto default_mode = ParseFeedbackMode(o.mode);
  if (!default_mode) {
    throw Error(ErrorCode::kInvalidArgument,
                "--mode must be path, velocity or both");
  }
  Session session = StartOrLoadSession(o, scenario);
  for (const std::string& name : o.demos) {
    if (session.current_plan() == nullptr) {
      session =
          WithPlan(std::move(session),
                   Plan(session.current(), session.context, params).trajectory);
    }
    const Demonstration demo = LoadDemonstration(ResolveConfigPath(name));
    session = StepSessionWithDemo(session, demo,
                                  demo.mode.value_or(*default_mode), params);
  }
  const PlanResult plan = Plan(session.current(), session.context, params);
  session = WithPlan(std::move(session), plan.trajectory);

  const std::string session_out = o.out.empty() ? o.session : o.out;
  if (session_out.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "--out or --session is required");
  }
  Save(session_out, SessionToJson(session));
  if (!o.plan_out.empty()) {
    Save(o.plan_out, TrajectoryToJson({plan.trajectory, plan.diagnostics}));
  }
  std::cout << Serialize(WeightsToJson(session.current()));
  return 0;
}

int RunEval(const Options& o) {
  const Scenario scenario = LoadScenarioArg(o.scenarios.at(0));
  if (o.demos.empty() || o.trajectory.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "--demo (reference, repeatable) and --trajectory are required");
  }
  std::vector<DiscreteTrajectory> references;
  for (const std::string& name : o.demos) {
    references.push_back(LoadAnyTrajectory(name, scenario));
  }
  const int n = scenario.params.sampling.N;
  const DiscreteTrajectory reference =
      references.size() == 1 ? references[0] : MeanTrajectory(references, n);
  const DiscreteTrajectory traj = LoadAnyTrajectory(o.trajectory, scenario);
  const PreferenceErrors errors =
      PathPreferenceErrors(reference, traj, scenario.context, scenario.params);
  Json doc;
  doc["format_version"] = kFormatVersion;
  doc["references"] = references.size();
  doc["normalized_distance"] =
      NormalizedDistance(reference, traj, scenario.context, n);
  doc["errors"] = PreferenceErrorsToJson(errors);
  doc["error_total"] = errors.total();
  Emit(doc, o.out);
  return 0;
}

int RunSimulate(const Options& o) {
  const GroundTruthUser user = LoadUserArg(o);
  const ExperimentReport report =
      RunClosedLoop(user, LoadScenarios(o), o.iters, o.tolerance);
  Emit(ReportToJson(report), o.out);
  return 0;
}

int RunCompare(const Options& o) {
  const GroundTruthUser user = LoadUserArg(o);
  const std::vector<Scenario> scenarios = LoadScenarios(o);
  const Scenario& training = scenarios[0];

  WeightState learned;
  if (!o.session.empty()) {
    learned = LoadSession(ResolveConfigPath(o.session)).current();
  } else {
    const std::vector<Scenario> train_only{training};
    learned =
        RunClosedLoop(user, train_only, o.iters, o.tolerance).weights.back();
  }
  DiscreteTrajectory demo;
  if (!o.demos.empty()) {
    demo = LoadAnyTrajectory(o.demos[0], training);
  } else {
    demo = Demonstrate(user, training.context, training.params);
  }
  Emit(ComparisonToJson(RunComparison(learned, demo, user, scenarios)), o.out);
  return 0;
}

HttpServer* g_server = nullptr;

void HandleSignal(int) {
  if (g_server != nullptr) g_server->Stop();
}

int RunServe(const Options& o) {
  ServiceCore core(o.workers);
  std::vector<fs::path> files;
  for (const std::string& name : o.scenarios) {
    files.push_back(ResolveConfigPath(name));
  }
  if (files.empty()) {
    const fs::path dir = ConfigDir() / "scenarios";
    if (fs::is_directory(dir)) {
      for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() == ".json") files.push_back(entry.path());
      }
      std::sort(files.begin(), files.end());
    }
  }
  for (const fs::path& file : files) {
    const std::string id = core.AddScenario(LoadScenario(file));
    std::cerr << "loaded " << file.string() << " as " << id << "\n";
  }
  HttpServer server(core);
  const int port = server.Bind(o.host, o.port);
  std::cerr << "listening on http://" << o.host << ":" << port << "\n";
  g_server = &server;
  std::signal(SIGINT, HandleSignal);
  std::signal(SIGTERM, HandleSignal);
  server.Run();
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Preference-learning planner for pick-and-place transfers"};
  app.require_subcommand(1);
  Options o;

  const auto add_scenario = [&o](CLI::App* cmd, bool many) {
    auto* opt = cmd->add_option("--scenario", o.scenarios,
                                many ? "Scenario document; the first one "
                                       "trains, the rest are held out"
                                     : "Scenario document");
    if (!many) opt->expected(1);
    return opt;
  };

  auto* plan = app.add_subcommand("plan", "Plan with the session's weights");
  add_scenario(plan, false)->required();
  plan->add_option("--session", o.session,
                   "Session document (zero weights when omitted)");
  plan->add_option("--seed", o.seed, "Optimizer seed");
  plan->add_option("--out", o.out, "Trajectory document (default stdout)");

  auto* train = app.add_subcommand(
      "train", "Apply demonstrations to a session and re-plan");
  add_scenario(train, false)->required();
  train->add_option("--session", o.session,
                    "Session document; created when missing");
  train->add_option("--demo", o.demos, "Demonstration document(s)")->required();
  train->add_option("--mode", o.mode,
                    "Default feedback mode: path, velocity or both");
  train->add_option("--seed", o.seed, "Optimizer seed");
  train->add_option("--out", o.out,
                    "Updated session document (default: --session)");
  train->add_option("--plan-out", o.plan_out, "New plan trajectory document");

  auto* eval = app.add_subcommand(
      "eval", "Distance and per-feature error against reference demos");
  add_scenario(eval, false)->required();
  eval->add_option("--demo", o.demos,
                   "Reference demonstration(s); several are averaged")
      ->required();
  eval->add_option("--trajectory", o.trajectory,
                   "Trajectory or demonstration to evaluate")
      ->required();
  eval->add_option("--out", o.out, "Result document (default stdout)");

  auto* simulate = app.add_subcommand(
      "simulate", "Closed-loop experiment with a simulated user");
  add_scenario(simulate, true)->required();
  simulate->add_option("--user", o.user, "User document")->required();
  simulate->add_option("--iters", o.iters, "Maximum feedback rounds");
  simulate->add_option("--tolerance", o.tolerance,
                       "Stop once the feature error drops below this");
  simulate->add_option("--seed", o.seed, "Overrides the user's noise seed");
  simulate->add_option("--out", o.out, "Report document (default stdout)");

  auto* compare =
      app.add_subcommand("compare", "Learned planner against a DMP");
  add_scenario(compare, true)->required();
  compare->add_option("--user", o.user, "User document")->required();
  compare->add_option("--session", o.session,
                      "Session with learned weights (trains when omitted)");
  compare->add_option("--demo", o.demos,
                      "Training demonstration (default: noiseless user)");
  compare->add_option("--iters", o.iters, "Feedback rounds when training");
  compare->add_option("--seed", o.seed, "Overrides the user's noise seed");
  compare->add_option("--out", o.out, "Comparison document (default stdout)");

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  add_scenario(serve, true);
  serve->add_option("--host", o.host, "Bind address");
  serve->add_option("--port", o.port, "Port (0 picks a free one)");
  serve->add_option("--workers", o.workers, "Plan worker threads");

  CLI11_PARSE(app, argc, argv);

  try {
    if (plan->parsed()) return RunPlan(o);
    if (train->parsed()) return RunTrain(o);
    if (eval->parsed()) return RunEval(o);
    if (simulate->parsed()) return RunSimulate(o);
    if (compare->parsed()) return RunCompare(o);
    if (serve->parsed()) return RunServe(o);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    for (const auto& issue : e.issues()) {
      std::cerr << "  " << issue.field << ": " << issue.message << "\n";
    }
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
