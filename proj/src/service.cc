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

#include "prefplan/service.h"

#include <httplib.h>

#include <algorithm>
#include <exception>
#include <utility>

#include "prefplan/error.h"
#include "prefplan/planner.h"

namespace prefplan {

struct ServiceCore::SessionEntry {
  std::string id;
  std::string scenario_id;
  ModelParams params;
  std::mutex mu;  // serializes mutation of the fields below
  Session session;
  std::optional<PlanDiagnostics> diagnostics;  // of the latest plan
  std::string active_job;                      // empty when idle
};

struct ServiceCore::Job {
  std::string id;
  std::shared_ptr<SessionEntry> session;
  mutable std::mutex mu;
  JobState state = JobState::kQueued;
  double progress = 0.0;
  std::optional<TrajectoryRecord> result;
  std::string error;
};

namespace {

Response ErrorResponse(int status, const std::string& message,
                       const std::vector<ValidationError::Issue>& issues = {}) {
  Json body;
  body["error"] = message;
  if (!issues.empty()) {
    Json list = Json::array();
    for (const auto& issue : issues) {
      list.push_back({{"field", issue.field}, {"message", issue.message}});
    }
    body["issues"] = std::move(list);
  }
  return {status, std::move(body)};
}

std::vector<std::string> SplitPath(std::string_view path) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos < path.size()) {
    const std::size_t next = std::min(path.find('/', pos), path.size());
    if (next > pos) parts.emplace_back(path.substr(pos, next - pos));
    pos = next + 1;
  }
  return parts;
}

Json JobJson(const std::string& id, const std::string& session_id,
             JobState state, double progress,
             const std::optional<TrajectoryRecord>& result,
             const std::string& error) {
  Json body;
  body["id"] = id;
  body["session_id"] = session_id;
  body["state"] = std::string(JobStateName(state));
  body["progress"] = progress;
  body["result"] = result ? TrajectoryToJson(*result) : Json(nullptr);
  body["error"] = error.empty() ? Json(nullptr) : Json(error);
  return body;
}

}  // namespace

std::string_view JobStateName(JobState state) {
  switch (state) {
    case JobState::kQueued:
      return "queued";
    case JobState::kRunning:
      return "running";
    case JobState::kDone:
      return "done";
    case JobState::kFailed:
      return "failed";
  }
  return "unknown";
}

ServiceCore::ServiceCore(int workers) {
  if (workers < 1) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one worker");
  }
  for (int i = 0; i < workers; ++i) {
    workers_.emplace_back([this] { WorkerLoop(); });
  }
}

ServiceCore::~ServiceCore() {
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  work_ready_.notify_all();
  for (std::thread& t : workers_) t.join();
}

Response ServiceCore::Handle(std::string_view method, std::string_view path,
                             std::string_view body) {
  const std::vector<std::string> parts = SplitPath(path);
  const auto route = [&](std::initializer_list<std::string_view> pattern) {
    if (parts.size() != pattern.size()) return false;
    auto it = parts.begin();
    for (std::string_view p : pattern) {
      if (p != "*" && *it != p) return false;
      ++it;
    }
    return true;
  };
  const bool get = method == "GET";
  const bool post = method == "POST";
  try {
    if (route({"api", "scenarios"})) {
      if (post) return CreateScenario(body);
      if (get) return ListScenarios();
    } else if (route({"api", "scenarios", "*"})) {
      if (get) return GetScenario(parts[2]);
    } else if (route({"api", "sessions"})) {
      if (post) return CreateSession(body);
    } else if (route({"api", "sessions", "*"})) {
      if (get) return GetSession(parts[2]);
    } else if (route({"api", "sessions", "*", "demonstrations"})) {
      if (post) return SubmitDemonstration(parts[2], body);
    } else if (route({"api", "sessions", "*", "plan"})) {
      if (post) return StartPlan(parts[2]);
    } else if (route({"api", "jobs", "*"})) {
      if (get) return GetJob(parts[2]);
    } else {
      return ErrorResponse(404, "no such endpoint");
    }
    return ErrorResponse(405, "method not allowed");
  } catch (const ValidationError& e) {
    return ErrorResponse(400, "invalid document", e.issues());
  } catch (const Error& e) {
    const bool internal =
        e.code() == ErrorCode::kDivergence || e.code() == ErrorCode::kIo;
    return ErrorResponse(internal ? 500 : 400, e.what());
  } catch (const std::exception& e) {
    return ErrorResponse(500, e.what());
  }
}

std::string ServiceCore::AddScenario(const Scenario& scenario) {
  scenario.context.Validate();
  scenario.params.Validate(scenario.context);
  std::lock_guard lock(mu_);
  std::string id = "scn-" + std::to_string(next_scenario_++);
  scenarios_.emplace(id, scenario);
  return id;
}

void ServiceCore::WaitIdle() {
  std::unique_lock lock(mu_);
  idle_.wait(lock, [this] { return queue_.empty() && busy_ == 0; });
}

Response ServiceCore::CreateScenario(std::string_view body) {
  const Scenario scenario = ScenarioFromJson(ParseJson(body));
  const std::string id = AddScenario(scenario);
  return {201, {{"id", id}, {"name", scenario.name}}};
}

Response ServiceCore::ListScenarios() const {
  std::lock_guard lock(mu_);
  Json list = Json::array();
  for (const auto& [id, scenario] : scenarios_) {
    list.push_back({{"id", id}, {"name", scenario.name}});
  }
  return {200, {{"scenarios", std::move(list)}}};
}

Response ServiceCore::GetScenario(const std::string& id) const {
  std::lock_guard lock(mu_);
  const auto it = scenarios_.find(id);
  if (it == scenarios_.end()) return ErrorResponse(404, "unknown scenario");
  return {200, ScenarioToJson(it->second)};
}

Response ServiceCore::CreateSession(std::string_view body) {
  const Json doc = ParseJson(body);
  std::vector<ValidationError::Issue> issues;
  if (!doc.is_object()) {
    throw ValidationError(
        std::vector<ValidationError::Issue>{{"$", "expected a JSON object"}});
  }
  for (const auto& item : doc.items()) {
    if (item.key() != "scenario_id" && item.key() != "alpha") {
      issues.push_back({item.key(), "unknown field"});
    }
  }
  const auto sid = doc.find("scenario_id");
  if (sid == doc.end()) {
    issues.push_back({"scenario_id", "missing required field"});
  } else if (!sid->is_string()) {
    issues.push_back({"scenario_id", "expected a string"});
  }
  const auto alpha = doc.find("alpha");
  if (alpha != doc.end() && !alpha->is_number()) {
    issues.push_back({"alpha", "expected a number"});
  }
  if (!issues.empty()) throw ValidationError(issues);

  std::lock_guard lock(mu_);
  const auto scenario = scenarios_.find(sid->get<std::string>());
  if (scenario == scenarios_.end()) {
    return ErrorResponse(404, "unknown scenario");
  }
  auto entry = std::make_shared<SessionEntry>();
  entry->scenario_id = scenario->first;
  entry->params = scenario->second.params;
  if (alpha != doc.end()) entry->params.learning.alpha = alpha->get<double>();
  try {
    entry->params.learning.Validate();
  } catch (const Error& e) {
    throw ValidationError(
        std::vector<ValidationError::Issue>{{"alpha", e.what()}});
  }
  entry->session =
      Session::Start(scenario->second.context,
                     WeightState::Zero(entry->params.velocity.n,
                                       entry->params.learning.alpha));
  entry->id = "ses-" + std::to_string(next_session_++);
  sessions_.emplace(entry->id, entry);
  return {201,
          {{"id", entry->id},
           {"weights", WeightsToJson(entry->session.current())}}};
}

Response ServiceCore::GetSession(const std::string& id) const {
  const auto entry = FindSession(id);
  if (!entry) return ErrorResponse(404, "unknown session");
  std::lock_guard lock(entry->mu);
  const Session& s = entry->session;
  Json history = Json::array();
  for (const WeightState& w : s.weights) history.push_back(WeightsToJson(w));
  Json modes = Json::array();
  for (FeedbackMode m : s.modes) {
    modes.push_back(std::string(FeedbackModeName(m)));
  }
  Json body;
  body["id"] = entry->id;
  body["scenario_id"] = entry->scenario_id;
  body["iteration"] = s.iteration();
  body["weights"] = WeightsToJson(s.current());
  body["history"] = std::move(history);
  body["modes"] = std::move(modes);
  if (const DiscreteTrajectory* plan = s.current_plan()) {
    body["latest_plan"] = TrajectoryToJson({*plan, entry->diagnostics});
  } else {
    body["latest_plan"] = nullptr;
  }
  body["active_job"] =
      entry->active_job.empty() ? Json(nullptr) : Json(entry->active_job);
  return {200, std::move(body)};
}

Response ServiceCore::SubmitDemonstration(const std::string& id,
                                          std::string_view body) {
  const auto entry = FindSession(id);
  if (!entry) return ErrorResponse(404, "unknown session");
  const Demonstration demo = DemonstrationFromJson(ParseJson(body));
  std::lock_guard lock(entry->mu);
  if (!entry->active_job.empty()) {
    return ErrorResponse(409, "a plan job is active for this session");
  }
  if (entry->session.current_plan() == nullptr) {
    return ErrorResponse(409, "no plan for the current weights yet");
  }
  entry->session = StepSessionWithDemo(entry->session, demo,
                                       demo.mode.value_or(FeedbackMode::kBoth),
                                       entry->params);
  entry->diagnostics.reset();
  return {200,
          {{"iteration", entry->session.iteration()},
           {"weights", WeightsToJson(entry->session.current())}}};
}

Response ServiceCore::StartPlan(const std::string& id) {
  const auto entry = FindSession(id);
  if (!entry) return ErrorResponse(404, "unknown session");
  auto job = std::make_shared<Job>();
  job->session = entry;
  {
    std::lock_guard session_lock(entry->mu);
    if (!entry->active_job.empty()) {
      return ErrorResponse(409, "a plan job is already active");
    }
    std::lock_guard lock(mu_);
    job->id = "job-" + std::to_string(next_job_++);
    entry->active_job = job->id;
    jobs_.emplace(job->id, job);
    queue_.push_back(job);
  }
  work_ready_.notify_one();
  return {202, JobJson(job->id, entry->id, JobState::kQueued, 0.0, std::nullopt,
                       "")};
}

Response ServiceCore::GetJob(const std::string& id) const {
  const auto job = FindJob(id);
  if (!job) return ErrorResponse(404, "unknown job");
  std::lock_guard lock(job->mu);
  return {200, JobJson(job->id, job->session->id, job->state, job->progress,
                       job->result, job->error)};
}

std::shared_ptr<ServiceCore::SessionEntry> ServiceCore::FindSession(
    const std::string& id) const {
  std::lock_guard lock(mu_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::shared_ptr<ServiceCore::Job> ServiceCore::FindJob(
    const std::string& id) const {
  std::lock_guard lock(mu_);
  const auto it = jobs_.find(id);
  return it == jobs_.end() ? nullptr : it->second;
}

void ServiceCore::WorkerLoop() {
  for (;;) {
    std::shared_ptr<Job> job;
    {
      std::unique_lock lock(mu_);
      work_ready_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
      if (stopping_) return;
      job = std::move(queue_.front());
      queue_.pop_front();
      ++busy_;
    }
    RunJob(job);
    {
      std::lock_guard lock(mu_);
      --busy_;
    }
    idle_.notify_all();
  }
}

void ServiceCore::RunJob(const std::shared_ptr<Job>& job) {
  SessionEntry& entry = *job->session;
  WeightState weights;
  Context ctx;
  {
    std::lock_guard lock(entry.mu);
    weights = entry.session.current();
    ctx = entry.session.context;
  }
  {
    std::lock_guard lock(job->mu);
    job->state = JobState::kRunning;
  }
  const auto progress = [&job](double fraction) {
    std::lock_guard lock(job->mu);
    job->progress = std::clamp(std::max(job->progress, fraction), 0.0, 1.0);
  };
  try {
    PlanResult plan = Plan(weights, ctx, entry.params, progress);
    {
      // No demonstration can land while the job is active, so the weights
      // it planned with are still current.
      std::lock_guard lock(entry.mu);
      entry.session = WithPlan(entry.session, plan.trajectory);
      entry.diagnostics = plan.diagnostics;
      entry.active_job.clear();
    }
    std::lock_guard lock(job->mu);
    job->result =
        TrajectoryRecord{std::move(plan.trajectory), plan.diagnostics};
    job->progress = 1.0;
    job->state = JobState::kDone;
  } catch (const std::exception& e) {
    {
      std::lock_guard lock(entry.mu);
      entry.active_job.clear();
    }
    std::lock_guard lock(job->mu);
    job->error = e.what();
    job->state = JobState::kFailed;
  }
}

HttpServer::HttpServer(ServiceCore& core)
    : server_(std::make_unique<httplib::Server>()) {
  server_->set_default_headers(
      {{"Access-Control-Allow-Origin", "*"},
       {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
       {"Access-Control-Allow-Headers", "Content-Type"}});
  const auto forward = [&core](const httplib::Request& req,
                               httplib::Response& res) {
    const Response out = core.Handle(req.method, req.path, req.body);
    res.status = out.status;
    res.set_content(out.body.dump(), "application/json");
  };
  server_->Get(".*", forward);
  server_->Post(".*", forward);
  server_->Options(".*", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });
}

HttpServer::~HttpServer() = default;

int HttpServer::Bind(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = server_->bind_to_any_port(host);
  } else if (!server_->bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound <= 0) {
    throw Error(ErrorCode::kIo,
                "cannot bind " + host + ":" + std::to_string(port));
  }
  return bound;
}

void HttpServer::Run() { server_->listen_after_bind(); }

void HttpServer::Stop() { server_->stop(); }

}  // namespace prefplan
