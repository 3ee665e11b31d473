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

#ifndef PREFPLAN_SERVICE_H_
#define PREFPLAN_SERVICE_H_

#include <condition_variable>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "prefplan/io.h"

namespace httplib {
class Server;
}

namespace prefplan {

enum class JobState { kQueued, kRunning, kDone, kFailed };

std::string_view JobStateName(JobState state);

struct Response {
  int status = 200;
  Json body;
};

// Process-local store of scenarios, sessions and plan jobs behind a
// transport-neutral request handler. Thread-safe. Plan jobs run on a fixed
// pool of worker threads; mutations of one session are serialized while
// different sessions proceed independently.
class ServiceCore {
 public:
  explicit ServiceCore(int workers = 2);
  ~ServiceCore();

  ServiceCore(const ServiceCore&) = delete;
  ServiceCore& operator=(const ServiceCore&) = delete;

  // Routes one request. `path` excludes the query string.
  Response Handle(std::string_view method, std::string_view path,
                  std::string_view body);

  // Registers a scenario directly and returns its id.
  std::string AddScenario(const Scenario& scenario);

  // Blocks until no job is queued or running.
  void WaitIdle();

 private:
  struct SessionEntry;
  struct Job;

  Response CreateScenario(std::string_view body);
  Response ListScenarios() const;
  Response GetScenario(const std::string& id) const;
  Response CreateSession(std::string_view body);
  Response GetSession(const std::string& id) const;
  Response SubmitDemonstration(const std::string& id, std::string_view body);
  Response StartPlan(const std::string& id);
  Response GetJob(const std::string& id) const;

  std::shared_ptr<SessionEntry> FindSession(const std::string& id) const;
  std::shared_ptr<Job> FindJob(const std::string& id) const;
  void WorkerLoop();
  void RunJob(const std::shared_ptr<Job>& job);

  mutable std::mutex mu_;  // guards the maps, counters and queue
  std::condition_variable work_ready_;
  std::condition_variable idle_;
  std::map<std::string, Scenario> scenarios_;
  std::map<std::string, std::shared_ptr<SessionEntry>> sessions_;
  std::map<std::string, std::shared_ptr<Job>> jobs_;
  std::deque<std::shared_ptr<Job>> queue_;
  int busy_ = 0;
  int next_scenario_ = 1;
  int next_session_ = 1;
  int next_job_ = 1;
  bool stopping_ = false;
  std::vector<std::thread> workers_;
};

// HTTP front end for a ServiceCore with permissive CORS.
class HttpServer {
 public:
  explicit HttpServer(ServiceCore& core);
  ~HttpServer();

  // Binds `host:port`; port 0 picks a free one. Returns the bound port.
  // Throws Error(kIo) on failure.
  int Bind(const std::string& host, int port);
  // Serves until Stop(). Call after Bind().
  void Run();
  void Stop();

 private:
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace prefplan

#endif  // PREFPLAN_SERVICE_H_
