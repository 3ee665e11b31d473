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

#include "prefplan/io.h"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <utility>

#include "prefplan/error.h"

namespace prefplan {
namespace {

namespace fs = std::filesystem;
using Issue = ValidationError::Issue;

constexpr int kSmoothingWindow = 5;

Json VecJson(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Json Vec3Json(const Vec3& v) { return Json::array({v[0], v[1], v[2]}); }

// Typed, path-tracking access to one JSON object. Problems are appended to
// a shared issue list and defaults returned, so a whole document is checked
// in one pass.
class Reader {
 public:
  Reader(const Json* node, std::string path, std::vector<Issue>* issues)
      : node_(node), path_(std::move(path)), issues_(issues) {}

  bool ok() const { return node_ != nullptr && node_->is_object(); }
  const std::string& path() const { return path_; }

  void Fail(const std::string& field, const std::string& message) const {
    issues_->push_back({field, message});
  }

  std::string Field(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  void AllowOnly(std::initializer_list<std::string_view> keys) const {
    if (!ok()) return;
    for (const auto& item : node_->items()) {
      bool known = false;
      for (std::string_view key : keys) known = known || item.key() == key;
      if (!known) Fail(Field(item.key()), "unknown field");
    }
  }

  const Json* Find(std::string_view key, bool required = true) const {
    if (!ok()) return nullptr;
    const auto it = node_->find(std::string(key));
    if (it == node_->end()) {
      if (required) Fail(Field(key), "missing required field");
      return nullptr;
    }
    return &*it;
  }

  double Number(std::string_view key) const {
    const Json* f = Find(key);
    if (f == nullptr) return 0.0;
    if (!f->is_number()) {
      Fail(Field(key), "expected a number");
      return 0.0;
    }
    return f->get<double>();
  }

  std::optional<double> OptionalNumber(std::string_view key) const {
    const Json* f = Find(key, false);
    if (f == nullptr || f->is_null()) return std::nullopt;
    if (!f->is_number()) {
      Fail(Field(key), "expected a number or null");
      return std::nullopt;
    }
    return f->get<double>();
  }

  int Integer(std::string_view key) const {
    const Json* f = Find(key);
    if (f == nullptr) return 0;
    if (!f->is_number_integer()) {
      Fail(Field(key), "expected an integer");
      return 0;
    }
    return f->get<int>();
  }

  std::uint64_t Unsigned(std::string_view key) const {
    const Json* f = Find(key);
    if (f == nullptr) return 0;
    if (!f->is_number_unsigned()) {
      Fail(Field(key), "expected a non-negative integer");
      return 0;
    }
    return f->get<std::uint64_t>();
  }

  bool Boolean(std::string_view key) const {
    const Json* f = Find(key);
    if (f == nullptr) return false;
    if (!f->is_boolean()) {
      Fail(Field(key), "expected true or false");
      return false;
    }
    return f->get<bool>();
  }

  std::string String(std::string_view key) const {
    const Json* f = Find(key);
    if (f == nullptr) return {};
    if (!f->is_string()) {
      Fail(Field(key), "expected a string");
      return {};
    }
    return f->get<std::string>();
  }

  Eigen::VectorXd Vector(std::string_view key, int size = -1) const {
    const Json* f = Find(key);
    return f == nullptr ? Eigen::VectorXd() : ToVector(*f, Field(key), size);
  }

  Vec3 Vector3(std::string_view key) const {
    const Eigen::VectorXd v = Vector(key, 3);
    return v.size() == 3 ? Vec3(v) : Vec3::Zero();
  }

  std::optional<Vec3> OptionalVector3(std::string_view key) const {
    const Json* f = Find(key, false);
    if (f == nullptr || f->is_null()) return std::nullopt;
    const Eigen::VectorXd v = ToVector(*f, Field(key), 3);
    if (v.size() != 3) return std::nullopt;
    return Vec3(v);
  }

  Reader Object(std::string_view key, bool required = true) const {
    const Json* f = Find(key, required);
    if (f != nullptr && !f->is_object()) {
      Fail(Field(key), "expected an object");
      f = nullptr;
    }
    return Reader(f, Field(key), issues_);
  }

  const Json* Array(std::string_view key) const {
    const Json* f = Find(key);
    if (f != nullptr && !f->is_array()) {
      Fail(Field(key), "expected an array");
      return nullptr;
    }
    return f;
  }

  Eigen::VectorXd ToVector(const Json& j, const std::string& field,
                           int size) const {
    if (!j.is_array()) {
      Fail(field, "expected an array of numbers");
      return {};
    }
    if (size >= 0 && static_cast<int>(j.size()) != size) {
      Fail(field, "expected " + std::to_string(size) + " numbers");
      return {};
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (!j[i].is_number()) {
        Fail(field + "[" + std::to_string(i) + "]", "expected a number");
        return {};
      }
      v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    }
    return v;
  }

 private:
  const Json* node_;
  std::string path_;
  std::vector<Issue>* issues_;
};

std::string Indexed(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

// Validates the top level and the version tag. Returns a reader on `doc`.
Reader OpenDocument(const Json& doc, std::vector<Issue>* issues) {
  if (!doc.is_object()) {
    throw ValidationError(std::vector<Issue>{{"$", "expected a JSON object"}});
  }
  const auto it = doc.find("format_version");
  if (it == doc.end()) {
    issues->push_back({"format_version", "missing required field"});
  } else if (!it->is_number_integer()) {
    issues->push_back({"format_version", "expected an integer"});
  } else if (it->get<long long>() != kFormatVersion) {
    throw Error(ErrorCode::kUnsupportedVersion,
                "format_version " + std::to_string(it->get<long long>()) +
                    " is not supported; this build reads version " +
                    std::to_string(kFormatVersion));
  }
  return Reader(&doc, "", issues);
}

void Finish(const std::vector<Issue>& issues) {
  if (!issues.empty()) throw ValidationError(issues);
}

// Runs a semantic check and reports its failure as an issue on `field`.
template <typename Fn>
void Check(std::vector<Issue>* issues, const std::string& field, Fn&& fn) {
  try {
    fn();
  } catch (const ValidationError& e) {
    issues->insert(issues->end(), e.issues().begin(), e.issues().end());
  } catch (const Error& e) {
    issues->push_back({field, e.what()});
  }
}

Json ContextJson(const Context& ctx) {
  Json j;
  j["start"] = Vec3Json(ctx.start);
  j["goal"] = Vec3Json(ctx.goal);
  j["obstacle_center"] = Vec3Json(ctx.obstacle_center);
  j["obstacle_radius"] = ctx.obstacle_radius;
  j["table_height"] = ctx.table_height;
  j["workspace_low"] = Vec3Json(ctx.workspace_low);
  j["workspace_upp"] = Vec3Json(ctx.workspace_upp);
  j["robot_base"] = Vec3Json(ctx.robot_base);
  return j;
}

Context ReadContext(const Reader& r) {
  r.AllowOnly({"start", "goal", "obstacle_center", "obstacle_radius",
               "table_height", "workspace_low", "workspace_upp", "robot_base"});
  Context ctx;
  ctx.start = r.Vector3("start");
  ctx.goal = r.Vector3("goal");
  ctx.obstacle_center = r.Vector3("obstacle_center");
  ctx.obstacle_radius = r.Number("obstacle_radius");
  ctx.table_height = r.Number("table_height");
  ctx.workspace_low = r.Vector3("workspace_low");
  ctx.workspace_upp = r.Vector3("workspace_upp");
  ctx.robot_base = r.OptionalVector3("robot_base").value_or(Vec3::Zero());
  return ctx;
}

Json StatesJson(const DiscreteTrajectory& traj) {
  Json samples = Json::array();
  for (const State& s : traj) {
    Json j;
    j["t"] = s.t;
    j["x"] = Vec3Json(s.x);
    j["v"] = Vec3Json(s.v);
    samples.push_back(std::move(j));
  }
  return samples;
}

DiscreteTrajectory ReadStates(const Json* samples, const std::string& field,
                              std::vector<Issue>* issues) {
  if (samples == nullptr) return {};
  std::vector<State> states;
  const std::size_t before = issues->size();
  for (std::size_t i = 0; i < samples->size(); ++i) {
    const std::string at = Indexed(field, i);
    const Json& item = (*samples)[i];
    if (!item.is_object()) {
      issues->push_back({at, "expected an object"});
      continue;
    }
    Reader r(&item, at, issues);
    r.AllowOnly({"t", "x", "v"});
    states.push_back({r.Number("t"), r.Vector3("x"), r.Vector3("v")});
  }
  if (issues->size() != before) return {};
  DiscreteTrajectory traj;
  Check(issues, field, [&] { traj = DiscreteTrajectory(std::move(states)); });
  return traj;
}

Json WeightsJsonImpl(const WeightState& w) {
  Json j;
  j["theta_HP"] = Vec3Json(w.theta_HP);
  j["theta_HV"] = VecJson(w.theta_HV);
  j["alpha"] = w.alpha;
  j["iteration"] = w.iteration;
  return j;
}

WeightState ReadWeights(const Reader& r) {
  r.AllowOnly({"theta_HP", "theta_HV", "alpha", "iteration"});
  WeightState w;
  w.theta_HP = r.Vector3("theta_HP");
  w.theta_HV = r.Vector("theta_HV");
  w.alpha = r.Number("alpha");
  w.iteration = r.Integer("iteration");
  return w;
}

Json ErrorsJson(const PreferenceErrors& e) {
  Json j;
  j["height"] = e.height;
  j["distance"] = e.distance;
  j["side"] = e.side;
  return j;
}

PreferenceErrors ReadErrors(const Reader& r) {
  r.AllowOnly({"height", "distance", "side"});
  return {r.Number("height"), r.Number("distance"), r.Number("side")};
}

PlanDiagnostics ReadDiagnostics(const Reader& r) {
  r.AllowOnly({"path_evaluations", "velocity_evaluations", "restarts",
               "path_converged", "velocity_converged", "collision",
               "workspace_violation", "min_obstacle_distance", "path_objective",
               "velocity_objective"});
  PlanDiagnostics d;
  d.path_evaluations = r.Integer("path_evaluations");
  d.velocity_evaluations = r.Integer("velocity_evaluations");
  d.restarts = r.Integer("restarts");
  d.path_converged = r.Boolean("path_converged");
  d.velocity_converged = r.Boolean("velocity_converged");
  d.collision = r.Boolean("collision");
  d.workspace_violation = r.Boolean("workspace_violation");
  d.min_obstacle_distance = r.Number("min_obstacle_distance");
  d.path_objective = r.Number("path_objective");
  d.velocity_objective = r.Number("velocity_objective");
  return d;
}

std::optional<FeedbackMode> ReadMode(const Json& j, const std::string& field,
                                     std::vector<Issue>* issues) {
  if (!j.is_string()) {
    issues->push_back({field, "expected \"path\", \"velocity\" or \"both\""});
    return std::nullopt;
  }
  const auto mode = ParseFeedbackMode(j.get<std::string>());
  if (!mode) {
    issues->push_back({field, "expected \"path\", \"velocity\" or \"both\""});
  }
  return mode;
}

Json ReadFileText(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot read " + path.string());
  }
  std::ostringstream text;
  text << in.rdbuf();
  return ParseJson(text.str());
}

std::vector<Vec3> SmoothPositions(const std::vector<Vec3>& x) {
  const int n = static_cast<int>(x.size());
  const int half_window = kSmoothingWindow / 2;
  std::vector<Vec3> out(x);
  for (int i = 1; i + 1 < n; ++i) {
    const int half = std::min({half_window, i, n - 1 - i});
    Vec3 sum = Vec3::Zero();
    for (int k = i - half; k <= i + half; ++k) sum += x[k];
    out[i] = sum / (2 * half + 1);
  }
  return out;
}

}  // namespace

Json WeightsToJson(const WeightState& weights) {
  return WeightsJsonImpl(weights);
}

WeightState WeightsFromJson(const Json& doc) {
  std::vector<Issue> issues;
  if (!doc.is_object()) {
    throw ValidationError(std::vector<Issue>{{"$", "expected an object"}});
  }
  WeightState w = ReadWeights(Reader(&doc, "", &issues));
  Finish(issues);
  Check(&issues, "$", [&] { w.Validate(); });
  Finish(issues);
  return w;
}

Json DiagnosticsToJson(const PlanDiagnostics& d) {
  Json j;
  j["path_evaluations"] = d.path_evaluations;
  j["velocity_evaluations"] = d.velocity_evaluations;
  j["restarts"] = d.restarts;
  j["path_converged"] = d.path_converged;
  j["velocity_converged"] = d.velocity_converged;
  j["collision"] = d.collision;
  j["workspace_violation"] = d.workspace_violation;
  j["min_obstacle_distance"] = d.min_obstacle_distance;
  j["path_objective"] = d.path_objective;
  j["velocity_objective"] = d.velocity_objective;
  return j;
}

Json PreferenceErrorsToJson(const PreferenceErrors& errors) {
  return ErrorsJson(errors);
}

Json ComparisonToJson(const Comparison& comparison) {
  auto method = [](const MethodScore& m) {
    Json j;
    j["error"] = ErrorsJson(m.error);
    j["normalized_distance"] = m.normalized_distance;
    j["close_speed"] = m.speeds.close ? Json(*m.speeds.close) : Json(nullptr);
    j["far_speed"] = m.speeds.far ? Json(*m.speeds.far) : Json(nullptr);
    j["slow_near_obstacle"] = m.SlowNearObstacle();
    j["min_obstacle_distance"] = m.min_obstacle_distance;
    return j;
  };
  Json doc;
  doc["format_version"] = kFormatVersion;
  doc["fit_rmse"] = comparison.fit.rmse;
  doc["fit_speed_correlation"] = comparison.fit.speed_correlation;
  doc["fit_goal_error"] = comparison.fit_goal_error;
  Json rows = Json::array();
  for (const ComparisonRow& row : comparison.rows) {
    Json j;
    j["name"] = row.name;
    j["coactive"] = method(row.coactive);
    j["dmp"] = method(row.dmp);
    rows.push_back(std::move(j));
  }
  doc["scenarios"] = std::move(rows);
  return doc;
}

Json ScenarioToJson(const Scenario& scenario) {
  const ModelParams& p = scenario.params;
  Json doc;
  doc["format_version"] = kFormatVersion;
  doc["name"] = scenario.name;
  doc["context"] = ContextJson(scenario.context);

  Json path;
  path["lambda"] = p.path.lambda;
  path["sigmoid_center"] = p.path.sigmoid_center;
  path["beta"] = p.path.beta;
  path["gamma"] = p.path.gamma;
  path["side_plane_normal"] = p.path.side_plane_normal
                                  ? Vec3Json(*p.path.side_plane_normal)
                                  : Json(nullptr);
  doc["path_features"] = std::move(path);

  Json velocity;
  velocity["n"] = p.velocity.n;
  velocity["epsilon"] = p.velocity.epsilon;
  velocity["v_min"] = p.velocity.v_min;
  velocity["v_max"] = p.velocity.v_max;
  velocity["d_c"] = p.velocity.d_c;
  doc["velocity_features"] = std::move(velocity);

  Json robot;
  robot["theta_RP"] = Json::array({p.robot.theta_RP[0], p.robot.theta_RP[1]});
  robot["theta_RV"] = p.robot.theta_RV;
  robot["v_robot"] = p.robot.v_robot;
  robot["d_safe"] = p.robot.d_safe;
  robot["kappa"] = p.robot.kappa;
  doc["robot"] = std::move(robot);

  Json sampling;
  sampling["N"] = p.sampling.N;
  sampling["M"] = p.sampling.M;
  sampling["t_g"] = p.sampling.t_g;
  doc["sampling"] = std::move(sampling);

  Json optimizer;
  optimizer["grid"] = p.optimizer.grid;
  optimizer["restarts"] = p.optimizer.restarts;
  optimizer["tolerance"] = p.optimizer.tolerance;
  optimizer["max_evaluations"] = p.optimizer.max_evaluations;
  optimizer["velocity_max_evaluations"] = p.optimizer.velocity_max_evaluations;
  optimizer["t_upp_factor"] = p.optimizer.t_upp_factor;
  optimizer["seed"] = p.optimizer.seed;
  doc["optimizer"] = std::move(optimizer);

  Json learning;
  learning["alpha"] = p.learning.alpha;
  learning["theta_max"] =
      p.learning.theta_max ? Json(*p.learning.theta_max) : Json(nullptr);
  doc["learning"] = std::move(learning);
  return doc;
}

Scenario ScenarioFromJson(const Json& doc) {
  std::vector<Issue> issues;
  const Reader r = OpenDocument(doc, &issues);
  r.AllowOnly({"format_version", "name", "context", "path_features",
               "velocity_features", "robot", "sampling", "optimizer",
               "learning"});
  Scenario s;
  s.name = r.String("name");
  s.context = ReadContext(r.Object("context"));
  ModelParams& p = s.params;

  const Reader path = r.Object("path_features");
  path.AllowOnly(
      {"lambda", "sigmoid_center", "beta", "gamma", "side_plane_normal"});
  p.path.lambda = path.Number("lambda");
  p.path.sigmoid_center = path.Number("sigmoid_center");
  p.path.beta = path.Number("beta");
  p.path.gamma = path.Number("gamma");
  p.path.side_plane_normal = path.OptionalVector3("side_plane_normal");

  const Reader velocity = r.Object("velocity_features");
  velocity.AllowOnly({"n", "epsilon", "v_min", "v_max", "d_c"});
  p.velocity.n = velocity.Integer("n");
  p.velocity.epsilon = velocity.Number("epsilon");
  p.velocity.v_min = velocity.Number("v_min");
  p.velocity.v_max = velocity.Number("v_max");
  p.velocity.d_c = velocity.Number("d_c");

  const Reader robot = r.Object("robot");
  robot.AllowOnly({"theta_RP", "theta_RV", "v_robot", "d_safe", "kappa"});
  const Eigen::VectorXd theta_RP = robot.Vector("theta_RP", 2);
  if (theta_RP.size() == 2) p.robot.theta_RP = theta_RP;
  p.robot.theta_RV = robot.Number("theta_RV");
  p.robot.v_robot = robot.Number("v_robot");
  p.robot.d_safe = robot.Number("d_safe");
  p.robot.kappa = robot.Number("kappa");

  const Reader sampling = r.Object("sampling");
  sampling.AllowOnly({"N", "M", "t_g"});
  p.sampling.N = sampling.Integer("N");
  p.sampling.M = sampling.Integer("M");
  p.sampling.t_g = sampling.Number("t_g");

  const Reader optimizer = r.Object("optimizer");
  optimizer.AllowOnly({"grid", "restarts", "tolerance", "max_evaluations",
                       "velocity_max_evaluations", "t_upp_factor", "seed"});
  p.optimizer.grid = optimizer.Integer("grid");
  p.optimizer.restarts = optimizer.Integer("restarts");
  p.optimizer.tolerance = optimizer.Number("tolerance");
  p.optimizer.max_evaluations = optimizer.Integer("max_evaluations");
  p.optimizer.velocity_max_evaluations =
      optimizer.Integer("velocity_max_evaluations");
  p.optimizer.t_upp_factor = optimizer.Number("t_upp_factor");
  p.optimizer.seed = optimizer.Unsigned("seed");

  const Reader learning = r.Object("learning");
  learning.AllowOnly({"alpha", "theta_max"});
  p.learning.alpha = learning.Number("alpha");
  p.learning.theta_max = learning.OptionalNumber("theta_max");

  Finish(issues);
  Check(&issues, "context", [&] { s.context.Validate(); });
  if (issues.empty()) {
    Check(&issues, "$", [&] { p.Validate(s.context); });
  }
  Finish(issues);
  return s;
}

Json DemonstrationToJson(const Demonstration& demo) {
  Json doc;
  doc["format_version"] = kFormatVersion;
  Json samples = Json::array();
  for (const DemoSample& s : demo.samples) {
    Json j;
    j["t"] = s.t;
    j["x"] = Vec3Json(s.x);
    samples.push_back(std::move(j));
  }
  doc["samples"] = std::move(samples);
  if (demo.mode) doc["mode"] = std::string(FeedbackModeName(*demo.mode));
  return doc;
}

Demonstration DemonstrationFromJson(const Json& doc) {
  std::vector<Issue> issues;
  const Reader r = OpenDocument(doc, &issues);
  r.AllowOnly({"format_version", "samples", "mode"});
  Demonstration demo;
  if (const Json* samples = r.Array("samples")) {
    for (std::size_t i = 0; i < samples->size(); ++i) {
      const std::string at = Indexed("samples", i);
      const Json& item = (*samples)[i];
      if (!item.is_object()) {
        issues.push_back({at, "expected an object"});
        continue;
      }
      Reader s(&item, at, &issues);
      s.AllowOnly({"t", "x"});
      demo.samples.push_back({s.Number("t"), s.Vector3("x")});
    }
    if (samples->size() < 2) {
      issues.push_back({"samples", "need at least 2 samples"});
    }
  }
  if (const Json* mode = r.Find("mode", false); mode && !mode->is_null()) {
    demo.mode = ReadMode(*mode, "mode", &issues);
  }
  Finish(issues);
  for (std::size_t i = 1; i < demo.samples.size(); ++i) {
    if (!(demo.samples[i].t > demo.samples[i - 1].t)) {
      issues.push_back(
          {Indexed("samples", i) + ".t", "times must be strictly increasing"});
    }
  }
  Finish(issues);
  return demo;
}

Json TrajectoryToJson(const TrajectoryRecord& record) {
  Json doc;
  doc["format_version"] = kFormatVersion;
  doc["samples"] = StatesJson(record.trajectory);
  if (record.diagnostics) {
    doc["diagnostics"] = DiagnosticsToJson(*record.diagnostics);
  }
  return doc;
}

TrajectoryRecord TrajectoryFromJson(const Json& doc) {
  std::vector<Issue> issues;
  const Reader r = OpenDocument(doc, &issues);
  r.AllowOnly({"format_version", "samples", "diagnostics"});
  TrajectoryRecord record;
  record.trajectory = ReadStates(r.Array("samples"), "samples", &issues);
  if (r.Find("diagnostics", false) != nullptr) {
    record.diagnostics = ReadDiagnostics(r.Object("diagnostics"));
  }
  Finish(issues);
  return record;
}

Json SessionToJson(const Session& session) {
  Json doc;
  doc["format_version"] = kFormatVersion;
  doc["context"] = ContextJson(session.context);
  Json weights = Json::array();
  for (const WeightState& w : session.weights) {
    weights.push_back(WeightsJsonImpl(w));
  }
  doc["weights"] = std::move(weights);
  Json plans = Json::array();
  for (const DiscreteTrajectory& t : session.plans) {
    plans.push_back(StatesJson(t));
  }
  doc["plans"] = std::move(plans);
  Json demos = Json::array();
  for (const DiscreteTrajectory& t : session.demonstrations) {
    demos.push_back(StatesJson(t));
  }
  doc["demonstrations"] = std::move(demos);
  Json modes = Json::array();
  for (FeedbackMode m : session.modes) {
    modes.push_back(std::string(FeedbackModeName(m)));
  }
  doc["modes"] = std::move(modes);
  return doc;
}

Session SessionFromJson(const Json& doc) {
  std::vector<Issue> issues;
  const Reader r = OpenDocument(doc, &issues);
  r.AllowOnly({"format_version", "context", "weights", "plans",
               "demonstrations", "modes"});
  Session session;
  session.context = ReadContext(r.Object("context"));
  if (const Json* weights = r.Array("weights")) {
    for (std::size_t i = 0; i < weights->size(); ++i) {
      const std::string at = Indexed("weights", i);
      if (!(*weights)[i].is_object()) {
        issues.push_back({at, "expected an object"});
        continue;
      }
      session.weights.push_back(
          ReadWeights(Reader(&(*weights)[i], at, &issues)));
    }
  }
  for (const char* key : {"plans", "demonstrations"}) {
    auto& target = std::string_view(key) == "plans" ? session.plans
                                                    : session.demonstrations;
    if (const Json* list = r.Array(key)) {
      for (std::size_t i = 0; i < list->size(); ++i) {
        const std::string at = Indexed(key, i);
        if (!(*list)[i].is_array()) {
          issues.push_back({at, "expected an array of samples"});
          continue;
        }
        target.push_back(ReadStates(&(*list)[i], at, &issues));
      }
    }
  }
  if (const Json* modes = r.Array("modes")) {
    for (std::size_t i = 0; i < modes->size(); ++i) {
      const auto mode = ReadMode((*modes)[i], Indexed("modes", i), &issues);
      if (mode) session.modes.push_back(*mode);
    }
  }
  Finish(issues);
  Check(&issues, "context", [&] { session.context.Validate(); });
  for (std::size_t i = 0; i < session.weights.size(); ++i) {
    Check(&issues, Indexed("weights", i),
          [&] { session.weights[i].Validate(); });
  }
  if (issues.empty()) Check(&issues, "$", [&] { session.Validate(); });
  Finish(issues);
  return session;
}

Json UserToJson(const GroundTruthUser& user) {
  Json doc;
  doc["format_version"] = kFormatVersion;
  doc["theta_true_P"] = Vec3Json(user.theta_true_P);
  doc["theta_true_V"] = VecJson(user.theta_true_V);
  doc["noise_sigma_pos"] = user.noise_sigma_pos;
  doc["noise_sigma_dur"] = user.noise_sigma_dur;
  doc["seed"] = user.seed;
  return doc;
}

GroundTruthUser UserFromJson(const Json& doc) {
  std::vector<Issue> issues;
  const Reader r = OpenDocument(doc, &issues);
  r.AllowOnly({"format_version", "theta_true_P", "theta_true_V",
               "noise_sigma_pos", "noise_sigma_dur", "seed"});
  GroundTruthUser user;
  user.theta_true_P = r.Vector3("theta_true_P");
  user.theta_true_V = r.Vector("theta_true_V");
  user.noise_sigma_pos = r.Number("noise_sigma_pos");
  user.noise_sigma_dur = r.Number("noise_sigma_dur");
  user.seed = r.Unsigned("seed");
  Finish(issues);
  if (user.theta_true_V.size() % 2 != 0 || user.theta_true_V.size() < 4) {
    issues.push_back({"theta_true_V", "expected 2n entries with n >= 2"});
  } else {
    Check(&issues, "$", [&] {
      user.Validate(static_cast<int>(user.theta_true_V.size() / 2));
    });
  }
  Finish(issues);
  return user;
}

Json ReportToJson(const ExperimentReport& report) {
  Json doc;
  doc["format_version"] = kFormatVersion;
  doc["total_error"] = report.total_error;
  Json vectors = Json::array();
  for (const Eigen::VectorXd& v : report.error_vectors) {
    vectors.push_back(VecJson(v));
  }
  doc["error_vectors"] = std::move(vectors);
  doc["regret"] = report.regret;
  Json weights = Json::array();
  for (const WeightState& w : report.weights) {
    weights.push_back(WeightsJsonImpl(w));
  }
  doc["weights"] = std::move(weights);
  Json scenarios = Json::array();
  for (const ScenarioScore& s : report.scenarios) {
    Json j;
    j["name"] = s.name;
    j["trained"] = s.trained;
    j["distance_optimized"] = s.distance_optimized;
    j["distance_wrong_height"] = s.distance_wrong_height;
    j["distance_wrong_side"] = s.distance_wrong_side;
    j["error_optimized"] = ErrorsJson(s.error_optimized);
    j["error_wrong_height"] = ErrorsJson(s.error_wrong_height);
    j["error_wrong_side"] = ErrorsJson(s.error_wrong_side);
    j["total_error_optimized"] = s.total_error_optimized;
    scenarios.push_back(std::move(j));
  }
  doc["scenarios"] = std::move(scenarios);
  return doc;
}

ExperimentReport ReportFromJson(const Json& doc) {
  std::vector<Issue> issues;
  const Reader r = OpenDocument(doc, &issues);
  r.AllowOnly({"format_version", "total_error", "error_vectors", "regret",
               "weights", "scenarios"});
  ExperimentReport report;
  auto numbers = [&](std::string_view key) {
    const Eigen::VectorXd v = r.Vector(key);
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  report.total_error = numbers("total_error");
  report.regret = numbers("regret");
  if (const Json* vectors = r.Array("error_vectors")) {
    for (std::size_t i = 0; i < vectors->size(); ++i) {
      report.error_vectors.push_back(
          r.ToVector((*vectors)[i], Indexed("error_vectors", i), -1));
    }
  }
  if (const Json* weights = r.Array("weights")) {
    for (std::size_t i = 0; i < weights->size(); ++i) {
      const std::string at = Indexed("weights", i);
      if (!(*weights)[i].is_object()) {
        issues.push_back({at, "expected an object"});
        continue;
      }
      report.weights.push_back(
          ReadWeights(Reader(&(*weights)[i], at, &issues)));
    }
  }
  if (const Json* scenarios = r.Array("scenarios")) {
    for (std::size_t i = 0; i < scenarios->size(); ++i) {
      const std::string at = Indexed("scenarios", i);
      if (!(*scenarios)[i].is_object()) {
        issues.push_back({at, "expected an object"});
        continue;
      }
      const Reader s(&(*scenarios)[i], at, &issues);
      s.AllowOnly({"name", "trained", "distance_optimized",
                   "distance_wrong_height", "distance_wrong_side",
                   "error_optimized", "error_wrong_height", "error_wrong_side",
                   "total_error_optimized"});
      ScenarioScore score;
      score.name = s.String("name");
      score.trained = s.Boolean("trained");
      score.distance_optimized = s.Number("distance_optimized");
      score.distance_wrong_height = s.Number("distance_wrong_height");
      score.distance_wrong_side = s.Number("distance_wrong_side");
      score.error_optimized = ReadErrors(s.Object("error_optimized"));
      score.error_wrong_height = ReadErrors(s.Object("error_wrong_height"));
      score.error_wrong_side = ReadErrors(s.Object("error_wrong_side"));
      score.total_error_optimized = s.Number("total_error_optimized");
      report.scenarios.push_back(std::move(score));
    }
  }
  if (report.error_vectors.size() != report.total_error.size() ||
      report.regret.size() != report.total_error.size() ||
      report.weights.size() != report.total_error.size()) {
    issues.push_back({"$", "per-iteration arrays must have equal lengths"});
  }
  Finish(issues);
  return report;
}

std::string Serialize(const Json& doc) { return doc.dump(2) + "\n"; }

Json ParseJson(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError(
        std::vector<Issue>{{"$", std::string("malformed JSON: ") + e.what()}});
  }
}

Json ReadJsonFile(const fs::path& path) { return ReadFileText(path); }

void WriteFileAtomic(const fs::path& path, std::string_view contents) {
  const fs::path target = fs::absolute(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  fs::path temp = target;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + temp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + temp.string());
  }
  std::error_code ec;
  fs::rename(temp, target, ec);
  if (ec) {
    fs::remove(temp, ec);
    throw Error(ErrorCode::kIo, "cannot replace " + target.string());
  }
}

Scenario LoadScenario(const fs::path& path) {
  return ScenarioFromJson(ReadJsonFile(path));
}
Demonstration LoadDemonstration(const fs::path& path) {
  return DemonstrationFromJson(ReadJsonFile(path));
}
TrajectoryRecord LoadTrajectory(const fs::path& path) {
  return TrajectoryFromJson(ReadJsonFile(path));
}
Session LoadSession(const fs::path& path) {
  return SessionFromJson(ReadJsonFile(path));
}
GroundTruthUser LoadUser(const fs::path& path) {
  return UserFromJson(ReadJsonFile(path));
}
ExperimentReport LoadReport(const fs::path& path) {
  return ReportFromJson(ReadJsonFile(path));
}

void Save(const fs::path& path, const Json& doc) {
  WriteFileAtomic(path, Serialize(doc));
}

fs::path ConfigDir() {
  const char* dir = std::getenv("PREFPLAN_CONFIG_DIR");
  return dir != nullptr && *dir != '\0' ? fs::path(dir) : fs::current_path();
}

fs::path ResolveConfigPath(const fs::path& name) {
  if (name.is_absolute() || fs::exists(name)) return name;
  return ConfigDir() / name;
}

DiscreteTrajectory PreprocessDemo(const Demonstration& demo, const Context& ctx,
                                  const ModelParams& params) {
  const std::size_t n = demo.samples.size();
  std::vector<Issue> issues;
  if (n < 2) issues.push_back({"samples", "need at least 2 samples"});
  for (std::size_t i = 0; i < n; ++i) {
    const DemoSample& s = demo.samples[i];
    if (!std::isfinite(s.t) || !s.x.allFinite()) {
      issues.push_back({Indexed("samples", i), "non-finite value"});
    }
    if (i > 0 && !(s.t > demo.samples[i - 1].t)) {
      issues.push_back(
          {Indexed("samples", i) + ".t", "times must be strictly increasing"});
    }
  }
  Finish(issues);

  std::vector<Vec3> raw(n);
  for (std::size_t i = 0; i < n; ++i) raw[i] = demo.samples[i].x;
  const std::vector<Vec3> x = SmoothPositions(raw);

  std::vector<Vec3> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == n ? i : i + 1;
    v[i] = (x[hi] - x[lo]) / (demo.samples[hi].t - demo.samples[lo].t);
  }
  // Same centered window on velocities, without pinning the ends.
  const int count = static_cast<int>(n);
  const int half_window = kSmoothingWindow / 2;
  std::vector<State> states(n);
  for (int i = 0; i < count; ++i) {
    const int half = std::min({half_window, i, count - 1 - i});
    Vec3 sum = Vec3::Zero();
    for (int k = i - half; k <= i + half; ++k) sum += v[k];
    states[i] = {demo.samples[i].t, x[i], sum / (2 * half + 1)};
  }
  DiscreteTrajectory resampled = ResampleByArcLength(
      DiscreteTrajectory(std::move(states)), params.sampling.N);
  SegmentTrajectory(resampled, params.sampling.M, ctx);
  return resampled;
}

Session StepSessionWithDemo(const Session& session, const Demonstration& demo,
                            FeedbackMode mode, const ModelParams& params) {
  const DiscreteTrajectory* plan = session.current_plan();
  if (plan == nullptr) {
    throw Error(ErrorCode::kNoPlan,
                "no plan for iteration " + std::to_string(session.iteration()) +
                    "; plan before submitting a demonstration");
  }
  const DiscreteTrajectory observed =
      PreprocessDemo(demo, session.context, params);
  const Session view = WithPlan(
      session, PreprocessDemo(ToDemonstration(*plan), session.context, params));
  Session next = StepSession(view, observed, mode, params);
  next.plans = session.plans;
  return next;
}

Demonstration ToDemonstration(const DiscreteTrajectory& traj,
                              std::optional<FeedbackMode> mode) {
  Demonstration demo;
  demo.mode = mode;
  for (const State& s : traj) demo.samples.push_back({s.t, s.x});
  return demo;
}

}  // namespace prefplan
