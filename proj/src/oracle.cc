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

#include "prefplan/oracle.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "prefplan/direct_search.h"
#include "prefplan/error.h"
#include "prefplan/features.h"

namespace prefplan {
namespace {

DiscreteTrajectory Canonical(const DiscreteTrajectory& traj, int samples) {
  return ResampleByArcLength(traj, samples);
}

// Slows an assignment down uniformly (segments already at their fastest
// duration stay put) until the total fits under t_upp.
std::vector<double> FitDurations(std::vector<double> durations,
                                 const std::vector<double>& fastest,
                                 double t_upp) {
  for (std::size_t pass = 0; pass <= durations.size(); ++pass) {
    const double total =
        std::accumulate(durations.begin(), durations.end(), 0.0);
    if (total <= t_upp) break;
    double pinned = 0.0;
    double free = 0.0;
    for (std::size_t r = 0; r < durations.size(); ++r) {
      (durations[r] <= fastest[r] ? pinned : free) += durations[r];
    }
    if (free <= 0.0) break;
    const double scale = (t_upp - pinned) / free;
    for (std::size_t r = 0; r < durations.size(); ++r) {
      if (durations[r] > fastest[r]) {
        durations[r] = std::max(fastest[r], durations[r] * scale);
      }
    }
  }
  // Round-off guard so the cumulative end time never exceeds t_upp.
  while (std::accumulate(durations.begin(), durations.end(), 0.0) > t_upp) {
    for (std::size_t r = 0; r < durations.size(); ++r) {
      if (durations[r] > fastest[r]) {
        durations[r] = std::max(fastest[r], std::nextafter(durations[r], 0.0));
      }
    }
  }
  return durations;
}

struct LevelEvaluator {
  const VelocityProblem& problem;
  std::vector<double> levels;
  std::vector<double> fastest;

  // Objective of an assignment of level indices, after fitting under t_upp.
  double operator()(const std::vector<int>& assignment,
                    std::vector<double>* durations_out = nullptr) const {
    const std::size_t m = assignment.size();
    std::vector<double> durations(m);
    for (std::size_t r = 0; r < m; ++r) {
      durations[r] = problem.lengths[r] / levels[assignment[r]];
    }
    durations = FitDurations(std::move(durations), fastest, problem.t_upp);
    double total = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      total += SegmentSpeedReward(problem.lengths[r] / durations[r],
                                  static_cast<int>(r), problem);
    }
    if (durations_out) *durations_out = std::move(durations);
    return total;
  }
};

ScenarioScore ScoreScenario(const Scenario& scenario,
                            const GroundTruthUser& user,
                            const WeightState& learned, bool trained) {
  const Context& ctx = scenario.context;
  const ModelParams& params = scenario.params;
  const DiscreteTrajectory oracle =
      Plan(user.Weights(), ctx, params).trajectory;
  const DiscreteTrajectory plan = Plan(learned, ctx, params).trajectory;
  const Dummies dummies = MakeDummies(user, ctx, params);

  ScenarioScore score;
  score.name = scenario.name;
  score.trained = trained;
  score.distance_optimized = NormalizedDistance(oracle, plan, ctx);
  score.distance_wrong_height =
      NormalizedDistance(oracle, dummies.wrong_height.trajectory, ctx);
  score.distance_wrong_side =
      NormalizedDistance(oracle, dummies.wrong_side.trajectory, ctx);
  score.error_optimized = PathPreferenceErrors(oracle, plan, ctx, params);
  score.error_wrong_height = PathPreferenceErrors(
      oracle, dummies.wrong_height.trajectory, ctx, params);
  score.error_wrong_side =
      PathPreferenceErrors(oracle, dummies.wrong_side.trajectory, ctx, params);
  score.total_error_optimized = TotalFeatureError(oracle, plan, ctx, params);
  return score;
}

}  // namespace

WeightState GroundTruthUser::Weights() const {
  WeightState w;
  w.theta_HP = theta_true_P;
  w.theta_HV = theta_true_V;
  w.alpha = 1.0;
  return w;
}

void GroundTruthUser::Validate(int rbf_count) const {
  if (theta_true_V.size() != 2 * rbf_count) {
    throw Error(ErrorCode::kDimensionMismatch,
                "theta_true_V must have 2n entries");
  }
  if (!theta_true_P.allFinite() || !theta_true_V.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "user weights must be finite");
  }
  if (!(noise_sigma_pos >= 0.0) || !(noise_sigma_dur >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "noise sigmas must be >= 0");
  }
}

Vec3 PerturbWaypoint(const Vec3& mid, double sigma, const Context& ctx,
                     std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec3 out = mid;
  for (int i = 0; i < 3; ++i) out[i] += sigma * normal(rng);
  return out.cwiseMax(ctx.workspace_low).cwiseMin(ctx.workspace_upp);
}

DiscreteTrajectory PerturbPlan(const PlanResult& optimum,
                               const GroundTruthUser& user, const Context& ctx,
                               const ModelParams& params,
                               std::mt19937_64& rng) {
  if (user.noise_sigma_pos == 0.0 && user.noise_sigma_dur == 0.0) {
    return optimum.trajectory;
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  const Vec3 mid = PerturbWaypoint(optimum.mid, user.noise_sigma_pos, ctx, rng);

  const DiscreteTrajectory path = PathTrajectory(mid, ctx, params.sampling);
  const SegmentSet segments = SegmentTrajectory(path, params.sampling.M, ctx);
  const std::size_t m = segments.size();
  Eigen::VectorXd durations(m), lower(m), upper(m);
  double previous = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    const double planned_speed =
        optimum.segments[r].arc_length / (optimum.times[r] - previous);
    previous = optimum.times[r];
    const double length = segments[r].arc_length;
    lower[r] = length / params.velocity.v_max;
    upper[r] = length / params.velocity.v_min;
    durations[r] =
        length / planned_speed * std::exp(user.noise_sigma_dur * normal(rng));
  }
  const double total_length = std::accumulate(
      segments.begin(), segments.end(), 0.0,
      [](double acc, const Segment& s) { return acc + s.arc_length; });
  const double t_upp =
      params.optimizer.t_upp_factor * total_length / params.robot.v_robot;
  durations = ProjectCappedBox(durations, lower, upper, t_upp);

  std::vector<Vec3> waypoints(m);
  std::vector<double> times(m);
  double t = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    waypoints[r] = segments[r].end_waypoint;
    t += durations[r];
    times[r] = t;
  }
  return AssembleTrajectory(ctx.start, waypoints, times, params.sampling.N);
}

DiscreteTrajectory Demonstrate(const GroundTruthUser& user, const Context& ctx,
                               const ModelParams& params,
                               std::mt19937_64& rng) {
  user.Validate(params.velocity.n);
  return PerturbPlan(Plan(user.Weights(), ctx, params), user, ctx, params, rng);
}

DiscreteTrajectory Demonstrate(const GroundTruthUser& user, const Context& ctx,
                               const ModelParams& params) {
  std::mt19937_64 rng(user.seed);
  return Demonstrate(user, ctx, params, rng);
}

GridOptimum BruteForcePath(const Vec3& theta_HP, const Context& ctx,
                           const ModelParams& params, int resolution) {
  if (resolution < 11) {
    throw Error(ErrorCode::kInvalidArgument,
                "brute-force resolution must be at least 11 per axis");
  }
  const PathProblem problem{ctx, theta_HP, params};
  const Vec3 span = ctx.workspace_upp - ctx.workspace_low;
  auto coordinate = [&](int axis, int i) {
    if (i == resolution - 1) return ctx.workspace_upp[axis];
    return ctx.workspace_low[axis] + span[axis] * i / (resolution - 1);
  };

  GridOptimum best;
  double best_length = std::numeric_limits<double>::infinity();
  bool first = true;
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      for (int k = 0; k < resolution; ++k) {
        const Vec3 mid(coordinate(0, i), coordinate(1, j), coordinate(2, k));
        const double value = PathObjective(mid, problem);
        if (first || value > best.objective) {
          best = {mid, value};
          best_length = std::numeric_limits<double>::quiet_NaN();
          first = false;
        } else if (value == best.objective) {
          // Tie: shorter path wins. Grid order is already lexicographic.
          if (std::isnan(best_length)) {
            best_length =
                PathLength(PathTrajectory(best.mid, ctx, params.sampling));
          }
          const double length =
              PathLength(PathTrajectory(mid, ctx, params.sampling));
          if (length < best_length) {
            best = {mid, value};
            best_length = length;
          }
        }
      }
    }
  }
  return best;
}

LevelOptimum BruteForceVelocity(const VelocityProblem& problem,
                                std::span<const double> levels,
                                int exhaustive_limit) {
  problem.Validate();
  const auto& v = problem.velocity;
  LevelEvaluator eval{problem, {}, {}};
  if (levels.empty()) {
    for (double c : v.Centers()) {
      eval.levels.push_back(std::clamp(c / v.epsilon, v.v_min, v.v_max));
    }
  } else {
    eval.levels.assign(levels.begin(), levels.end());
  }
  for (double level : eval.levels) {
    if (!(level >= v.v_min && level <= v.v_max)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "speed levels must lie within [v_min, v_max]");
    }
  }
  for (double length : problem.lengths) {
    eval.fastest.push_back(length / v.v_max);
  }

  const int m = problem.segments();
  const int count = static_cast<int>(eval.levels.size());
  std::vector<int> best_assignment(static_cast<std::size_t>(m), 0);
  double best_value = -std::numeric_limits<double>::infinity();

  if (m <= exhaustive_limit) {
    std::vector<int> assignment(static_cast<std::size_t>(m), 0);
    while (true) {
      const double value = eval(assignment);
      if (value > best_value) {
        best_value = value;
        best_assignment = assignment;
      }
      int r = 0;
      while (r < m && ++assignment[r] == count) assignment[r++] = 0;
      if (r == m) break;
    }
  } else {
    // Sweeps to a fixpoint from the per-segment best and from every uniform
    // assignment, keeping the best fixpoint.
    const auto descend = [&](std::vector<int> current) {
      double value = eval(current);
      bool changed = true;
      while (changed) {
        changed = false;
        for (int r = 0; r < m; ++r) {
          std::vector<int> trial = current;
          for (int j = 0; j < count; ++j) {
            trial[r] = j;
            const double candidate = eval(trial);
            if (candidate > value) {
              value = candidate;
              current = trial;
              changed = true;
            }
          }
        }
      }
      if (value > best_value) {
        best_value = value;
        best_assignment = current;
      }
    };
    std::vector<int> start(static_cast<std::size_t>(m), 0);
    for (int r = 0; r < m; ++r) {
      double seg_best = -std::numeric_limits<double>::infinity();
      for (int j = 0; j < count; ++j) {
        const double value = SegmentSpeedReward(eval.levels[j], r, problem);
        if (value > seg_best) {
          seg_best = value;
          start[r] = j;
        }
      }
    }
    descend(start);
    for (int j = 0; j < count; ++j) {
      descend(std::vector<int>(static_cast<std::size_t>(m), j));
    }
  }

  LevelOptimum out;
  std::vector<double> durations;
  out.objective = eval(best_assignment, &durations);
  out.times = FeasibleTimes(durations, problem);
  for (int r = 0; r < m; ++r) {
    out.speeds.push_back(problem.lengths[r] / durations[r]);
  }
  return out;
}

PreferenceErrors PathPreferenceErrors(const DiscreteTrajectory& reference,
                                      const DiscreteTrajectory& traj,
                                      const Context& ctx,
                                      const ModelParams& params) {
  const int n = params.sampling.N;
  const Vec3 delta =
      (PathFeatureCount(Canonical(traj, n), ctx, params.path) -
       PathFeatureCount(Canonical(reference, n), ctx, params.path))
          .cwiseAbs() /
      n;
  return {delta[0], delta[1], delta[2]};
}

double TotalFeatureError(const DiscreteTrajectory& reference,
                         const DiscreteTrajectory& traj, const Context& ctx,
                         const ModelParams& params) {
  const int n = params.sampling.N;
  const Feedback raw =
      ComputeFeedback(Canonical(reference, n), Canonical(traj, n), ctx, params);
  const Feedback normalized = NormalizeFeedback(raw, n, params.sampling.M);
  return std::sqrt(normalized.delta_path.squaredNorm() +
                   normalized.delta_velocity.squaredNorm());
}

double NormalizedDistance(const DiscreteTrajectory& reference,
                          const DiscreteTrajectory& traj, const Context& ctx,
                          int samples) {
  const DiscreteTrajectory a = Canonical(reference, samples);
  const DiscreteTrajectory b = Canonical(traj, samples);
  double total = 0.0;
  for (int k = 0; k < samples; ++k) total += (a[k].x - b[k].x).norm();
  return total / samples / (ctx.goal - ctx.start).norm();
}

DiscreteTrajectory MeanTrajectory(std::span<const DiscreteTrajectory> trajs,
                                  int samples) {
  if (trajs.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "mean of zero trajectories");
  }
  std::vector<State> mean(static_cast<std::size_t>(samples));
  for (const DiscreteTrajectory& traj : trajs) {
    const DiscreteTrajectory c = Canonical(traj, samples);
    for (int k = 0; k < samples; ++k) {
      mean[k].t += c[k].t;
      mean[k].x += c[k].x;
      mean[k].v += c[k].v;
    }
  }
  const double count = static_cast<double>(trajs.size());
  for (State& s : mean) {
    s.t /= count;
    s.x /= count;
    s.v /= count;
  }
  return DiscreteTrajectory(std::move(mean));
}

double TrueReward(const GroundTruthUser& user, const DiscreteTrajectory& traj,
                  const Context& ctx, const ModelParams& params) {
  const FeatureCount count =
      ComputeFeatureCount(Canonical(traj, params.sampling.N), ctx, params);
  // Empty bins do not contribute.
  const int n = params.velocity.n;
  double reward = user.theta_true_P.dot(count.phi_P);
  if (count.count_V1 > 0) {
    reward += user.theta_true_V.head(n).dot(count.phi_V1);
  }
  if (count.count_V2 > 0) {
    reward += user.theta_true_V.tail(n).dot(count.phi_V2);
  }
  return reward;
}

BinSpeeds MeanBinSpeeds(const DiscreteTrajectory& traj, const Context& ctx,
                        const ModelParams& params) {
  const SegmentSet segments = SegmentTrajectory(
      Canonical(traj, params.sampling.N), params.sampling.M, ctx);
  double close = 0.0, far = 0.0;
  int close_count = 0, far_count = 0;
  for (const Segment& seg : segments) {
    if (seg.obstacle_distance < params.velocity.d_c) {
      close += seg.mean_speed;
      ++close_count;
    } else {
      far += seg.mean_speed;
      ++far_count;
    }
  }
  BinSpeeds out;
  if (close_count > 0) out.close = close / close_count;
  if (far_count > 0) out.far = far / far_count;
  return out;
}

Dummies MakeDummies(const GroundTruthUser& user, const Context& ctx,
                    const ModelParams& params) {
  WeightState wrong_height = user.Weights();
  wrong_height.theta_HP[0] = -wrong_height.theta_HP[0];
  WeightState wrong_side = user.Weights();
  wrong_side.theta_HP[2] = -wrong_side.theta_HP[2];
  return {Plan(wrong_height, ctx, params), Plan(wrong_side, ctx, params)};
}

ExperimentReport RunClosedLoop(const GroundTruthUser& user,
                               std::span<const Scenario> scenarios,
                               int max_iters, double tolerance) {
  if (scenarios.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "closed loop needs a scenario");
  }
  const Scenario& training = scenarios.front();
  const Context& ctx = training.context;
  const ModelParams& params = training.params;
  user.Validate(params.velocity.n);

  using Clock = std::chrono::steady_clock;
  ExperimentReport report;
  std::mt19937_64 rng(user.seed);
  const PlanResult optimum = Plan(user.Weights(), ctx, params);
  const DiscreteTrajectory& oracle = optimum.trajectory;
  const int n = params.sampling.N;

  auto record = [&](const Session& session, const DiscreteTrajectory& plan,
                    Clock::time_point began) {
    const Feedback normalized = NormalizeFeedback(
        ComputeFeedback(Canonical(oracle, n), Canonical(plan, n), ctx, params),
        n, params.sampling.M);
    Eigen::VectorXd error(3 + normalized.delta_velocity.size());
    error << normalized.delta_path, normalized.delta_velocity;
    report.error_vectors.push_back(error);
    report.total_error.push_back(error.norm());
    report.regret.push_back(TrueReward(user, oracle, ctx, params) -
                            TrueReward(user, plan, ctx, params));
    report.weights.push_back(session.current());
    report.wall_clock_seconds.push_back(
        std::chrono::duration<double>(Clock::now() - began).count());
  };

  auto began = Clock::now();
  Session session = Session::Start(
      ctx, WeightState::Zero(params.velocity.n, params.learning.alpha));
  DiscreteTrajectory plan = Plan(session.current(), ctx, params).trajectory;
  record(session, plan, began);

  for (int i = 0; i < max_iters; ++i) {
    if (report.total_error.back() < tolerance) break;
    began = Clock::now();
    const DiscreteTrajectory demo =
        PerturbPlan(optimum, user, ctx, params, rng);
    session = StepSession(WithPlan(std::move(session), plan), demo,
                          FeedbackMode::kBoth, params);
    plan = Plan(session.current(), ctx, params).trajectory;
    record(session, plan, began);
  }

  const WeightState learned = session.current();
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    report.scenarios.push_back(
        ScoreScenario(scenarios[s], user, learned, s == 0));
  }
  return report;
}

}  // namespace prefplan
