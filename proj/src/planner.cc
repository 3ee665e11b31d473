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

#include "prefplan/planner.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "prefplan/direct_search.h"
#include "prefplan/error.h"

namespace prefplan {
namespace {

// Relative tolerance for treating two objective values as tied.
constexpr double kTieTolerance = 1e-12;
// Slack on speed and duration feasibility checks, relative.
constexpr double kFeasibilitySlack = 1e-9;
// Objective of a path whose samples leave the workspace box, before the
// excursion-proportional term. Far below any attainable reward.
constexpr double kExcursionPenalty = 1e6;
// Speeds scanned per segment when seeding the timing search.
constexpr int kSeedSpeeds = 512;

struct Candidate {
  Vec3 mid;
  double objective;
  bool converged = true;
};

bool Lexicographically(const Vec3& a, const Vec3& b) {
  return std::lexicographical_compare(a.data(), a.data() + 3, b.data(),
                                      b.data() + 3);
}

// True if `a` should be preferred over `b`.
bool Preferred(const Candidate& a, const Candidate& b, const Context& ctx,
               const SamplingParams& sampling) {
  const double scale =
      std::max({1.0, std::abs(a.objective), std::abs(b.objective)});
  if (std::abs(a.objective - b.objective) > kTieTolerance * scale) {
    return a.objective > b.objective;
  }
  const double la = PathLength(PathTrajectory(a.mid, ctx, sampling));
  const double lb = PathLength(PathTrajectory(b.mid, ctx, sampling));
  if (la != lb) return la < lb;
  return Lexicographically(a.mid, b.mid);
}

double SequentialSum(const Eigen::VectorXd& x) {
  return std::accumulate(x.data(), x.data() + x.size(), 0.0);
}

class SpeedRewardTable {
 public:
  explicit SpeedRewardTable(const VelocityProblem& problem)
      : problem_(problem), centers_(problem.velocity.Centers()) {}

  double operator()(double speed, int segment) const {
    const auto& v = problem_.velocity;
    const int n = v.n;
    const bool close = problem_.obstacle_distances[segment] < v.d_c;
    const int offset = close ? 0 : n;
    const double scaled = v.epsilon * speed;
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
      const double r = scaled - centers_[j];
      total += problem_.theta_HV[offset + j] * std::exp(-r * r);
    }
    return total +
           problem_.robot.theta_RV * RobotSpeedReward(speed, v, problem_.robot);
  }

 private:
  const VelocityProblem& problem_;
  std::vector<double> centers_;
};

}  // namespace

DiscreteTrajectory PathTrajectory(const Vec3& mid, const Context& ctx,
                                  const SamplingParams& sampling) {
  const auto times = PathTimeVector(ctx.start, mid, ctx.goal, sampling.t_g);
  const Waypoint waypoints[3] = {
      {ctx.start, times[0]}, {mid, times[1]}, {ctx.goal, times[2]}};
  return Resample(Interpolate(waypoints), sampling.N);
}

double PathObjective(const Vec3& mid, const PathProblem& problem) {
  const Context& ctx = problem.context;
  if (!mid.allFinite() || !ctx.InWorkspace(mid)) {
    throw Error(ErrorCode::kOutOfBounds,
                "middle waypoint outside the workspace box");
  }
  const DiscreteTrajectory traj =
      PathTrajectory(mid, ctx, problem.params.sampling);
  double excursion = 0.0;
  for (const State& s : traj) {
    excursion += ((ctx.workspace_low - s.x).cwiseMax(0.0) +
                  (s.x - ctx.workspace_upp).cwiseMax(0.0))
                     .norm();
  }
  if (excursion > 0.0) return -kExcursionPenalty * (1.0 + excursion);
  const Vec3 phi = PathFeatureCount(traj, ctx, problem.params.path);
  return problem.theta_HP.dot(phi) +
         RobotPathObjective(traj, ctx, problem.params.robot);
}

PathSolution OptimizePath(const PathProblem& problem,
                          const ProgressFn& progress) {
  const Context& ctx = problem.context;
  const ModelParams& params = problem.params;
  const OptimizerSettings& opt = params.optimizer;
  const Vec3 lower = ctx.workspace_low;
  const Vec3 upper = ctx.workspace_upp;
  const Vec3 cell = (upper - lower) / opt.grid;
  const int budget = opt.max_evaluations;
  const int total_budget = budget + opt.velocity_max_evaluations;

  int evaluations = 0;
  auto report = [&] {
    if (progress) {
      progress(std::min(1.0, static_cast<double>(evaluations) / total_budget));
    }
  };

  std::vector<Candidate> grid;
  grid.reserve(static_cast<std::size_t>(opt.grid * opt.grid * opt.grid));
  for (int i = 0; i < opt.grid; ++i) {
    for (int j = 0; j < opt.grid; ++j) {
      for (int k = 0; k < opt.grid; ++k) {
        const Vec3 mid =
            lower + Vec3(i + 0.5, j + 0.5, k + 0.5).cwiseProduct(cell);
        grid.push_back({mid, PathObjective(mid, problem)});
        ++evaluations;
      }
    }
  }
  report();
  const auto preferred = [&](const Candidate& a, const Candidate& b) {
    return Preferred(a, b, ctx, params.sampling);
  };
  const int seeds = std::min<int>(opt.restarts, static_cast<int>(grid.size()));
  std::partial_sort(grid.begin(), grid.begin() + seeds, grid.end(),
                    [](const Candidate& a, const Candidate& b) {
                      if (a.objective != b.objective) {
                        return a.objective > b.objective;
                      }
                      return Lexicographically(a.mid, b.mid);
                    });

  const int per_restart =
      std::max(10, (budget - evaluations) / std::max(1, seeds));
  const ObjectiveFn objective = [&](const Eigen::VectorXd& x) {
    return PathObjective(Vec3(x), problem);
  };
  SimplexOptions simplex;
  simplex.initial_step = cell;
  simplex.tolerance = opt.tolerance;
  simplex.max_evaluations = per_restart;

  Candidate best = grid.front();
  for (int s = 0; s < seeds; ++s) {
    simplex.seed = opt.seed + static_cast<std::uint64_t>(s);
    const DirectSearchResult local =
        MaximizeSimplex(objective, grid[s].mid, lower, upper, simplex);
    evaluations += local.evaluations;
    report();
    const Candidate found{Vec3(local.x), local.value, local.converged};
    if (s == 0 || preferred(found, best)) best = found;
  }

  PathSolution out;
  out.mid = best.mid;
  out.waypoints = {ctx.start, best.mid, ctx.goal};
  out.objective = best.objective;
  out.evaluations = evaluations;
  out.restarts = seeds;
  out.converged = best.converged;
  return out;
}

void VelocityProblem::Validate() const {
  const std::size_t m = lengths.size();
  if (m < 1 || waypoints.size() != m || obstacle_distances.size() != m) {
    throw Error(ErrorCode::kInvalidArgument,
                "velocity problem needs one waypoint, length and distance per "
                "segment");
  }
  if (theta_HV.size() != 2 * velocity.n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "theta_HV must have 2n = " + std::to_string(2 * velocity.n) +
                    " entries");
  }
  for (double length : lengths) {
    if (!(length > 0.0) || !std::isfinite(length)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "segment arc lengths must be positive");
    }
  }
  velocity.Validate();
  const double fastest =
      std::accumulate(lengths.begin(), lengths.end(), 0.0) / velocity.v_max;
  if (!(t_upp >= fastest)) {
    throw Error(ErrorCode::kInfeasible,
                "t_upp = " + std::to_string(t_upp) +
                    " s is shorter than the fastest admissible duration " +
                    std::to_string(fastest) + " s");
  }
}

VelocityProblem MakeVelocityProblem(const SegmentSet& segments,
                                    const Eigen::VectorXd& theta_HV,
                                    const ModelParams& params) {
  VelocityProblem problem;
  double total = 0.0;
  for (const Segment& seg : segments) {
    problem.waypoints.push_back(seg.end_waypoint);
    problem.lengths.push_back(seg.arc_length);
    problem.obstacle_distances.push_back(seg.obstacle_distance);
    total += seg.arc_length;
  }
  problem.theta_HV = theta_HV;
  problem.velocity = params.velocity;
  problem.robot = params.robot;
  problem.t_upp = params.optimizer.t_upp_factor * total / params.robot.v_robot;
  problem.max_evaluations = params.optimizer.velocity_max_evaluations;
  return problem;
}

double SegmentSpeedReward(double speed, int segment,
                          const VelocityProblem& problem) {
  return SpeedRewardTable(problem)(speed, segment);
}

double VelocityObjective(std::span<const double> times,
                         const VelocityProblem& problem) {
  const int m = problem.segments();
  if (static_cast<int>(times.size()) != m) {
    throw Error(ErrorCode::kDimensionMismatch,
                "need one timestamp per segment");
  }
  const auto& v = problem.velocity;
  const SpeedRewardTable reward(problem);
  double total = 0.0;
  double previous = 0.0;
  for (int r = 0; r < m; ++r) {
    const double dt = times[r] - previous;
    if (!(dt > 0.0)) {
      throw Error(ErrorCode::kInfeasible, "timestamps must increase");
    }
    const double speed = problem.lengths[r] / dt;
    if (speed < v.v_min * (1.0 - kFeasibilitySlack) ||
        speed > v.v_max * (1.0 + kFeasibilitySlack)) {
      throw Error(ErrorCode::kInfeasible,
                  "segment " + std::to_string(r) + " speed " +
                      std::to_string(speed) + " m/s outside [v_min, v_max]");
    }
    total += reward(speed, r);
    previous = times[r];
  }
  if (times.back() > problem.t_upp * (1.0 + kFeasibilitySlack)) {
    throw Error(ErrorCode::kInfeasible, "total duration exceeds t_upp");
  }
  return total;
}

VelocitySolution OptimizeVelocity(const VelocityProblem& problem,
                                  const ProgressFn& progress) {
  problem.Validate();
  const int m = problem.segments();
  const auto& v = problem.velocity;
  const SpeedRewardTable reward(problem);

  // The objective separates by segment, so a dense scan of each segment's
  // speed finds the unconstrained optimum up to the grid spacing. The RBF
  // center speeds are scanned as well.
  std::vector<double> speeds;
  for (int i = 0; i <= kSeedSpeeds; ++i) {
    speeds.push_back(i == kSeedSpeeds
                         ? v.v_max
                         : v.v_min + (v.v_max - v.v_min) * i / kSeedSpeeds);
  }
  for (double c : v.Centers()) {
    speeds.push_back(std::clamp(c / v.epsilon, v.v_min, v.v_max));
  }

  Eigen::VectorXd lower(m), upper(m), seed(m);
  for (int r = 0; r < m; ++r) {
    lower[r] = problem.lengths[r] / v.v_max;
    upper[r] = problem.lengths[r] / v.v_min;
    double best_speed = v.v_min;
    double best_value = -std::numeric_limits<double>::infinity();
    for (double speed : speeds) {
      const double value = reward(speed, r);
      if (value > best_value) {
        best_value = value;
        best_speed = speed;
      }
    }
    seed[r] = std::clamp(problem.lengths[r] / best_speed, lower[r], upper[r]);
  }
  if (SequentialSum(seed) > problem.t_upp) {
    seed = ProjectCappedBox(seed, lower, upper, problem.t_upp);
  }

  const ObjectiveFn objective = [&](const Eigen::VectorXd& durations) {
    double total = 0.0;
    for (int r = 0; r < m; ++r) {
      total += reward(problem.lengths[r] / durations[r], r);
    }
    return total;
  };
  CompassOptions options;
  options.initial_step = 0.1 * (upper - lower).mean();
  options.tolerance = 1e-7;
  options.max_evaluations = problem.max_evaluations;
  const DirectSearchResult found =
      MaximizeCompass(objective, seed, lower, upper, problem.t_upp, options);
  if (progress) progress(1.0);

  VelocitySolution out;
  out.times = FeasibleTimes(
      std::span<const double>(found.x.data(), found.x.size()), problem);
  out.objective = VelocityObjective(out.times, problem);
  out.evaluations = found.evaluations;
  out.converged = found.converged;
  return out;
}

std::vector<double> FeasibleTimes(std::span<const double> durations,
                                  const VelocityProblem& problem) {
  const auto& v = problem.velocity;
  std::vector<double> times(durations.size());
  double previous = 0.0;
  for (std::size_t r = 0; r < durations.size(); ++r) {
    double t = previous + durations[r];
    // Summation can round a bound-hugging duration past the bound; a few
    // ulps of adjustment restore it.
    for (int i = 0; i < 64; ++i) {
      const double speed = problem.lengths[r] / (t - previous);
      if (speed < v.v_min) {
        t = std::nextafter(t, -INFINITY);
      } else if (speed > v.v_max) {
        t = std::nextafter(t, INFINITY);
      } else {
        break;
      }
    }
    times[r] = t;
    previous = t;
  }
  if (!times.empty()) {
    const double floor = times.size() > 1 ? times[times.size() - 2] : 0.0;
    const double length = problem.lengths.back();
    for (int i = 0;
         i < 64 && times.back() > problem.t_upp &&
         length / (std::nextafter(times.back(), -INFINITY) - floor) <= v.v_max;
         ++i) {
      times.back() = std::nextafter(times.back(), -INFINITY);
    }
  }
  return times;
}

DiscreteTrajectory AssembleTrajectory(const Vec3& start,
                                      std::span<const Vec3> waypoints,
                                      std::span<const double> times,
                                      int count) {
  if (waypoints.size() != times.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "need one time per waypoint");
  }
  std::vector<Waypoint> knots;
  knots.reserve(waypoints.size() + 1);
  knots.push_back({start, 0.0});
  for (std::size_t r = 0; r < waypoints.size(); ++r) {
    knots.push_back({waypoints[r], times[r]});
  }
  return Resample(Interpolate(knots), count);
}

void CheckTrajectory(const DiscreteTrajectory& traj, const Context& ctx,
                     PlanDiagnostics* diagnostics) {
  double closest = std::numeric_limits<double>::infinity();
  bool outside = false;
  for (const State& s : traj) {
    closest = std::min(closest, (s.x - ctx.obstacle_center).norm());
    outside = outside || !ctx.InWorkspace(s.x, 1e-9);
  }
  diagnostics->min_obstacle_distance = closest;
  diagnostics->collision = closest < ctx.obstacle_radius;
  diagnostics->workspace_violation = outside;
}

PlanResult Plan(const WeightState& weights, const Context& ctx,
                const ModelParams& params, const ProgressFn& progress) {
  params.Validate(ctx);
  weights.Validate();
  if (weights.theta_HV.size() != 2 * params.velocity.n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "theta_HV size does not match the velocity features");
  }
  const int total_budget = params.optimizer.max_evaluations +
                           params.optimizer.velocity_max_evaluations;

  PathProblem path_problem{ctx, weights.theta_HP, params};
  const PathSolution path = OptimizePath(path_problem, progress);
  const DiscreteTrajectory path_traj =
      PathTrajectory(path.mid, ctx, params.sampling);

  PlanResult result;
  result.mid = path.mid;
  result.segments = SegmentTrajectory(path_traj, params.sampling.M, ctx);
  const VelocityProblem velocity_problem =
      MakeVelocityProblem(result.segments, weights.theta_HV, params);
  const double path_share =
      static_cast<double>(params.optimizer.max_evaluations) / total_budget;
  const ProgressFn velocity_progress = [&](double f) {
    if (progress) progress(path_share + (1.0 - path_share) * f);
  };
  const VelocitySolution timing =
      OptimizeVelocity(velocity_problem, velocity_progress);
  result.times = timing.times;
  result.trajectory = AssembleTrajectory(ctx.start, velocity_problem.waypoints,
                                         timing.times, params.sampling.N);

  PlanDiagnostics& diag = result.diagnostics;
  diag.path_evaluations = path.evaluations;
  diag.velocity_evaluations = timing.evaluations;
  diag.restarts = path.restarts;
  diag.path_converged = path.converged;
  diag.velocity_converged = timing.converged;
  diag.path_objective = path.objective;
  diag.velocity_objective = timing.objective;
  CheckTrajectory(result.trajectory, ctx, &diag);
  return result;
}

}  // namespace prefplan
