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

#ifndef PREFPLAN_TRAJECTORY_H_
#define PREFPLAN_TRAJECTORY_H_

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "prefplan/context.h"

namespace prefplan {

struct Waypoint {
  Vec3 position;
  double time;
};

// Per-axis natural cubic spline through a list of waypoints. Among all C2
// interpolants of the waypoints it minimizes the integrated squared
// acceleration.
class ContinuousTrajectory {
 public:
  ContinuousTrajectory() = default;

  double t_begin() const { return knots_.front(); }
  double t_end() const { return knots_.back(); }
  const std::vector<double>& knots() const { return knots_; }

  // Times outside the domain are clamped to it.
  Vec3 Position(double t) const;
  Vec3 Velocity(double t) const;
  Vec3 Acceleration(double t) const;

  // Closed-form integral of |x''(t)|^2 over the domain.
  double IntegratedSquaredAcceleration() const;

 private:
  friend ContinuousTrajectory Interpolate(std::span<const Waypoint> waypoints);

  // Returns the interval index and the local time offset within it.
  std::pair<std::size_t, double> Locate(double t) const;

  std::vector<double> knots_;
  // x(t) = a + b*s + c*s^2 + d*s^3 with s = t - knots_[i].
  std::vector<Vec3> a_, b_, c_, d_;
};

// Throws Error(kInvalidWaypoints) for fewer than two waypoints or
// non-increasing times.
ContinuousTrajectory Interpolate(std::span<const Waypoint> waypoints);

struct State {
  double t = 0.0;
  Vec3 x = Vec3::Zero();
  Vec3 v = Vec3::Zero();

  bool operator==(const State&) const = default;
};

// Ordered timestamped position/velocity states.
class DiscreteTrajectory {
 public:
  DiscreteTrajectory() = default;
  // Throws Error(kInvalidArgument) unless there are at least two states with
  // strictly increasing, finite timestamps and finite positions/velocities.
  explicit DiscreteTrajectory(std::vector<State> states);

  std::size_t size() const { return states_.size(); }
  bool empty() const { return states_.empty(); }
  const State& operator[](std::size_t i) const { return states_[i]; }
  const State& front() const { return states_.front(); }
  const State& back() const { return states_.back(); }
  auto begin() const { return states_.begin(); }
  auto end() const { return states_.end(); }
  const std::vector<State>& states() const { return states_; }
  double duration() const { return states_.back().t - states_.front().t; }

  DiscreteTrajectory Translated(const Vec3& offset) const;

  bool operator==(const DiscreteTrajectory&) const = default;

 private:
  std::vector<State> states_;
};

// `count` states at uniform time steps with analytic velocities.
DiscreteTrajectory Resample(const ContinuousTrajectory& traj, int count);

// Linear interpolation of positions, velocities and times at `count` points
// spaced evenly along the polyline. A zero-length trajectory is resampled
// evenly in time instead.
DiscreteTrajectory ResampleByArcLength(const DiscreteTrajectory& traj,
                                       int count);

// Linear interpolation at `count` evenly spaced times.
DiscreteTrajectory ResampleByTime(const DiscreteTrajectory& traj, int count);

struct Segment {
  std::size_t first = 0;  // first sample index
  std::size_t last = 0;   // last sample index (inclusive)
  Vec3 mean_position = Vec3::Zero();
  double mean_speed = 0.0;  // mean of per-sample speed norms
  double obstacle_distance = 0.0;
  double arc_length = 0.0;  // polyline length from the previous segment's end
  Vec3 end_waypoint = Vec3::Zero();
  double end_time = 0.0;
};

using SegmentSet = std::vector<Segment>;

// Splits the samples into `segments` consecutive ranges of N / M samples;
// the remainder goes to the last range. Throws Error(kInvalidSegmentation)
// unless 2 <= segments < N.
SegmentSet SegmentTrajectory(const DiscreteTrajectory& traj, int segments,
                             const Context& ctx);

// Knot times [0, t_g * D(mid) / D(goal), t_g] with D the distance from
// `start`. The middle ratio is clamped to [0.02, 0.98].
std::array<double, 3> PathTimeVector(const Vec3& start, const Vec3& mid,
                                     const Vec3& goal, double t_goal);

double PathLength(const DiscreteTrajectory& traj);

}  // namespace prefplan

#endif  // PREFPLAN_TRAJECTORY_H_
