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

#include "prefplan/trajectory.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "prefplan/error.h"

namespace prefplan {
namespace {

constexpr double kMinRatio = 0.02;
constexpr double kMaxRatio = 0.98;

void RequireCount(int count) {
  if (count < 2) {
    throw Error(
        ErrorCode::kInvalidArgument,
        "resampling needs at least 2 samples, got " + std::to_string(count));
  }
}

// Time of sample k out of `count` evenly spaced over [t0, t1]. The last
// sample lands exactly on t1.
double UniformTime(double t0, double t1, int k, int count) {
  if (k == count - 1) return t1;
  return t0 + (t1 - t0) * static_cast<double>(k) / (count - 1);
}

State Lerp(const State& a, const State& b, double w) {
  return State{a.t + w * (b.t - a.t), a.x + w * (b.x - a.x),
               a.v + w * (b.v - a.v)};
}

}  // namespace

ContinuousTrajectory Interpolate(std::span<const Waypoint> waypoints) {
  const std::size_t n = waypoints.size();
  if (n < 2) {
    throw Error(ErrorCode::kInvalidWaypoints,
                "interpolation needs at least 2 waypoints");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(waypoints[i].time) ||
        !waypoints[i].position.allFinite()) {
      throw Error(ErrorCode::kInvalidWaypoints, "non-finite waypoint");
    }
    if (i > 0 && !(waypoints[i].time > waypoints[i - 1].time)) {
      throw Error(ErrorCode::kInvalidWaypoints,
                  "waypoint times must be strictly increasing (index " +
                      std::to_string(i) + ")");
    }
  }

  const std::size_t intervals = n - 1;
  std::vector<double> h(intervals);
  for (std::size_t i = 0; i < intervals; ++i) {
    h[i] = waypoints[i + 1].time - waypoints[i].time;
  }

  // Second derivatives at the knots; zero at both ends.
  std::vector<Vec3> m(n, Vec3::Zero());
  if (n > 2) {
    const std::size_t inner = n - 2;
    std::vector<double> diag(inner), upper(inner), lower(inner);
    std::vector<Vec3> rhs(inner);
    for (std::size_t k = 0; k < inner; ++k) {
      const std::size_t i = k + 1;
      lower[k] = h[i - 1];
      diag[k] = 2.0 * (h[i - 1] + h[i]);
      upper[k] = h[i];
      rhs[k] = 6.0 *
               ((waypoints[i + 1].position - waypoints[i].position) / h[i] -
                (waypoints[i].position - waypoints[i - 1].position) / h[i - 1]);
    }
    // Thomas algorithm; the system is strictly diagonally dominant.
    for (std::size_t k = 1; k < inner; ++k) {
      const double w = lower[k] / diag[k - 1];
      diag[k] -= w * upper[k - 1];
      rhs[k] -= w * rhs[k - 1];
    }
    m[inner] = rhs[inner - 1] / diag[inner - 1];
    for (std::size_t k = inner - 1; k-- > 0;) {
      m[k + 1] = (rhs[k] - upper[k] * m[k + 2]) / diag[k];
    }
  }

  ContinuousTrajectory out;
  out.knots_.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.knots_[i] = waypoints[i].time;
  out.a_.resize(intervals);
  out.b_.resize(intervals);
  out.c_.resize(intervals);
  out.d_.resize(intervals);
  for (std::size_t i = 0; i < intervals; ++i) {
    const Vec3& y0 = waypoints[i].position;
    const Vec3& y1 = waypoints[i + 1].position;
    out.a_[i] = y0;
    out.b_[i] = (y1 - y0) / h[i] - h[i] * (2.0 * m[i] + m[i + 1]) / 6.0;
    out.c_[i] = m[i] / 2.0;
    out.d_[i] = (m[i + 1] - m[i]) / (6.0 * h[i]);
  }
  return out;
}

std::pair<std::size_t, double> ContinuousTrajectory::Locate(double t) const {
  t = std::clamp(t, knots_.front(), knots_.back());
  auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  std::size_t i = it == knots_.begin()
                      ? 0
                      : static_cast<std::size_t>(it - knots_.begin()) - 1;
  i = std::min(i, a_.size() - 1);
  return {i, t - knots_[i]};
}

Vec3 ContinuousTrajectory::Position(double t) const {
  const auto [i, s] = Locate(t);
  return a_[i] + s * (b_[i] + s * (c_[i] + s * d_[i]));
}

Vec3 ContinuousTrajectory::Velocity(double t) const {
  const auto [i, s] = Locate(t);
  return b_[i] + s * (2.0 * c_[i] + 3.0 * s * d_[i]);
}

Vec3 ContinuousTrajectory::Acceleration(double t) const {
  const auto [i, s] = Locate(t);
  return 2.0 * c_[i] + 6.0 * s * d_[i];
}

double ContinuousTrajectory::IntegratedSquaredAcceleration() const {
  // x'' = 2c + 6ds, so the integral over [0, h] is
  // 4|c|^2 h + 12 c.d h^2 + 12 |d|^2 h^3.
  double total = 0.0;
  for (std::size_t i = 0; i < a_.size(); ++i) {
    const double h = knots_[i + 1] - knots_[i];
    total += 4.0 * c_[i].squaredNorm() * h + 12.0 * c_[i].dot(d_[i]) * h * h +
             12.0 * d_[i].squaredNorm() * h * h * h;
  }
  return total;
}

DiscreteTrajectory::DiscreteTrajectory(std::vector<State> states)
    : states_(std::move(states)) {
  if (states_.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "trajectory needs at least 2 states");
  }
  for (std::size_t i = 0; i < states_.size(); ++i) {
    const State& s = states_[i];
    if (!std::isfinite(s.t) || !s.x.allFinite() || !s.v.allFinite()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "non-finite state at index " + std::to_string(i));
    }
    if (i > 0 && !(s.t > states_[i - 1].t)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "timestamps must be strictly increasing (index " +
                      std::to_string(i) + ")");
    }
  }
}

DiscreteTrajectory DiscreteTrajectory::Translated(const Vec3& offset) const {
  std::vector<State> out = states_;
  for (State& s : out) s.x += offset;
  return DiscreteTrajectory(std::move(out));
}

DiscreteTrajectory Resample(const ContinuousTrajectory& traj, int count) {
  RequireCount(count);
  std::vector<State> states(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double t = UniformTime(traj.t_begin(), traj.t_end(), k, count);
    states[k] = State{t, traj.Position(t), traj.Velocity(t)};
  }
  return DiscreteTrajectory(std::move(states));
}

DiscreteTrajectory ResampleByTime(const DiscreteTrajectory& traj, int count) {
  RequireCount(count);
  std::vector<State> states(static_cast<std::size_t>(count));
  std::size_t j = 0;
  for (int k = 0; k < count; ++k) {
    const double t = UniformTime(traj.front().t, traj.back().t, k, count);
    while (j + 2 < traj.size() && traj[j + 1].t < t) ++j;
    const State& a = traj[j];
    const State& b = traj[j + 1];
    const double w = std::clamp((t - a.t) / (b.t - a.t), 0.0, 1.0);
    states[k] = Lerp(a, b, w);
    states[k].t = t;
  }
  return DiscreteTrajectory(std::move(states));
}

DiscreteTrajectory ResampleByArcLength(const DiscreteTrajectory& traj,
                                       int count) {
  RequireCount(count);
  std::vector<double> cumulative(traj.size(), 0.0);
  for (std::size_t i = 1; i < traj.size(); ++i) {
    cumulative[i] = cumulative[i - 1] + (traj[i].x - traj[i - 1].x).norm();
  }
  const double total = cumulative.back();
  if (!(total > 0.0)) return ResampleByTime(traj, count);

  std::vector<State> states(static_cast<std::size_t>(count));
  std::size_t j = 0;
  for (int k = 0; k < count; ++k) {
    if (k == 0) {
      states[k] = traj.front();
      continue;
    }
    if (k == count - 1) {
      states[k] = traj.back();
      continue;
    }
    const double s = total * static_cast<double>(k) / (count - 1);
    while (j + 2 < traj.size() && cumulative[j + 1] < s) ++j;
    const double span = cumulative[j + 1] - cumulative[j];
    const double w =
        span > 0.0 ? std::clamp((s - cumulative[j]) / span, 0.0, 1.0) : 1.0;
    states[k] = Lerp(traj[j], traj[j + 1], w);
  }
  return DiscreteTrajectory(std::move(states));
}

SegmentSet SegmentTrajectory(const DiscreteTrajectory& traj, int segments,
                             const Context& ctx) {
  const int n = static_cast<int>(traj.size());
  if (segments < 2 || segments >= n) {
    throw Error(
        ErrorCode::kInvalidSegmentation,
        "segment count must satisfy 2 <= M < N (M=" + std::to_string(segments) +
            ", N=" + std::to_string(n) + ")");
  }
  const std::size_t per = static_cast<std::size_t>(n / segments);
  SegmentSet out(static_cast<std::size_t>(segments));
  for (std::size_t r = 0; r < out.size(); ++r) {
    Segment& seg = out[r];
    seg.first = r * per;
    seg.last = r + 1 == out.size() ? traj.size() - 1 : (r + 1) * per - 1;
    Vec3 position_sum = Vec3::Zero();
    double speed_sum = 0.0;
    for (std::size_t k = seg.first; k <= seg.last; ++k) {
      position_sum += traj[k].x;
      speed_sum += traj[k].v.norm();
      if (k > 0) seg.arc_length += (traj[k].x - traj[k - 1].x).norm();
    }
    const double samples = static_cast<double>(seg.last - seg.first + 1);
    seg.mean_position = position_sum / samples;
    seg.mean_speed = speed_sum / samples;
    seg.obstacle_distance = (seg.mean_position - ctx.obstacle_center).norm();
    seg.end_waypoint = traj[seg.last].x;
    seg.end_time = traj[seg.last].t;
  }
  return out;
}

std::array<double, 3> PathTimeVector(const Vec3& start, const Vec3& mid,
                                     const Vec3& goal, double t_goal) {
  if (!(t_goal > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "t_g must be positive");
  }
  const double span = (goal - start).norm();
  if (!(span > 0.0)) {
    throw Error(ErrorCode::kDegenerateContext,
                "start and goal coincide; time vector undefined");
  }
  const double ratio =
      std::clamp((mid - start).norm() / span, kMinRatio, kMaxRatio);
  return {0.0, t_goal * ratio, t_goal};
}

double PathLength(const DiscreteTrajectory& traj) {
  double total = 0.0;
  for (std::size_t i = 1; i < traj.size(); ++i) {
    total += (traj[i].x - traj[i - 1].x).norm();
  }
  return total;
}

}  // namespace prefplan
