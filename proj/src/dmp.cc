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

#include "prefplan/dmp.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "prefplan/error.h"

namespace prefplan {
namespace {

constexpr int kMinDemoSamples = 20;
constexpr int kMinFitPoints = 400;
constexpr double kDivergenceRadius = 100.0;  // m from the goal

struct PhaseBasis {
  const Eigen::VectorXd& centers;
  const Eigen::VectorXd& widths;

  // Normalized activations times the phase.
  Eigen::VectorXd operator()(double s) const {
    Eigen::VectorXd psi =
        (-widths.array() * (s - centers.array()).square()).exp().matrix();
    const double total = psi.sum();
    if (total > 0.0) psi *= s / total;
    return psi;
  }
};

struct DmpState {
  Vec3 x;
  Vec3 v;  // scaled velocity, tau * dx/dt
  double s;
};

Vec3 Coupling(const Vec3& x, const Vec3& v, const Context& ctx,
              const DmpConfig& config) {
  if (!config.avoid_obstacle) return Vec3::Zero();
  Vec3 coupling = Vec3::Zero();
  const Vec3 to_obstacle = ctx.obstacle_center - x;
  const double d = to_obstacle.norm();
  const double clearance = d - ctx.obstacle_radius;
  const double speed = v.norm();
  if (d > 0.0 && speed > 1e-12) {
    const double cos_phi =
        std::clamp(to_obstacle.dot(v) / (d * speed), -1.0, 1.0);
    const double phi = std::acos(cos_phi);
    Vec3 axis = to_obstacle.cross(v);
    if (axis.norm() < 1e-12 * d * speed) {
      // Heading straight at the center: turn about any perpendicular axis.
      axis = to_obstacle.cross(Vec3::UnitZ());
      if (axis.norm() < 1e-12 * d) axis = to_obstacle.cross(Vec3::UnitX());
    }
    const Vec3 rotated = axis.normalized().cross(v);
    coupling += config.steer_gain * rotated * phi *
                std::exp(-config.steer_beta * phi) *
                std::exp(-config.steer_decay * std::max(0.0, clearance));
  }
  if (d > 0.0 && clearance < config.barrier_margin) {
    const double delta = std::max(clearance, 1e-6);
    coupling += config.barrier_gain *
                (1.0 / delta - 1.0 / config.barrier_margin) / (delta * delta) *
                (-to_obstacle / d);
  }
  return coupling;
}

struct Derivative {
  Vec3 dx;
  Vec3 dv;
  double ds;
};

}  // namespace

void DmpConfig::Validate() const {
  auto require = [](bool ok, const char* message) {
    if (!ok) throw Error(ErrorCode::kInvalidArgument, message);
  };
  require(basis >= 2, "DMP needs at least two basis functions");
  require(stiffness > 0.0 && damping > 0.0, "DMP gains must be positive");
  require(phase_decay > 0.0, "phase decay must be positive");
  require(steps_per_tau >= 10, "steps_per_tau must be at least 10");
  require(steer_gain >= 0.0 && steer_beta >= 0.0 && steer_decay >= 0.0 &&
              barrier_gain >= 0.0 && barrier_margin > 0.0,
          "coupling gains must be non-negative");
  require(goal_tolerance > 0.0 && speed_tolerance > 0.0,
          "convergence tolerances must be positive");
  require(max_duration_factor >= 1.0, "max_duration_factor must be >= 1");
  require(ridge >= 0.0, "ridge must be non-negative");
}

DmpModel FitDmp(const DiscreteTrajectory& demo, const DmpConfig& config) {
  config.Validate();
  if (static_cast<int>(demo.size()) < kMinDemoSamples) {
    throw Error(ErrorCode::kInvalidArgument,
                "DMP fit needs at least 20 demonstration samples");
  }
  const Vec3 start = demo.front().x;
  const Vec3 goal = demo.back().x;
  if ((goal - start).norm() < 1e-9 || PathLength(demo) < 1e-9) {
    throw Error(ErrorCode::kDegenerateContext, "demonstration has zero length");
  }

  std::vector<Waypoint> knots;
  knots.reserve(demo.size());
  for (const State& s : demo) knots.push_back({s.x, s.t});
  const ContinuousTrajectory spline = Interpolate(knots);

  DmpModel model;
  model.config = config;
  model.start = start;
  model.goal = goal;
  model.tau = demo.duration();
  model.samples = static_cast<int>(demo.size());
  model.initial_velocity = demo.front().v;

  const int b = config.basis;
  model.centers.resize(b);
  model.widths.resize(b);
  for (int i = 0; i < b; ++i) {
    model.centers[i] = std::exp(-config.phase_decay * i / (b - 1));
  }
  for (int i = 0; i < b; ++i) {
    const double gap = i + 1 < b ? model.centers[i] - model.centers[i + 1]
                                 : model.centers[i - 1] - model.centers[i];
    model.widths[i] = 1.0 / std::pow(0.65 * gap, 2);
  }
  const PhaseBasis basis{model.centers, model.widths};

  const double tau = model.tau;
  const double k = config.stiffness;
  const double d = config.damping;
  const int points = std::max(kMinFitPoints, 4 * model.samples);
  Eigen::MatrixXd design(points, b);
  Eigen::MatrixXd target(points, 3);
  for (int p = 0; p < points; ++p) {
    const double t = spline.t_begin() + tau * p / (points - 1);
    const double s = std::exp(-config.phase_decay * p / (points - 1));
    const Vec3 x = spline.Position(t);
    const Vec3 xd = spline.Velocity(t);
    const Vec3 xdd = spline.Acceleration(t);
    design.row(p) = basis(s).transpose();
    target.row(p) = ((tau * tau * xdd - k * (goal - x) + d * tau * xd) / k +
                     (goal - start) * s)
                        .transpose();
  }
  Eigen::MatrixXd normal = design.transpose() * design;
  normal.diagonal().array() += config.ridge;
  model.weights = normal.ldlt().solve(design.transpose() * target);
  return model;
}

DiscreteTrajectory RolloutDmp(const DmpModel& model, const Context& ctx) {
  const DmpConfig& config = model.config;
  config.Validate();
  if (model.samples < 2 || !(model.tau > 0.0) ||
      model.weights.rows() != model.centers.size() ||
      model.weights.cols() != 3 ||
      model.widths.size() != model.centers.size()) {
    throw Error(ErrorCode::kInvalidArgument, "malformed DMP model");
  }
  const PhaseBasis basis{model.centers, model.widths};
  const double tau = model.tau;
  const double k = config.stiffness;
  const double d = config.damping;
  const Vec3 goal = ctx.goal;
  const Vec3 x0 = ctx.start;

  auto derivative = [&](const DmpState& y) {
    const Vec3 forcing = model.weights.transpose() * basis(y.s);
    const Vec3 accel = k * (goal - y.x) - d * y.v - k * (goal - x0) * y.s +
                       k * forcing + Coupling(y.x, y.v, ctx, config);
    return Derivative{y.v / tau, accel / tau, -config.phase_decay * y.s / tau};
  };
  auto advance = [](const DmpState& y, const Derivative& dy, double h) {
    return DmpState{y.x + h * dy.dx, y.v + h * dy.dv, y.s + h * dy.ds};
  };

  const double spacing = tau / (model.samples - 1);
  const int substeps = std::max(
      1, static_cast<int>(std::ceil(static_cast<double>(config.steps_per_tau) /
                                    (model.samples - 1))));
  const double h = spacing / substeps;
  const int max_samples =
      static_cast<int>(
          std::ceil(config.max_duration_factor * (model.samples - 1))) +
      1;

  DmpState y{x0, tau * model.initial_velocity, 1.0};
  std::vector<State> states;
  states.push_back({0.0, y.x, y.v / tau});
  for (int sample = 1; sample < max_samples; ++sample) {
    for (int step = 0; step < substeps; ++step) {
      const Derivative k1 = derivative(y);
      const Derivative k2 = derivative(advance(y, k1, h / 2));
      const Derivative k3 = derivative(advance(y, k2, h / 2));
      const Derivative k4 = derivative(advance(y, k3, h));
      y.x += h / 6 * (k1.dx + 2 * k2.dx + 2 * k3.dx + k4.dx);
      y.v += h / 6 * (k1.dv + 2 * k2.dv + 2 * k3.dv + k4.dv);
      y.s += h / 6 * (k1.ds + 2 * k2.ds + 2 * k3.ds + k4.ds);
    }
    if (!y.x.allFinite() || !y.v.allFinite() ||
        (y.x - goal).norm() > kDivergenceRadius) {
      std::ostringstream dump;
      dump << "DMP rollout diverged at t=" << sample * spacing << " s: x=["
           << y.x.transpose() << "] v=[" << y.v.transpose() / tau
           << "] s=" << y.s;
      throw Error(ErrorCode::kDivergence, dump.str());
    }
    const double t = sample * spacing;
    states.push_back({t, y.x, y.v / tau});
    if (sample >= model.samples - 1 &&
        (y.x - goal).norm() < config.goal_tolerance &&
        (y.v / tau).norm() < config.speed_tolerance) {
      break;
    }
  }
  return DiscreteTrajectory(std::move(states));
}

Reproduction CompareToReference(const DiscreteTrajectory& reference,
                                const DiscreteTrajectory& traj) {
  const std::size_t n = reference.size();
  std::vector<double> ref_speed(n), speed(n);
  double squared = 0.0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = std::clamp(reference[i].t, traj.front().t, traj.back().t);
    while (j + 2 < traj.size() && traj[j + 1].t < t) ++j;
    const State& a = traj[j];
    const State& b = traj[j + 1];
    const double w = std::clamp((t - a.t) / (b.t - a.t), 0.0, 1.0);
    const Vec3 x = (1 - w) * a.x + w * b.x;
    const Vec3 v = (1 - w) * a.v + w * b.v;
    squared += (x - reference[i].x).squaredNorm();
    ref_speed[i] = reference[i].v.norm();
    speed[i] = v.norm();
  }
  Reproduction out;
  out.rmse = std::sqrt(squared / n);
  const Eigen::Map<const Eigen::ArrayXd> a(ref_speed.data(), n);
  const Eigen::Map<const Eigen::ArrayXd> b(speed.data(), n);
  const Eigen::ArrayXd da = a - a.mean();
  const Eigen::ArrayXd db = b - b.mean();
  const double denominator = std::sqrt(da.square().sum() * db.square().sum());
  out.speed_correlation =
      denominator > 0.0 ? (da * db).sum() / denominator : 0.0;
  return out;
}

}  // namespace prefplan
