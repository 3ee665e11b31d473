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

#include "prefplan/learning.h"

#include <cmath>
#include <string>
#include <utility>

#include "prefplan/error.h"

namespace prefplan {
namespace {

Eigen::VectorXd BinDelta(const Eigen::VectorXd& human, int human_count,
                         const Eigen::VectorXd& robot, int robot_count) {
  if (human_count > 0 && robot_count > 0) return human - robot;
  if (human_count == 0 && robot_count == 0) {
    return Eigen::VectorXd::Zero(human.size());
  }
  // An empty bin stores the per-segment mean of the other bin.
  if (human_count == 0) return human * robot_count - robot;
  return human - robot * human_count;
}

void ClampWeights(Eigen::Ref<Eigen::VectorXd> theta,
                  const std::optional<double>& theta_max) {
  if (!theta_max) return;
  theta = theta.cwiseMax(-*theta_max).cwiseMin(*theta_max);
}

}  // namespace

std::string_view FeedbackModeName(FeedbackMode mode) {
  switch (mode) {
    case FeedbackMode::kPathOnly:
      return "path";
    case FeedbackMode::kVelocityOnly:
      return "velocity";
    case FeedbackMode::kBoth:
      return "both";
  }
  return "both";
}

std::optional<FeedbackMode> ParseFeedbackMode(std::string_view name) {
  if (name == "path") return FeedbackMode::kPathOnly;
  if (name == "velocity") return FeedbackMode::kVelocityOnly;
  if (name == "both") return FeedbackMode::kBoth;
  return std::nullopt;
}

WeightState WeightState::Zero(int rbf_count, double alpha) {
  WeightState w;
  w.theta_HV = Eigen::VectorXd::Zero(2 * rbf_count);
  w.alpha = alpha;
  return w;
}

void WeightState::Validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must lie in (0, 1]");
  }
  if (theta_HV.size() < 4 || theta_HV.size() % 2 != 0) {
    throw Error(ErrorCode::kDimensionMismatch,
                "theta_HV must hold two bins of at least 2 weights");
  }
  if (!theta_HP.allFinite() || !theta_HV.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "weights must be finite");
  }
  if (iteration < 0) {
    throw Error(ErrorCode::kInvalidArgument, "iteration must be >= 0");
  }
}

bool WeightState::operator==(const WeightState& other) const {
  return theta_HP == other.theta_HP &&
         theta_HV.size() == other.theta_HV.size() &&
         theta_HV == other.theta_HV && alpha == other.alpha &&
         iteration == other.iteration;
}

Eigen::VectorXd UpdateWeights(const Eigen::VectorXd& theta,
                              const Eigen::VectorXd& phi_human,
                              const Eigen::VectorXd& phi_robot, double alpha) {
  if (theta.size() != phi_human.size() || theta.size() != phi_robot.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "weight update needs equal dimensions (theta " +
                    std::to_string(theta.size()) + ", human " +
                    std::to_string(phi_human.size()) + ", robot " +
                    std::to_string(phi_robot.size()) + ")");
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must lie in (0, 1]");
  }
  return theta + alpha * (phi_human - phi_robot);
}

Feedback ComputeFeedback(const FeatureCount& human, const FeatureCount& robot) {
  if (human.phi_V1.size() != robot.phi_V1.size() ||
      human.phi_V2.size() != robot.phi_V2.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "velocity feature dimensions differ");
  }
  if (human.segments() != robot.segments()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "segment counts differ (M=" + std::to_string(human.segments()) +
                    " vs M=" + std::to_string(robot.segments()) + ")");
  }
  Feedback out;
  out.delta_path = human.phi_P - robot.phi_P;
  out.delta_velocity.resize(human.phi_V1.size() + human.phi_V2.size());
  out.delta_velocity << BinDelta(human.phi_V1, human.count_V1, robot.phi_V1,
                                 robot.count_V1),
      BinDelta(human.phi_V2, human.count_V2, robot.phi_V2, robot.count_V2);
  return out;
}

Feedback ComputeFeedback(const DiscreteTrajectory& demo,
                         const DiscreteTrajectory& plan, const Context& ctx,
                         const ModelParams& params) {
  if (demo.size() != plan.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "demonstration and plan sample counts differ (" +
                    std::to_string(demo.size()) + " vs " +
                    std::to_string(plan.size()) + ")");
  }
  return ComputeFeedback(ComputeFeatureCount(demo, ctx, params),
                         ComputeFeatureCount(plan, ctx, params));
}

Feedback NormalizeFeedback(const Feedback& raw, int N, int M) {
  Feedback out;
  out.delta_path = raw.delta_path / static_cast<double>(N);
  out.delta_velocity = raw.delta_velocity / static_cast<double>(M);
  return out;
}

WeightState ApplyFeedback(const WeightState& weights,
                          const Feedback& normalized, FeedbackMode mode,
                          const LearningParams& learning) {
  WeightState next = weights;
  if (mode != FeedbackMode::kVelocityOnly) {
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(3);
    Eigen::VectorXd theta = UpdateWeights(
        weights.theta_HP, normalized.delta_path, zero, weights.alpha);
    ClampWeights(theta, learning.theta_max);
    next.theta_HP = theta;
  }
  if (mode != FeedbackMode::kPathOnly) {
    const Eigen::VectorXd zero =
        Eigen::VectorXd::Zero(normalized.delta_velocity.size());
    next.theta_HV = UpdateWeights(weights.theta_HV, normalized.delta_velocity,
                                  zero, weights.alpha);
    ClampWeights(next.theta_HV, learning.theta_max);
  }
  next.iteration = weights.iteration + 1;
  return next;
}

Session Session::Start(const Context& ctx, const WeightState& initial) {
  initial.Validate();
  Session s;
  s.context = ctx;
  s.weights.push_back(initial);
  s.weights.back().iteration = 0;
  return s;
}

const DiscreteTrajectory* Session::current_plan() const {
  if (plans.size() == weights.size()) return &plans.back();
  return nullptr;
}

void Session::Validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidArgument, "inconsistent session: " + what);
  };
  if (weights.empty()) fail("no weight history");
  if (demonstrations.size() + 1 != weights.size()) {
    fail("need one demonstration per completed iteration");
  }
  if (modes.size() != demonstrations.size())
    fail("need one mode per demonstration");
  if (plans.size() + 1 != weights.size() && plans.size() != weights.size()) {
    fail("need one plan per iteration");
  }
  for (std::size_t i = 0; i < weights.size(); ++i) {
    weights[i].Validate();
    if (weights[i].iteration != static_cast<int>(i)) {
      fail("iteration indices must count up from 0");
    }
    if (weights[i].theta_HV.size() != weights[0].theta_HV.size()) {
      fail("weight dimensions changed");
    }
  }
}

Session WithPlan(Session session, DiscreteTrajectory plan) {
  if (session.plans.size() == session.weights.size()) {
    session.plans.back() = std::move(plan);
  } else {
    session.plans.push_back(std::move(plan));
  }
  return session;
}

Session StepSession(const Session& session, const DiscreteTrajectory& demo,
                    FeedbackMode mode, const ModelParams& params) {
  const DiscreteTrajectory* plan = session.current_plan();
  if (plan == nullptr) {
    throw Error(ErrorCode::kNoPlan,
                "no plan for iteration " + std::to_string(session.iteration()) +
                    "; plan before submitting a demonstration");
  }
  const int n = params.sampling.N;
  const Feedback raw =
      ComputeFeedback(ResampleByArcLength(demo, n),
                      ResampleByArcLength(*plan, n), session.context, params);
  const Feedback normalized =
      NormalizeFeedback(raw, params.sampling.N, params.sampling.M);

  Session next = session;
  next.weights.push_back(
      ApplyFeedback(session.current(), normalized, mode, params.learning));
  next.demonstrations.push_back(demo);
  next.modes.push_back(mode);
  return next;
}

}  // namespace prefplan
