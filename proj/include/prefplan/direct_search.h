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

#ifndef PREFPLAN_DIRECT_SEARCH_H_
#define PREFPLAN_DIRECT_SEARCH_H_

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>

namespace prefplan {

using ObjectiveFn = std::function<double(const Eigen::VectorXd&)>;

struct DirectSearchResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

struct SimplexOptions {
  Eigen::VectorXd initial_step;  // per-coordinate simplex edge
  double tolerance = 1e-4;       // max vertex distance (inf-norm) at stop
  int max_evaluations = 500;
  std::uint64_t seed = 1;  // picks the simplex orientation
};

// Maximizes `f` over the box [lower, upper] with an adaptive Nelder-Mead
// simplex whose trial points are projected onto the box. After the simplex
// collapses it is rebuilt once around the best point to escape stalls on
// faces of the box.
DirectSearchResult MaximizeSimplex(const ObjectiveFn& f,
                                   const Eigen::VectorXd& x0,
                                   const Eigen::VectorXd& lower,
                                   const Eigen::VectorXd& upper,
                                   const SimplexOptions& options);

struct CompassOptions {
  double initial_step = 0.1;
  double tolerance = 1e-7;
  int max_evaluations = 20000;
};

// Maximizes `f` over the box with an optional cap on sum(x) by compass
// search. Polls +-e_i and, when a cap is given, the sum-preserving
// exchanges e_i - e_j. `x0` must be feasible.
DirectSearchResult MaximizeCompass(const ObjectiveFn& f,
                                   const Eigen::VectorXd& x0,
                                   const Eigen::VectorXd& lower,
                                   const Eigen::VectorXd& upper,
                                   std::optional<double> sum_cap,
                                   const CompassOptions& options);

// Euclidean projection onto {lower <= x <= upper, sum(x) <= cap}. Requires
// sum(lower) <= cap.
Eigen::VectorXd ProjectCappedBox(const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& lower,
                                 const Eigen::VectorXd& upper, double cap);

}  // namespace prefplan

#endif  // PREFPLAN_DIRECT_SEARCH_H_
