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

#include "prefplan/direct_search.h"

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

namespace prefplan {
namespace {

struct Vertex {
  Eigen::VectorXd x;
  double value;  // objective, maximized
};

Eigen::VectorXd Clamp(const Eigen::VectorXd& x, const Eigen::VectorXd& lower,
                      const Eigen::VectorXd& upper) {
  return x.cwiseMax(lower).cwiseMin(upper);
}

double SimplexSize(const std::vector<Vertex>& simplex) {
  double size = 0.0;
  for (std::size_t i = 1; i < simplex.size(); ++i) {
    size =
        std::max(size, (simplex[i].x - simplex[0].x).lpNorm<Eigen::Infinity>());
  }
  return size;
}

// One Nelder-Mead run. Returns the best vertex; `converged` reports whether
// the simplex shrank below tolerance within budget.
Vertex RunSimplex(const ObjectiveFn& f, const Vertex& start,
                  const Eigen::VectorXd& step, const Eigen::VectorXd& lower,
                  const Eigen::VectorXd& upper, double tolerance, int budget,
                  std::mt19937_64& rng, int* evaluations, bool* converged) {
  const int n = static_cast<int>(start.x.size());
  // Gao & Han coefficients.
  const double reflect = 1.0;
  const double expand = 1.0 + 2.0 / n;
  const double contract = 0.75 - 1.0 / (2.0 * n);
  const double shrink = 1.0 - 1.0 / n;

  int used = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++used;
    ++*evaluations;
    return f(x);
  };

  *converged = false;
  if (budget < n) return start;

  std::vector<Vertex> simplex;
  simplex.push_back(start);
  std::bernoulli_distribution coin(0.5);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd x = start.x;
    double delta = coin(rng) ? step[i] : -step[i];
    if (x[i] + delta > upper[i] || x[i] + delta < lower[i]) delta = -delta;
    x[i] = std::clamp(x[i] + delta, lower[i], upper[i]);
    simplex.push_back({x, eval(x)});
  }

  auto by_value = [](const Vertex& a, const Vertex& b) {
    return a.value > b.value;
  };
  while (true) {
    std::stable_sort(simplex.begin(), simplex.end(), by_value);
    if (SimplexSize(simplex) < tolerance) {
      *converged = true;
      break;
    }
    // Worst case per iteration: reflection, contraction and n shrinks.
    if (used + n + 2 > budget) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) centroid += simplex[i].x;
    centroid /= n;
    Vertex& worst = simplex[n];

    const Eigen::VectorXd xr =
        Clamp(centroid + reflect * (centroid - worst.x), lower, upper);
    const double fr = eval(xr);
    if (fr > simplex[0].value) {
      const Eigen::VectorXd xe =
          Clamp(centroid + expand * (xr - centroid), lower, upper);
      const double fe = eval(xe);
      worst = fe > fr ? Vertex{xe, fe} : Vertex{xr, fr};
      continue;
    }
    if (fr > simplex[n - 1].value) {
      worst = {xr, fr};
      continue;
    }
    const bool outside = fr > worst.value;
    const Eigen::VectorXd xc =
        outside
            ? Clamp(centroid + contract * (xr - centroid), lower, upper)
            : Clamp(centroid + contract * (worst.x - centroid), lower, upper);
    const double fc = eval(xc);
    if (fc > (outside ? fr : worst.value)) {
      worst = {xc, fc};
      continue;
    }
    for (int i = 1; i <= n; ++i) {
      simplex[i].x = simplex[0].x + shrink * (simplex[i].x - simplex[0].x);
      simplex[i].value = eval(simplex[i].x);
    }
  }
  std::stable_sort(simplex.begin(), simplex.end(), by_value);
  return simplex[0];
}

}  // namespace

DirectSearchResult MaximizeSimplex(const ObjectiveFn& f,
                                   const Eigen::VectorXd& x0,
                                   const Eigen::VectorXd& lower,
                                   const Eigen::VectorXd& upper,
                                   const SimplexOptions& options) {
  std::mt19937_64 rng(options.seed);
  DirectSearchResult result;
  const Eigen::VectorXd start = Clamp(x0, lower, upper);
  Vertex best{start, f(start)};
  result.evaluations = 1;

  bool converged = false;
  best = RunSimplex(f, best, options.initial_step, lower, upper,
                    options.tolerance, options.max_evaluations - 1, rng,
                    &result.evaluations, &converged);
  if (converged && result.evaluations < options.max_evaluations) {
    // Restart around the optimum with a smaller simplex.
    const Eigen::VectorXd step = (options.initial_step * 0.1)
                                     .cwiseMax(Eigen::VectorXd::Constant(
                                         x0.size(), 10.0 * options.tolerance));
    bool polished = false;
    const Vertex again =
        RunSimplex(f, best, step, lower, upper, options.tolerance,
                   options.max_evaluations - result.evaluations, rng,
                   &result.evaluations, &polished);
    if (again.value > best.value) best = again;
    converged = polished;
  }
  result.x = best.x;
  result.value = best.value;
  result.converged = converged;
  return result;
}

DirectSearchResult MaximizeCompass(const ObjectiveFn& f,
                                   const Eigen::VectorXd& x0,
                                   const Eigen::VectorXd& lower,
                                   const Eigen::VectorXd& upper,
                                   std::optional<double> sum_cap,
                                   const CompassOptions& options) {
  const Eigen::Index n = x0.size();
  std::vector<Eigen::VectorXd> directions;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (double sign : {1.0, -1.0}) {
      Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
      d[i] = sign;
      directions.push_back(d);
    }
  }
  if (sum_cap) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i == j) continue;
        Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
        d[i] = 1.0;
        d[j] = -1.0;
        directions.push_back(d);
      }
    }
  }

  DirectSearchResult result;
  result.x = x0;
  result.value = f(x0);
  result.evaluations = 1;
  double step = options.initial_step;
  while (step >= options.tolerance) {
    if (result.evaluations >= options.max_evaluations) return result;
    bool improved = false;
    for (const Eigen::VectorXd& d : directions) {
      if (result.evaluations >= options.max_evaluations) break;
      Eigen::VectorXd y = Clamp(result.x + step * d, lower, upper);
      if ((y - result.x).lpNorm<Eigen::Infinity>() == 0.0) continue;
      if (sum_cap && std::accumulate(y.data(), y.data() + n, 0.0) > *sum_cap) {
        continue;
      }
      const double value = f(y);
      ++result.evaluations;
      if (value > result.value) {
        result.x = y;
        result.value = value;
        improved = true;
      }
    }
    if (!improved) step *= 0.5;
  }
  result.converged = true;
  return result;
}

Eigen::VectorXd ProjectCappedBox(const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& lower,
                                 const Eigen::VectorXd& upper, double cap) {
  Eigen::VectorXd clamped = Clamp(x, lower, upper);
  auto total_of = [](const Eigen::VectorXd& v) {
    return std::accumulate(v.data(), v.data() + v.size(), 0.0);
  };
  if (total_of(clamped) <= cap) return clamped;
  // Shift every coordinate down by a common amount and clamp; bisect on it.
  double lo = 0.0;
  double hi = (x - lower).maxCoeff();
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double total =
        total_of(Clamp((x.array() - mid).matrix(), lower, upper));
    if (total > cap) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return Clamp((x.array() - hi).matrix(), lower, upper);
}

}  // namespace prefplan
