// Copyright 2026 The ldprr Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ldprr/simplex_solver.hpp"

#include <algorithm>
#include <cmath>

namespace ldprr {

namespace {

constexpr double kMinStep = 1e-20;
constexpr double kMaxStep = 1e20;
constexpr int kStallLimit = 20;

Vector Project(const Vector& v) { return project_simplex_euclidean(v).values(); }

}  // namespace

double simplex_kkt_residual(const Vector& x, const Vector& grad) {
  return (x - Project(x - grad)).cwiseAbs().maxCoeff();
}

SimplexSolverResult minimize_on_simplex(const SimplexProblem& problem, const Vector& start,
                                        const SimplexSolverOptions& options) {
  SimplexSolverResult result;
  Vector x = Project(start);
  double fx = problem.objective(x);
  Vector g = problem.gradient(x);
  double step = 1.0;
  int stalled = 0;

  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    if (simplex_kkt_residual(x, g) < options.target) break;

    Vector x_next;
    double f_next = 0.0;
    if (problem.exact_step) {
      const Vector d = Project(x - step * g) - x;
      const double t = std::clamp(problem.exact_step(x, d), 0.0, 1.0);
      x_next = x + t * d;
      f_next = problem.objective(x_next);
    } else {
      double s = step;
      while (true) {
        x_next = Project(x - s * g);
        f_next = problem.objective(x_next);
        const Vector dx = x_next - x;
        // Sufficient decrease for the projection arc.
        if (f_next <= fx + g.dot(dx) + dx.squaredNorm() / (2.0 * s) || s < kMinStep) break;
        // Near the optimum the value test drowns in cancellation. For a convex
        // objective a nonpositive slope at the new point already certifies
        // f(x_next) <= f(x).
        if (problem.gradient(x_next).dot(dx) <= 0.0) break;
        s *= 0.5;
      }
    }

    const Vector g_next = problem.gradient(x_next);
    const Vector sx = x_next - x;
    const Vector sg = g_next - g;
    const double curvature = sx.dot(sg);
    step = curvature > 0.0 ? std::clamp(sx.squaredNorm() / curvature, kMinStep, kMaxStep)
                           : std::min(step * 2.0, kMaxStep);

    // A step counts as stalled when it no longer moves the iterate, or when
    // the objective is flat and the KKT tolerance is already met.
    const double decrease = fx - f_next;
    const bool flat = decrease <= options.relative_decrease * std::max(1.0, std::abs(fx));
    const bool frozen = sx.cwiseAbs().maxCoeff() <= 1e-16;
    stalled = (frozen || (flat && simplex_kkt_residual(x_next, g_next) < options.kkt_tolerance))
                  ? stalled + 1
                  : 0;
    x = x_next;
    fx = f_next;
    g = g_next;
    if (stalled >= kStallLimit) break;
  }

  result.x = x;
  result.objective = fx;
  result.kkt_residual = simplex_kkt_residual(x, g);
  result.iterations = iter;
  result.converged = result.kkt_residual < options.kkt_tolerance;
  return result;
}

}  // namespace ldprr
