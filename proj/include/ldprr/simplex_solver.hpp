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

#ifndef LDPRR_SIMPLEX_SOLVER_HPP_
#define LDPRR_SIMPLEX_SOLVER_HPP_

#include <functional>
#include <optional>

#include "ldprr/core.hpp"

namespace ldprr {

struct SimplexSolverOptions {
  // Iterate until the KKT residual drops below `target`; the run counts as
  // converged when it ends below `kkt_tolerance`.
  double target = 1e-13;
  double kkt_tolerance = 1e-8;
  int max_iterations = 100000;
  // Secondary stop on relative objective decrease, taken once the KKT
  // tolerance is met.
  double relative_decrease = 1e-14;
};

struct SimplexSolverResult {
  Vector x;
  double objective = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct SimplexProblem {
  std::function<double(const Vector&)> objective;
  std::function<Vector(const Vector&)> gradient;
  // Optional exact minimizer of t -> objective(x + t d) over t >= 0.
  std::function<double(const Vector& x, const Vector& d)> exact_step;
};

// sup-norm of x - Proj(x - grad), zero exactly at KKT points of a convex
// objective over the simplex.
double simplex_kkt_residual(const Vector& x, const Vector& grad);

// Projected gradient over the probability simplex with Barzilai-Borwein
// trial steps and Armijo backtracking along the projection arc (or the exact
// step along the projected direction when the problem supplies one). The
// objective must be convex: a step is also accepted when the slope at the new
// point along the step is nonpositive.
SimplexSolverResult minimize_on_simplex(const SimplexProblem& problem, const Vector& start,
                                        const SimplexSolverOptions& options = {});

}  // namespace ldprr

#endif  // LDPRR_SIMPLEX_SOLVER_HPP_
