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

#ifndef LDPRR_BOUNDS_HPP_
#define LDPRR_BOUNDS_HPP_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "ldprr/analysis.hpp"
#include "ldprr/core.hpp"

namespace ldprr {

// phi of the step mechanism:
// K / (e^eps - 1)^2 [(e^eps + K - 1)(e^eps + K - 2) + 1 - e^eps].
double phi_star(int k, double eps);

// Entries of Phi(step mechanism): diagonal and off-diagonal values.
struct PhiStarEntries {
  double diagonal = 0.0;
  double off_diagonal = 0.0;
};
PhiStarEntries phi_star_entries(int k, double eps);

// Achievable alpha for a uniform source (all three metrics agree):
// (phi_star - 1) / (K - 1).
double alpha_upper_uniform(int k, double eps);

// Lower bound on min phi(W) over eps-private W:
// K / (1 - e^{-4 eps}) (e^eps + K - 1)^2 / (e^{2 eps} + K - 1).
double phi_lower_bound(int k, double eps);

// Lower bound on min_W alpha(p, W) over eps-private W for a known source.
// The TV bound uses k0 = argmin |p_k - 1/2|, lowest index on ties.
double feasibility_lower(Metric metric, const Distribution& p, double eps);

// Lower bound on min_W max_p alpha(p, W) where p ranges over sources with
// every entry >= p0. Requires 0 < p0 < 1/K (throws InvalidP0).
double minmax_lower(Metric metric, int k, double eps, double p0);

// Achievable (upper) values obtained with the step mechanism.
double feasibility_upper(Metric metric, const Distribution& p, double eps);
double minmax_upper(Metric metric, int k, double eps, double p0);

// argmax ||x||^2 over x >= 0, sum x = 1, x_k / x_k' <= e^eps:
// x* = (e^eps, 1, ..., 1) / (e^eps + K - 1).
struct SumSquaresProfile {
  Vector x;
  double value = 0.0;
};
SumSquaresProfile max_sum_squares_profile(int k, double eps);

enum class Regime { kFeasibility, kMinmax };
std::string_view RegimeName(Regime regime);

struct TradeoffPoint {
  double epsilon = 0.0;
  double alpha_lower = 1.0;
  double alpha_upper = 1.0;
  Metric metric = Metric::kFDiv;
  Regime regime = Regime::kFeasibility;
  int k = 0;
  double p0 = 0.0;  // minmax regime only
};

// alpha_lower is max(1, bound) since every alpha is at least one.
std::vector<TradeoffPoint> feasibility_curve(Metric metric, const Distribution& p,
                                             std::span<const double> eps_grid);
std::vector<TradeoffPoint> minmax_curve(Metric metric, int k, double p0,
                                        std::span<const double> eps_grid);

// CSV: a "# seed=<seed> version=<semver>" line, then the header
// epsilon,alpha_lower,alpha_upper,metric,regime,k,p0 and one row per point.
void write_tradeoff_csv(std::ostream& out, std::span<const TradeoffPoint> points,
                        std::uint64_t seed = 0);

}  // namespace ldprr

#endif  // LDPRR_BOUNDS_HPP_
