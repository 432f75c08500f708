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

#include "ldprr/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "ldprr/mechanisms.hpp"
#include "ldprr/version.hpp"

namespace ldprr {

namespace {

void RequireArgs(int k, double eps, const char* where) {
  if (k < 2) throw Error(ErrorCode::kInvalidArgument, std::string(where) + ": K must be >= 2");
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw Error(ErrorCode::kInvalidArgument, std::string(where) + ": eps must be finite and > 0");
  }
}

void RequireP0(int k, double p0) {
  if (!(p0 > 0.0) || !(p0 < 1.0 / k)) {
    throw Error(ErrorCode::kInvalidP0, "p0 must satisfy 0 < p0 < 1/K");
  }
}

// p0 (K - 1)(2 - K p0) = 1 - max ||p||^2 over the p0-floored sources.
double SquaredNormSlack(int k, double p0) { return p0 * (k - 1.0) * (2.0 - k * p0); }

double Positive(double x) { return std::max(x, 0.0); }

}  // namespace

double phi_star(int k, double eps) {
  RequireArgs(k, eps, "phi_star");
  const double e = std::exp(eps);
  const double em1 = std::expm1(eps);
  return k / (em1 * em1) * ((e + k - 1.0) * (e + k - 2.0) + 1.0 - e);
}

PhiStarEntries phi_star_entries(int k, double eps) {
  RequireArgs(k, eps, "phi_star_entries");
  const double e = std::exp(eps);
  const double em1 = std::expm1(eps);
  return {(e * (e + k - 2.0) + 1.0 - e) / (em1 * em1), (e + k - 2.0) / (em1 * em1)};
}

double alpha_upper_uniform(int k, double eps) { return (phi_star(k, eps) - 1.0) / (k - 1.0); }

double phi_lower_bound(int k, double eps) {
  RequireArgs(k, eps, "phi_lower_bound");
  const double e = std::exp(eps);
  return k / (-std::expm1(-4.0 * eps)) * (e + k - 1.0) * (e + k - 1.0) / (e * e + k - 1.0);
}

double feasibility_lower(Metric metric, const Distribution& p, double eps) {
  const int k = p.size();
  RequireArgs(k, eps, "feasibility_lower");
  if (!p.IsFullySupported()) {
    throw Error(ErrorCode::kSupportMismatch, "feasibility_lower: source must be fully supported");
  }
  const double phi = phi_lower_bound(k, eps);
  const double p_min = p.values().minCoeff();
  const double p_max = p.values().maxCoeff();
  switch (metric) {
    case Metric::kFDiv:
      return (std::max<double>(k, p_min / p_max * phi) - 1.0) / (k - 1.0);
    case Metric::kMse: {
      const double norm2 = p.values().squaredNorm();
      return (std::max(1.0, p_min * phi) - norm2) / (1.0 - norm2);
    }
    case Metric::kTv: {
      int k0 = 0;
      for (int i = 1; i < k; ++i) {
        if (std::abs(p[i] - 0.5) < std::abs(p[k0] - 0.5)) k0 = i;
      }
      double numerator = std::sqrt(p[k0] * (1.0 - p[k0]) + Positive(phi * p_min - 1.0));
      double denominator = 0.0;
      for (int i = 0; i < k; ++i) {
        const double s = std::sqrt(p[i] * (1.0 - p[i]));
        denominator += s;
        if (i != k0) numerator += s;
      }
      const double ratio = numerator / denominator;
      return ratio * ratio;
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown metric");
}

double minmax_lower(Metric metric, int k, double eps, double p0) {
  RequireArgs(k, eps, "minmax_lower");
  RequireP0(k, p0);
  const double phi = phi_lower_bound(k, eps);
  const double slack = SquaredNormSlack(k, p0);
  switch (metric) {
    case Metric::kFDiv: {
      const double weight = p0 / (1.0 - (k - 1.0) * p0);
      return (std::max<double>(k, weight * phi) - 1.0) / (k - 1.0);
    }
    case Metric::kMse:
      return (phi / k - 1.0 + slack) / slack;
    case Metric::kTv:
      return Positive(p0 * phi - 1.0 + slack) / (k - 1.0);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown metric");
}

double feasibility_upper(Metric metric, const Distribution& p, double eps) {
  return alpha(metric, p, step_mechanism(p.size(), eps));
}

double minmax_upper(Metric metric, int k, double eps, double p0) {
  RequireArgs(k, eps, "minmax_upper");
  RequireP0(k, p0);
  const double phi = phi_star(k, eps);
  const double slack = SquaredNormSlack(k, p0);
  const double big = 1.0 - (k - 1.0) * p0;
  switch (metric) {
    case Metric::kFDiv: {
      // The worst source has K - 1 entries at p0; the step mechanism is
      // symmetric, so any placement of the large entry gives the same value.
      Vector worst = Vector::Constant(k, p0);
      worst[0] = big;
      return alpha_fdiv(Distribution::FromValues(worst), step_mechanism(k, eps));
    }
    case Metric::kMse:
      // Row sums of Phi(step) are all phi/K; the worst source maximizes ||p||^2.
      return (phi / k - 1.0 + slack) / slack;
    case Metric::kTv: {
      // Cauchy-Schwarz on the numerator, exact minimum of the concave
      // denominator at a vertex of the source set.
      const double denominator =
          (k - 1.0) * std::sqrt(p0 * (1.0 - p0)) + std::sqrt(big * (1.0 - big));
      return (phi - 1.0) / (denominator * denominator);
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown metric");
}

SumSquaresProfile max_sum_squares_profile(int k, double eps) {
  RequireArgs(k, eps, "max_sum_squares_profile");
  const double e = std::exp(eps);
  SumSquaresProfile out;
  out.x = Vector::Constant(k, 1.0 / (e + k - 1.0));
  out.x[0] = e / (e + k - 1.0);
  out.value = (k - 1.0 + e * e) / ((k - 1.0 + e) * (k - 1.0 + e));
  return out;
}

std::string_view RegimeName(Regime regime) {
  return regime == Regime::kFeasibility ? "feasibility" : "minmax";
}

std::vector<TradeoffPoint> feasibility_curve(Metric metric, const Distribution& p,
                                             std::span<const double> eps_grid) {
  std::vector<TradeoffPoint> points;
  points.reserve(eps_grid.size());
  for (double eps : eps_grid) {
    TradeoffPoint point;
    point.epsilon = eps;
    point.alpha_lower = std::max(1.0, feasibility_lower(metric, p, eps));
    point.alpha_upper = feasibility_upper(metric, p, eps);
    point.metric = metric;
    point.regime = Regime::kFeasibility;
    point.k = p.size();
    points.push_back(point);
  }
  return points;
}

std::vector<TradeoffPoint> minmax_curve(Metric metric, int k, double p0,
                                        std::span<const double> eps_grid) {
  std::vector<TradeoffPoint> points;
  points.reserve(eps_grid.size());
  for (double eps : eps_grid) {
    TradeoffPoint point;
    point.epsilon = eps;
    point.alpha_lower = std::max(1.0, minmax_lower(metric, k, eps, p0));
    point.alpha_upper = minmax_upper(metric, k, eps, p0);
    point.metric = metric;
    point.regime = Regime::kMinmax;
    point.k = k;
    point.p0 = p0;
    points.push_back(point);
  }
  return points;
}

void write_tradeoff_csv(std::ostream& out, std::span<const TradeoffPoint> points,
                        std::uint64_t seed) {
  const auto old_precision = out.precision(17);
  out << "# seed=" << seed << " version=" << kVersion << '\n';
  out << "epsilon,alpha_lower,alpha_upper,metric,regime,k,p0\n";
  for (const auto& point : points) {
    out << point.epsilon << ',' << point.alpha_lower << ',' << point.alpha_upper << ','
        << MetricName(point.metric) << ',' << RegimeName(point.regime) << ',' << point.k << ','
        << point.p0 << '\n';
  }
  out.precision(old_precision);
}

}  // namespace ldprr
