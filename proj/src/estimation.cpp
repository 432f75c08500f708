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

#include "ldprr/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>

namespace ldprr {

namespace {

constexpr double kLogFloor = 1e-300;

// Raw estimate if it lies in the simplex (up to clamping round-off).
std::optional<Distribution> FeasibleRaw(const EmpiricalType& t, const Mechanism& w) {
  const RawVector raw = raw_estimate(t, w);
  if (!raw.InSimplex(0.0)) return std::nullopt;
  return Distribution::FromNearSimplex(raw.values());
}

Distribution Solve(const SimplexProblem& problem, int k, const SimplexSolverOptions& options,
                   const char* name) {
  const Vector start = Vector::Constant(k, 1.0 / k);
  const SimplexSolverResult result = minimize_on_simplex(problem, start, options);
  if (!result.converged) {
    throw Error(ErrorCode::kConvergenceFailure,
                std::string(name) + ": KKT residual " + std::to_string(result.kkt_residual) +
                    " after " + std::to_string(result.iterations) + " iterations");
  }
  return Distribution::FromNearSimplex(result.x);
}

void CheckSizes(const EmpiricalType& t, const Mechanism& w) {
  if (t.size() != w.size()) {
    throw Error(ErrorCode::kLengthMismatch, "type and mechanism differ in size");
  }
}

void CheckStepArgs(const Vector& t, double eps) {
  if (t.size() < 2) throw Error(ErrorCode::kInvalidArgument, "waterfilling needs K >= 2");
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw Error(ErrorCode::kInvalidArgument, "waterfilling needs finite eps > 0");
  }
}

// Indices of t sorted by decreasing value (stable, so ties keep index order).
std::vector<int> DescendingOrder(const Vector& t) {
  std::vector<int> order(t.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return t[a] > t[b]; });
  return order;
}

// Shared active-set scan. `level(k, eta)` is the unclipped value of entry k
// (times e^eps - 1); `eta_for(m, prefix)` solves the unit-sum condition when
// the m largest entries of t (summing to `prefix`) are active. Supports are
// tried from largest to smallest; the first consistent one wins.
WaterfillingResult Waterfill(const Vector& t, double eps,
                             const std::function<double(double, double)>& level,
                             const std::function<double(int, double)>& eta_for) {
  const int k = static_cast<int>(t.size());
  const double scale = std::expm1(eps);
  const std::vector<int> order = DescendingOrder(t);
  std::vector<double> prefix(k + 1, 0.0);
  for (int m = 0; m < k; ++m) prefix[m + 1] = prefix[m] + t[order[m]];

  for (int m = k; m >= 1; --m) {
    const double eta = eta_for(m, prefix[m]);
    if (!std::isfinite(eta)) continue;
    // Active entries nonnegative, inactive ones nonpositive, up to rounding:
    // an input on a support boundary puts a level at exactly zero.
    const double tol = 1e-12 * (1.0 + std::abs(eta));
    if (level(t[order[m - 1]], eta) < -tol) continue;
    if (m < k && level(t[order[m]], eta) > tol) continue;
    Vector p = Vector::Zero(k);
    for (int i = 0; i < m; ++i) p[order[i]] = std::max(0.0, level(t[order[i]], eta)) / scale;
    return {Distribution::FromValues(p / p.sum()), eta};
  }
  throw Error(ErrorCode::kAllZeroType, "waterfilling: no consistent support");
}

}  // namespace

EmpiricalType EmpiricalType::FromCounts(std::vector<std::int64_t> counts) {
  if (counts.size() < 2) throw Error(ErrorCode::kInvalidArgument, "type needs K >= 2");
  std::int64_t n = 0;
  for (auto c : counts) {
    if (c < 0) throw Error(ErrorCode::kNegativeEntry, "negative count");
    n += c;
  }
  if (n == 0) throw Error(ErrorCode::kAllZeroType, "type has no observations");
  return EmpiricalType(std::move(counts), n);
}

Vector EmpiricalType::type() const {
  Vector t(size());
  for (int k = 0; k < size(); ++k) t[k] = static_cast<double>(counts_[k]) / n_;
  return t;
}

EmpiricalType empirical_type(std::span<const int> samples, int k) {
  if (k < 2) throw Error(ErrorCode::kInvalidArgument, "alphabet needs K >= 2");
  if (samples.empty()) throw Error(ErrorCode::kInvalidArgument, "empty sample");
  std::vector<std::int64_t> counts(k, 0);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const int s = samples[i];
    if (s < 1 || s > k) {
      throw Error(ErrorCode::kOutOfAlphabet, "sample " + std::to_string(i) + " is " +
                                                 std::to_string(s) + ", outside [1, " +
                                                 std::to_string(k) + "]");
    }
    ++counts[s - 1];
  }
  return EmpiricalType::FromCounts(std::move(counts));
}

RawVector raw_estimate(const EmpiricalType& t, const Mechanism& w) {
  CheckSizes(t, w);
  return RawVector::FromValues(t.type() * w.inverse());
}

Distribution ml_estimate(const EmpiricalType& t, const Mechanism& w,
                         const SimplexSolverOptions& options) {
  CheckSizes(t, w);
  if (auto raw = FeasibleRaw(t, w)) return *raw;
  const Vector type = t.type();
  const Matrix& m = w.matrix();
  SimplexProblem problem;
  problem.objective = [&](const Vector& p) {
    const Vector q = p * m;
    double d = 0.0;
    for (Eigen::Index k = 0; k < q.size(); ++k) {
      if (type[k] > 0.0) d += type[k] * std::log(type[k] / std::max(q[k], kLogFloor));
    }
    return d;
  };
  problem.gradient = [&](const Vector& p) {
    const Vector q = p * m;
    Vector ratio(q.size());
    for (Eigen::Index k = 0; k < q.size(); ++k) {
      ratio[k] = type[k] > 0.0 ? type[k] / std::max(q[k], kLogFloor) : 0.0;
    }
    return Vector(-(m * ratio.transpose()).transpose());
  };
  return Solve(problem, t.size(), options, "ml_estimate");
}

Distribution mmse_estimate(const EmpiricalType& t, const Mechanism& w,
                           const SimplexSolverOptions& options) {
  CheckSizes(t, w);
  if (auto raw = FeasibleRaw(t, w)) return *raw;
  const Vector type = t.type();
  const Matrix& m = w.matrix();
  SimplexProblem problem;
  problem.objective = [&](const Vector& p) { return (type - p * m).squaredNorm(); };
  problem.gradient = [&](const Vector& p) {
    return Vector(-2.0 * (type - p * m) * m.transpose());
  };
  problem.exact_step = [&](const Vector& p, const Vector& d) {
    const Vector dm = d * m;
    const double curvature = dm.squaredNorm();
    if (curvature <= 0.0) return 0.0;
    return (type - p * m).dot(dm) / curvature;
  };
  return Solve(problem, t.size(), options, "mmse_estimate");
}

WaterfillingResult ml_waterfilling(const Vector& t, double eps) {
  CheckStepArgs(t, eps);
  const double scale = std::expm1(eps);
  return Waterfill(
      t, eps, [](double tk, double eta) { return eta * tk - 1.0; },
      [&](int m, double prefix) { return prefix > 0.0 ? (scale + m) / prefix : NAN; });
}

WaterfillingResult mmse_waterfilling(const Vector& t, double eps) {
  CheckStepArgs(t, eps);
  const double scale = std::expm1(eps);
  const double gain = std::exp(eps) + static_cast<double>(t.size()) - 1.0;
  return Waterfill(
      t, eps, [gain](double tk, double eta) { return gain * tk + eta; },
      [&](int m, double prefix) { return (scale - gain * prefix) / m; });
}

Distribution ml_estimate_step(const EmpiricalType& t, int k, double eps) {
  if (t.size() != k) throw Error(ErrorCode::kLengthMismatch, "type size differs from K");
  return ml_waterfilling(t.type(), eps).estimate;
}

Distribution mmse_estimate_step(const EmpiricalType& t, int k, double eps) {
  if (t.size() != k) throw Error(ErrorCode::kLengthMismatch, "type size differs from K");
  return mmse_waterfilling(t.type(), eps).estimate;
}

}  // namespace ldprr
