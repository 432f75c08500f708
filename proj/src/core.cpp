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

#include "ldprr/core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "ldprr/mechanisms.hpp"

namespace ldprr {

namespace {

void CheckFinite(const Vector& values, const char* what) {
  if (!values.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, std::string(what) + ": non-finite entry");
  }
}

}  // namespace

Distribution Distribution::FromValues(const Vector& values) {
  if (values.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "distribution needs at least 2 entries");
  }
  CheckFinite(values, "distribution");
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    if (values[k] < 0.0) {
      throw Error(ErrorCode::kNegativeEntry,
                  "entry " + std::to_string(k) + " is " + std::to_string(values[k]));
    }
  }
  const double sum = values.sum();
  if (std::abs(sum - 1.0) > tol::kStructural) {
    throw Error(ErrorCode::kSumNotOne, "entries sum to " + std::to_string(sum));
  }
  return Distribution(values / sum);
}

Distribution Distribution::FromNearSimplex(const Vector& values) {
  Vector clamped = values;
  for (Eigen::Index k = 0; k < clamped.size(); ++k) {
    if (clamped[k] < 0.0 && clamped[k] >= -tol::kStructural) clamped[k] = 0.0;
  }
  return FromValues(clamped);
}

Distribution Distribution::Uniform(int k) {
  if (k < 2) throw Error(ErrorCode::kInvalidArgument, "uniform needs K >= 2");
  return Distribution(Vector::Constant(k, 1.0 / k));
}

bool Distribution::IsFullySupported(double floor) const {
  return (probs_.array() > floor).all();
}

RawVector RawVector::FromValues(const Vector& values) {
  CheckFinite(values, "raw vector");
  const double sum = values.sum();
  if (std::abs(sum - 1.0) > tol::kStructural) {
    throw Error(ErrorCode::kSumNotOne, "raw vector sums to " + std::to_string(sum));
  }
  return RawVector(values);
}

bool RawVector::InSimplex(double slack) const {
  return (values_.array() >= -slack).all() && (values_.array() <= 1.0 + slack).all();
}

Distribution make_distribution(const Vector& values) {
  return Distribution::FromValues(values);
}

Distribution make_distribution(std::span<const double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  std::copy(values.begin(), values.end(), v.data());
  return Distribution::FromValues(v);
}

FDivergenceSpec FDivergenceSpec::KullbackLeibler() {
  return {"kl", [](double x) { return x > 0.0 ? x * std::log(x) : 0.0; },
          1.0, 1.0, -1.0, 2.0, true, true};
}

FDivergenceSpec FDivergenceSpec::Hellinger() {
  return {"hellinger",
          [](double x) {
            const double r = std::sqrt(x) - 1.0;
            return r * r;
          },
          0.0, 0.5, -0.75, 15.0 / 8.0, true, true};
}

FDivergenceSpec FDivergenceSpec::Pearson() {
  return {"pearson", [](double x) { return (x - 1.0) * (x - 1.0); },
          0.0, 2.0, 0.0, 0.0, true, true};
}

FDivergenceSpec FDivergenceSpec::Triangular() {
  return {"triangular", [](double x) { return (x - 1.0) * (x - 1.0) / (x + 1.0); },
          0.0, 1.0, -1.5, 3.0, true, true};
}

FDivergenceSpec FDivergenceSpec::TotalVariation() {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  return {"tv", [](double x) { return std::abs(x - 1.0); }, nan, nan, nan, nan, true, false};
}

FDivergenceSpec FDivergenceSpec::ByName(const std::string& name) {
  if (name == "kl") return KullbackLeibler();
  if (name == "hellinger") return Hellinger();
  if (name == "pearson") return Pearson();
  if (name == "triangular") return Triangular();
  if (name == "tv") return TotalVariation();
  throw Error(ErrorCode::kInvalidArgument, "unknown f-divergence '" + name + "'");
}

double f_divergence(const FDivergenceSpec& spec, const Distribution& p,
                    const Distribution& q) {
  if (p.size() != q.size()) {
    throw Error(ErrorCode::kLengthMismatch, "f_divergence: operand sizes differ");
  }
  double total = 0.0;
  for (int k = 0; k < p.size(); ++k) {
    if (p[k] <= 0.0) {
      throw Error(ErrorCode::kSupportMismatch,
                  "f_divergence: p has a zero at index " + std::to_string(k));
    }
    if (q[k] == 0.0) {
      total += spec.f0_finite ? p[k] * spec.eval(0.0)
                              : std::numeric_limits<double>::infinity();
    } else {
      total += p[k] * spec.eval(q[k] / p[k]);
    }
  }
  return total;
}

Distribution pushforward(const Distribution& p, const Mechanism& w) {
  if (p.size() != w.size()) {
    throw Error(ErrorCode::kLengthMismatch, "pushforward: dimension mismatch");
  }
  return Distribution::FromNearSimplex(p.values() * w.matrix());
}

RawVector pullback(const RawVector& q, const Mechanism& w) {
  if (q.size() != w.size()) {
    throw Error(ErrorCode::kLengthMismatch, "pullback: dimension mismatch");
  }
  return RawVector::FromValues(q.values() * w.inverse());
}

RawVector pullback(const Distribution& q, const Mechanism& w) {
  if (q.size() != w.size()) {
    throw Error(ErrorCode::kLengthMismatch, "pullback: dimension mismatch");
  }
  return RawVector::FromValues(q.values() * w.inverse());
}

Distribution project_simplex_euclidean(const Eigen::Ref<const Vector>& v) {
  if (!v.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "project_simplex_euclidean: non-finite entry");
  }
  const Eigen::Index k = v.size();
  std::vector<double> sorted(v.data(), v.data() + k);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());

  // Largest support size rho with sorted[rho-1] - (sum_{i<rho} sorted[i] - 1)/rho > 0.
  double running = 0.0;
  double theta = 0.0;
  for (Eigen::Index rho = 1; rho <= k; ++rho) {
    running += sorted[rho - 1];
    const double candidate = (running - 1.0) / static_cast<double>(rho);
    if (sorted[rho - 1] - candidate > 0.0) theta = candidate;
  }
  Vector out = (v.array() - theta).max(0.0).matrix();
  return Distribution::FromValues(out / out.sum());
}

}  // namespace ldprr
