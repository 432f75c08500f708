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

#ifndef LDPRR_CORE_HPP_
#define LDPRR_CORE_HPP_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ldprr/error.hpp"

namespace ldprr {

// Probability vectors are row vectors: the output distribution of a channel
// is q = p * W.
template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
template <typename Scalar>
using SquareMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = RowVector<double>;
using Matrix = SquareMatrix<double>;

namespace tol {
// User input slack: sums further than this from one are rejected.
inline constexpr double kStructural = 1e-9;
// Round trips and identities that hold up to rounding.
inline constexpr double kRoundTrip = 1e-10;
// Row sums of channel matrices.
inline constexpr double kRowSum = 1e-12;
}  // namespace tol

class Mechanism;

// A probability vector on [K]. Immutable once built.
class Distribution {
 public:
  // Validates entries >= 0 and |sum - 1| <= tol::kStructural, then
  // renormalizes away the residual drift.
  static Distribution FromValues(const Vector& values);
  static Distribution Uniform(int k);
  // For numerically produced simplex points: entries in [-tol::kStructural, 0)
  // are set to zero before renormalizing. Larger violations still throw.
  static Distribution FromNearSimplex(const Vector& values);

  const Vector& values() const { return probs_; }
  int size() const { return static_cast<int>(probs_.size()); }
  double operator[](int k) const { return probs_[k]; }

  bool IsFullySupported(double floor = 0.0) const;

 private:
  explicit Distribution(Vector probs) : probs_(std::move(probs)) {}
  Vector probs_;
};

// A vector whose entries sum to one but may leave [0, 1]; the raw pullback
// t * W^-1 lives here before projection.
class RawVector {
 public:
  static RawVector FromValues(const Vector& values);

  const Vector& values() const { return values_; }
  int size() const { return static_cast<int>(values_.size()); }
  double operator[](int k) const { return values_[k]; }

  // True when every entry lies in [-slack, 1 + slack].
  bool InSimplex(double slack = 0.0) const;

 private:
  explicit RawVector(Vector values) : values_(std::move(values)) {}
  Vector values_;
};

Distribution make_distribution(std::span<const double> values);
Distribution make_distribution(const Vector& values);

// A convex f with f(1) = 0 plus the derivatives at 1 that drive the
// asymptotic expansions.
struct FDivergenceSpec {
  std::string name;
  std::function<double(double)> eval;
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
  double d4 = 0.0;
  bool f0_finite = true;
  // False for |x - 1|, which has no derivatives at 1.
  bool differentiable = true;

  static FDivergenceSpec KullbackLeibler();   // x ln x
  static FDivergenceSpec Hellinger();         // (sqrt(x) - 1)^2
  static FDivergenceSpec Pearson();           // (x - 1)^2
  static FDivergenceSpec Triangular();        // (x - 1)^2 / (x + 1)
  static FDivergenceSpec TotalVariation();    // |x - 1|

  // Looks up a built-in by name: kl, hellinger, pearson, triangular, tv.
  static FDivergenceSpec ByName(const std::string& name);
};

// D_f = sum_k p_k f(q_k / p_k). Zero q_k contributes p_k f(0).
double f_divergence(const FDivergenceSpec& spec, const Distribution& p,
                    const Distribution& q);

// ||p - q||_1 and ||p - q||_2^2.
template <typename DerivedA, typename DerivedB>
double tv_distance(const Eigen::MatrixBase<DerivedA>& p,
                   const Eigen::MatrixBase<DerivedB>& q) {
  if (p.size() != q.size()) {
    throw Error(ErrorCode::kLengthMismatch, "tv_distance: operand sizes differ");
  }
  return (p - q).template lpNorm<1>();
}

template <typename DerivedA, typename DerivedB>
double mse_distance(const Eigen::MatrixBase<DerivedA>& p,
                    const Eigen::MatrixBase<DerivedB>& q) {
  if (p.size() != q.size()) {
    throw Error(ErrorCode::kLengthMismatch, "mse_distance: operand sizes differ");
  }
  return (p - q).squaredNorm();
}

inline double tv_distance(const Distribution& p, const Distribution& q) {
  return tv_distance(p.values(), q.values());
}
inline double tv_distance(const RawVector& p, const Distribution& q) {
  return tv_distance(p.values(), q.values());
}
inline double mse_distance(const Distribution& p, const Distribution& q) {
  return mse_distance(p.values(), q.values());
}
inline double mse_distance(const RawVector& p, const Distribution& q) {
  return mse_distance(p.values(), q.values());
}

// q = p W.
Distribution pushforward(const Distribution& p, const Mechanism& w);
// p = q W^-1; the result sums to one but may leave the simplex.
RawVector pullback(const Distribution& q, const Mechanism& w);
RawVector pullback(const RawVector& q, const Mechanism& w);

// Euclidean projection onto the probability simplex (sort and threshold).
Distribution project_simplex_euclidean(const Eigen::Ref<const Vector>& v);
inline Distribution project_simplex_euclidean(const RawVector& v) {
  return project_simplex_euclidean(v.values());
}

}  // namespace ldprr

#endif  // LDPRR_CORE_HPP_
