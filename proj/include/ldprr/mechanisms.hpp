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

#ifndef LDPRR_MECHANISMS_HPP_
#define LDPRR_MECHANISMS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>

#include "ldprr/core.hpp"

namespace ldprr {

// Smallest singular value relative to the largest below which a channel is
// treated as singular.
inline constexpr double kRankThreshold = 1e-10;

// Privacy level of a channel: log of the largest intra-column ratio
// W(k, l) / W(k', l). +inf when a column mixes zero and nonzero entries.
template <typename Derived>
double epsilon_of(const Eigen::MatrixBase<Derived>& w) {
  double worst = 0.0;
  for (Eigen::Index col = 0; col < w.cols(); ++col) {
    const double hi = w.col(col).maxCoeff();
    const double lo = w.col(col).minCoeff();
    if (hi <= 0.0) continue;
    if (lo <= 0.0) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, std::log(hi / lo));
  }
  return worst;
}

// A K x K row-stochastic, full-rank channel with its inverse and privacy
// level cached at construction.
class Mechanism {
 public:
  // Validates entries in [0, 1], unit row sums, full rank and the inverse.
  // Throws NotStochastic or SingularMatrix.
  static Mechanism FromMatrix(const Matrix& matrix);
  static Mechanism Identity(int k);

  const Matrix& matrix() const { return matrix_; }
  const Matrix& inverse() const { return inverse_; }
  double epsilon() const { return epsilon_; }
  int size() const { return static_cast<int>(matrix_.rows()); }

 private:
  Mechanism(Matrix matrix, Matrix inverse, double epsilon)
      : matrix_(std::move(matrix)), inverse_(std::move(inverse)), epsilon_(epsilon) {}

  Matrix matrix_;
  Matrix inverse_;
  double epsilon_;
};

// First row w of a circulant channel; row k is w shifted right k times.
class CirculantSpec {
 public:
  // Throws SingularMatrix when the DFT of w has a (numerically) zero
  // coefficient.
  explicit CirculantSpec(Distribution first_row);

  const Distribution& first_row() const { return first_row_; }
  int size() const { return first_row_.size(); }

 private:
  Distribution first_row_;
};

inline double epsilon_of(const Mechanism& w) { return w.epsilon(); }

// e^eps on the diagonal and 1 elsewhere, normalized by e^eps + K - 1.
Mechanism step_mechanism(int k, double eps);
Mechanism circulant_mechanism(const CirculantSpec& spec);

// True iff epsilon_of(w) <= eps + 1e-12.
bool is_eps_private(const Mechanism& w, double eps);

// Entrywise check of W(k, l) <= e^eps W(k', l) over all triples.
bool satisfies_ldp_constraints(const Matrix& w, double eps, double slack = 0.0);

// Draws an eps-private channel: (1 - theta) U + theta V with V having
// independent uniform-simplex rows, U the all-1/K matrix and theta the
// largest value in (0, 1] keeping every column ratio <= e^eps. Singular draws
// are retried; throws RetriesExhausted after 100 attempts.
Mechanism random_eps_private(int k, double eps, std::uint64_t seed);

// Same construction restricted to a single generating row.
CirculantSpec random_eps_private_circulant(int k, double eps, std::uint64_t seed);

// W * W'. Throws LengthMismatch or SingularMatrix.
Mechanism compose(const Mechanism& w, const Mechanism& w_prime);

// Row k has its single 1 in column perm[k]; perm is 0-based.
Mechanism permutation_mechanism(std::span<const int> perm);

}  // namespace ldprr

#endif  // LDPRR_MECHANISMS_HPP_
