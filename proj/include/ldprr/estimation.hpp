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

#ifndef LDPRR_ESTIMATION_HPP_
#define LDPRR_ESTIMATION_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "ldprr/core.hpp"
#include "ldprr/mechanisms.hpp"
#include "ldprr/simplex_solver.hpp"

namespace ldprr {

// Histogram of n observed symbols.
class EmpiricalType {
 public:
  // Throws InvalidArgument on negative counts or a zero total.
  static EmpiricalType FromCounts(std::vector<std::int64_t> counts);

  const std::vector<std::int64_t>& counts() const { return counts_; }
  std::int64_t n() const { return n_; }
  int size() const { return static_cast<int>(counts_.size()); }

  // counts / n as a row vector; always a valid distribution.
  Vector type() const;

 private:
  EmpiricalType(std::vector<std::int64_t> counts, std::int64_t n)
      : counts_(std::move(counts)), n_(n) {}

  std::vector<std::int64_t> counts_;
  std::int64_t n_;
};

// Samples are 1-based symbols in [1, K]. Throws OutOfAlphabet, or
// InvalidArgument for an empty sample.
EmpiricalType empirical_type(std::span<const int> samples, int k);

// t W^-1; sums to one but may leave the simplex.
RawVector raw_estimate(const EmpiricalType& t, const Mechanism& w);

// argmin over the simplex of D(t || p' W). Returns the raw estimate when it
// is already a distribution. Throws ConvergenceFailure.
Distribution ml_estimate(const EmpiricalType& t, const Mechanism& w,
                         const SimplexSolverOptions& options = {});

// argmin over the simplex of ||t - p' W||_2, same conventions as ml_estimate.
Distribution mmse_estimate(const EmpiricalType& t, const Mechanism& w,
                           const SimplexSolverOptions& options = {});

struct WaterfillingResult {
  Distribution estimate;
  double eta;
};

// Closed forms under the step mechanism. The ML projection is
//   p_k = max{0, eta t_k - 1} / (e^eps - 1)
// and the MMSE projection is
//   p_k = max{0, (e^eps + K - 1) t_k + eta} / (e^eps - 1),
// with eta fixed by the unit sum.
WaterfillingResult ml_waterfilling(const Vector& t, double eps);
WaterfillingResult mmse_waterfilling(const Vector& t, double eps);

Distribution ml_estimate_step(const EmpiricalType& t, int k, double eps);
Distribution mmse_estimate_step(const EmpiricalType& t, int k, double eps);

}  // namespace ldprr

#endif  // LDPRR_ESTIMATION_HPP_
