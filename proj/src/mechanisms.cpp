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

#include "ldprr/mechanisms.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "ldprr/rng.hpp"

namespace ldprr {

namespace {

constexpr double kEntrySlack = 1e-12;
constexpr double kInverseCheck = 1e-9;
constexpr int kMaxAttempts = 100;

// Rows of independent Dirichlet(1, ..., 1) draws.
Matrix UniformSimplexRows(int k, CounterRng& rng) {
  Matrix v(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      // 1 - U lies in (0, 1], so the log is finite.
      v(i, j) = -std::log(1.0 - rng.Uniform01());
    }
    v.row(i) /= v.row(i).sum();
  }
  return v;
}

// Largest theta in [0, 1] with (1 - theta) / K + theta V eps-private, where
// each column of V lists entries that must stay within a factor e^eps of one
// another. Every pair constraint is linear in theta, so the bound is exact.
double LargestPrivateMix(const Matrix& v, int k, double eps) {
  const double bound = std::exp(eps);
  const double slack = (bound - 1.0) / k;
  double theta = 1.0;
  for (Eigen::Index col = 0; col < v.cols(); ++col) {
    const double hi = v.col(col).maxCoeff();
    const double lo = v.col(col).minCoeff();
    const double c = hi - bound * lo + slack;
    if (c > 0.0) theta = std::min(theta, slack / c);
  }
  // Step inside the boundary so rounding cannot break strict privacy.
  return theta < 1.0 ? theta * (1.0 - 1e-12) : theta;
}

std::vector<std::complex<double>> Dft(const Vector& w) {
  const int k = static_cast<int>(w.size());
  std::vector<std::complex<double>> lambda(k);
  for (int m = 0; m < k; ++m) {
    std::complex<double> acc = 0.0;
    for (int l = 0; l < k; ++l) {
      acc += w[l] * std::polar(1.0, -2.0 * std::numbers::pi * m * l / k);
    }
    lambda[m] = acc;
  }
  return lambda;
}

}  // namespace

Mechanism Mechanism::FromMatrix(const Matrix& matrix) {
  if (matrix.rows() != matrix.cols() || matrix.rows() < 2) {
    throw Error(ErrorCode::kLengthMismatch, "mechanism must be square with K >= 2");
  }
  if (!matrix.allFinite()) {
    throw Error(ErrorCode::kNotStochastic, "mechanism has non-finite entries");
  }
  if (matrix.minCoeff() < -kEntrySlack || matrix.maxCoeff() > 1.0 + kEntrySlack) {
    throw Error(ErrorCode::kNotStochastic, "mechanism entries must lie in [0, 1]");
  }
  const Eigen::VectorXd row_sums = matrix.rowwise().sum();
  for (Eigen::Index r = 0; r < row_sums.size(); ++r) {
    if (std::abs(row_sums[r] - 1.0) > tol::kRowSum) {
      throw Error(ErrorCode::kNotStochastic,
                  "row " + std::to_string(r) + " sums to " + std::to_string(row_sums[r]));
    }
  }
  Matrix clean = matrix.cwiseMax(0.0).cwiseMin(1.0);

  Eigen::JacobiSVD<Matrix> svd(clean);
  const auto& sigma = svd.singularValues();
  if (sigma[sigma.size() - 1] <= kRankThreshold * sigma[0]) {
    throw Error(ErrorCode::kSingularMatrix, "mechanism is not full-rank");
  }
  Matrix inverse = clean.partialPivLu().inverse();
  const Matrix residual = clean * inverse - Matrix::Identity(clean.rows(), clean.cols());
  if (residual.cwiseAbs().maxCoeff() >= kInverseCheck) {
    throw Error(ErrorCode::kSingularMatrix, "inverse failed W * W^-1 = I check");
  }
  const double eps = epsilon_of(clean);
  return Mechanism(std::move(clean), std::move(inverse), eps);
}

Mechanism Mechanism::Identity(int k) { return FromMatrix(Matrix::Identity(k, k)); }

CirculantSpec::CirculantSpec(Distribution first_row) : first_row_(std::move(first_row)) {
  for (const auto& lambda : Dft(first_row_.values())) {
    // Singular values of a circulant matrix are the |lambda|; lambda_1 = 1 is
    // the largest.
    if (std::abs(lambda) <= kRankThreshold) {
      throw Error(ErrorCode::kSingularMatrix, "circulant row has a zero DFT coefficient");
    }
  }
}

Mechanism step_mechanism(int k, double eps) {
  if (k < 2) throw Error(ErrorCode::kInvalidArgument, "step_mechanism needs K >= 2");
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw Error(ErrorCode::kInvalidArgument, "step_mechanism needs finite eps > 0");
  }
  const double e = std::exp(eps);
  const double denom = e + k - 1.0;
  Matrix w = Matrix::Constant(k, k, 1.0 / denom);
  w.diagonal().setConstant(e / denom);
  return Mechanism::FromMatrix(w);
}

Mechanism circulant_mechanism(const CirculantSpec& spec) {
  const int k = spec.size();
  const Vector& w = spec.first_row().values();
  Matrix m(k, k);
  for (int row = 0; row < k; ++row) {
    for (int col = 0; col < k; ++col) {
      m(row, col) = w[((col - row) % k + k) % k];
    }
  }
  return Mechanism::FromMatrix(m);
}

bool is_eps_private(const Mechanism& w, double eps) {
  return w.epsilon() <= eps + 1e-12;
}

bool satisfies_ldp_constraints(const Matrix& w, double eps, double slack) {
  const double bound = std::exp(eps);
  for (Eigen::Index col = 0; col < w.cols(); ++col) {
    for (Eigen::Index k = 0; k < w.rows(); ++k) {
      for (Eigen::Index kp = 0; kp < w.rows(); ++kp) {
        if (w(k, col) > bound * w(kp, col) + slack) return false;
      }
    }
  }
  return true;
}

Mechanism random_eps_private(int k, double eps, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::kInvalidArgument, "random_eps_private needs K >= 2");
  if (!(eps > 0.0)) throw Error(ErrorCode::kInvalidArgument, "random_eps_private needs eps > 0");
  CounterRng rng(DeriveSeed(seed, 0x6d656368), 0);
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const Matrix v = UniformSimplexRows(k, rng);
    const double theta = LargestPrivateMix(v, k, eps);
    const Matrix mixed = ((1.0 - theta) / k + theta * v.array()).matrix();
    if (!satisfies_ldp_constraints(mixed, eps)) continue;
    try {
      return Mechanism::FromMatrix(mixed);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kSingularMatrix) throw;
    }
  }
  throw Error(ErrorCode::kRetriesExhausted, "random_eps_private: no full-rank draw");
}

CirculantSpec random_eps_private_circulant(int k, double eps, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::kInvalidArgument, "circulant draw needs K >= 2");
  if (!(eps > 0.0)) throw Error(ErrorCode::kInvalidArgument, "circulant draw needs eps > 0");
  CounterRng rng(DeriveSeed(seed, 0x63697263), 0);
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const Vector v = UniformSimplexRows(k, rng).row(0);
    // Each column of a circulant holds every entry of the first row.
    const double theta = LargestPrivateMix(v.transpose(), k, eps);
    const Vector w = ((1.0 - theta) / k + theta * v.array()).matrix();
    if (!satisfies_ldp_constraints(w.transpose(), eps)) continue;
    try {
      return CirculantSpec(Distribution::FromValues(w));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kSingularMatrix) throw;
    }
  }
  throw Error(ErrorCode::kRetriesExhausted, "random_eps_private_circulant: no full-rank draw");
}

Mechanism compose(const Mechanism& w, const Mechanism& w_prime) {
  if (w.size() != w_prime.size()) {
    throw Error(ErrorCode::kLengthMismatch, "compose: mechanisms differ in size");
  }
  Matrix product = w.matrix() * w_prime.matrix();
  // Renormalize rows to absorb rounding in the product.
  for (Eigen::Index r = 0; r < product.rows(); ++r) product.row(r) /= product.row(r).sum();
  return Mechanism::FromMatrix(product);
}

Mechanism permutation_mechanism(std::span<const int> perm) {
  const int k = static_cast<int>(perm.size());
  std::vector<bool> seen(k, false);
  for (int target : perm) {
    if (target < 0 || target >= k || seen[target]) {
      throw Error(ErrorCode::kNotAPermutation, "not a permutation of 0..K-1");
    }
    seen[target] = true;
  }
  Matrix m = Matrix::Zero(k, k);
  for (int row = 0; row < k; ++row) m(row, perm[row]) = 1.0;
  return Mechanism::FromMatrix(m);
}

}  // namespace ldprr
