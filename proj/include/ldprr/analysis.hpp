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

#ifndef LDPRR_ANALYSIS_HPP_
#define LDPRR_ANALYSIS_HPP_

#include <cstdint>
#include <string>
#include <string_view>

#include "ldprr/core.hpp"
#include "ldprr/mechanisms.hpp"

namespace ldprr {

// nu(rho, k) = p W (W^-1 o ... o W^-1) e_k with rho Hadamard factors.
// nu(1, k) = p_k and nu(2, k) = (p Phi(W))_k.
class NuTable {
 public:
  explicit NuTable(Matrix values) : values_(std::move(values)) {}

  // rho is 1-based, k is 0-based.
  double operator()(int rho, int k) const { return values_(rho - 1, k); }
  int rho_max() const { return static_cast<int>(values_.rows()); }
  int size() const { return static_cast<int>(values_.cols()); }
  const Matrix& values() const { return values_; }

 private:
  Matrix values_;
};

NuTable nu_table(const Distribution& p, const Mechanism& w, int rho_max = 4);

// Phi(W) = W (W^-1 o W^-1).
template <typename DerivedW, typename DerivedInv>
Matrix phi_kernel(const Eigen::MatrixBase<DerivedW>& w,
                  const Eigen::MatrixBase<DerivedInv>& w_inv) {
  return w * w_inv.cwiseProduct(w_inv);
}

struct PhiMatrix {
  Matrix entries;
  double phi = 0.0;  // sum of all entries
};

PhiMatrix phi_matrix(const Mechanism& w);

// 1 + sum_{k>=2} 1/|lambda_k|^2 with lambda the DFT of the first row; equals
// phi_matrix(circulant_mechanism(spec)).phi.
double phi_circulant_spectral(const CirculantSpec& spec);

// Which third-order coefficient to use in the f-divergence expansion.
//   kAsPrinted:        B = 2 + sum(nu3/nu1^2 - 3 nu2/nu3)
//   kMomentConsistent: B = 2 + sum(nu3/nu1^2 - 3 nu2/nu1), the form obtained
//                      by inserting the third central moment into the Taylor
//                      series.
// The two agree whenever nu2 = nu3 (identity and permutations).
enum class BCoefficient { kAsPrinted, kMomentConsistent };

struct ExpansionReport {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double first_order = 0.0;   // a f''(1) / 2, coefficient of 1/n
  double second_order = 0.0;  // b f'''(1) / 6 + c f''''(1) / 8, coefficient of 1/n^2
  std::string metric;
  BCoefficient b_form = BCoefficient::kAsPrinted;

  double TruncatedLoss(double n) const { return first_order / n + second_order / (n * n); }
};

ExpansionReport expansion_fdiv(const Distribution& p, const Mechanism& w,
                               const FDivergenceSpec& spec,
                               BCoefficient b_form = BCoefficient::kAsPrinted);

// Coefficient of 1/n in the expected squared error: sum_k (nu2 - nu1^2).
double expansion_mse(const Distribution& p, const Mechanism& w);

// Coefficient of 1/sqrt(n) in the expected L1 error:
// sqrt(2/pi) sum_k sqrt(nu2 - nu1^2).
double expansion_tv(const Distribution& p, const Mechanism& w);

enum class Metric { kFDiv, kMse, kTv };
std::string_view MetricName(Metric metric);
Metric ParseMetric(std::string_view name);

// Normalized asymptotic losses. The Matrix overloads take Phi(W) directly.
double alpha_fdiv(const Distribution& p, const Matrix& phi);
double alpha_mse(const Distribution& p, const Matrix& phi);
double alpha_tv(const Distribution& p, const Matrix& phi);
double alpha(Metric metric, const Distribution& p, const Matrix& phi);

inline double alpha_fdiv(const Distribution& p, const Mechanism& w) {
  return alpha_fdiv(p, phi_matrix(w).entries);
}
inline double alpha_mse(const Distribution& p, const Mechanism& w) {
  return alpha_mse(p, phi_matrix(w).entries);
}
inline double alpha_tv(const Distribution& p, const Mechanism& w) {
  return alpha_tv(p, phi_matrix(w).entries);
}
inline double alpha(Metric metric, const Distribution& p, const Mechanism& w) {
  return alpha(metric, p, phi_matrix(w).entries);
}

// Central moments of n (p_check_k - p_k) for the raw pullback estimate. The
// fourth moment carries nu4 with coefficient 1 (exact for W = identity, where
// it reduces to the binomial fourth central moment).
struct CentralMoments {
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
};

CentralMoments central_moments(const Distribution& p, const Mechanism& w, int k,
                               std::int64_t n);

// min over entries of Phi(W W') - Phi(W). Nonnegative up to rounding; zero
// exactly when W' is a permutation.
double dpi_gap(const Mechanism& w, const Mechanism& w_prime);

// min over faces {r : r_i = 0} of the simplex of D(r W || p W), the exponent
// bounding the probability that the raw estimate leaves the simplex.
// Throws ConvergenceFailure if a face solve misses the 1e-8 KKT tolerance.
double boundary_exponent(const Distribution& p, const Mechanism& w);

}  // namespace ldprr

#endif  // LDPRR_ANALYSIS_HPP_
