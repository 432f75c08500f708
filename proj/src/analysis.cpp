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

#include "ldprr/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "ldprr/simplex_solver.hpp"

namespace ldprr {

namespace {

constexpr double kSupportFloor = 1e-12;
constexpr double kVarianceSlack = 1e-12;
constexpr double kTinyMagnitude = 1e-30;
constexpr double kLogFloor = 1e-300;

void RequireFullSupport(const Distribution& p, const char* where) {
  if (!p.IsFullySupported(kSupportFloor)) {
    throw Error(ErrorCode::kSupportMismatch,
                std::string(where) + ": source must have every entry above 1e-12");
  }
}

void RequireSameSize(const Distribution& p, int k, const char* where) {
  if (p.size() != k) {
    throw Error(ErrorCode::kLengthMismatch, std::string(where) + ": dimension mismatch");
  }
}

// nu2 - nu1^2 per symbol, with rounding-level negatives clamped.
Vector Variances(const Distribution& p, const Matrix& phi) {
  Vector v = p.values() * phi - p.values().cwiseProduct(p.values());
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (v[k] < -kVarianceSlack) {
      throw Error(ErrorCode::kNegativeVariance,
                  "nu2 - nu1^2 = " + std::to_string(v[k]) + " at index " + std::to_string(k));
    }
    v[k] = std::max(v[k], 0.0);
  }
  return v;
}

double Kl(const Vector& r, const Vector& q) {
  double total = 0.0;
  for (Eigen::Index l = 0; l < r.size(); ++l) {
    if (r[l] > 0.0) total += r[l] * std::log(r[l] / q[l]);
  }
  return total;
}

}  // namespace

NuTable nu_table(const Distribution& p, const Mechanism& w, int rho_max) {
  RequireSameSize(p, w.size(), "nu_table");
  if (rho_max < 1 || rho_max > 4) {
    throw Error(ErrorCode::kInvalidArgument, "nu_table: rho_max must be in 1..4");
  }
  const Vector q = p.values() * w.matrix();
  Matrix values(rho_max, w.size());
  Matrix power = w.inverse();
  for (int rho = 1; rho <= rho_max; ++rho) {
    values.row(rho - 1) = q * power;
    power = power.cwiseProduct(w.inverse());
  }
  return NuTable(std::move(values));
}

PhiMatrix phi_matrix(const Mechanism& w) {
  PhiMatrix out;
  out.entries = phi_kernel(w.matrix(), w.inverse());
  out.phi = out.entries.sum();
  return out;
}

double phi_circulant_spectral(const CirculantSpec& spec) {
  const Vector& w = spec.first_row().values();
  const int k = static_cast<int>(w.size());
  // 1 / |lambda|^2 amplifies rounding in the DFT sum when lambda is small, so
  // accumulate in extended precision with exactly reduced angles.
  const long double step = -2.0L * std::numbers::pi_v<long double> / k;
  long double phi = 1.0L;
  for (int m = 1; m < k; ++m) {
    std::complex<long double> lambda = 0.0L;
    for (int l = 0; l < k; ++l) {
      lambda += static_cast<long double>(w[l]) * std::polar(1.0L, step * ((m * l) % k));
    }
    const long double magnitude2 = std::norm(lambda);
    if (magnitude2 <= kTinyMagnitude) {
      throw Error(ErrorCode::kSingularMatrix, "circulant row has a zero DFT coefficient");
    }
    phi += 1.0L / magnitude2;
  }
  return static_cast<double>(phi);
}

ExpansionReport expansion_fdiv(const Distribution& p, const Mechanism& w,
                               const FDivergenceSpec& spec, BCoefficient b_form) {
  if (!spec.differentiable || !spec.f0_finite) {
    throw Error(ErrorCode::kUnsupportedSpec,
                "expansion needs f four times differentiable at 1 with f(0) finite");
  }
  if (!(spec.d2 > 0.0)) {
    throw Error(ErrorCode::kUnsupportedSpec, "expansion needs f''(1) > 0");
  }
  RequireSameSize(p, w.size(), "expansion_fdiv");
  RequireFullSupport(p, "expansion_fdiv");

  const NuTable nu = nu_table(p, w, 3);
  ExpansionReport report;
  report.metric = spec.name;
  report.b_form = b_form;
  report.a = -1.0;
  report.b = 2.0;
  report.c = 1.0;
  for (int k = 0; k < w.size(); ++k) {
    const double n1 = nu(1, k);
    const double n2 = nu(2, k);
    const double n3 = nu(3, k);
    report.a += n2 / n1;
    const double b_tail = b_form == BCoefficient::kAsPrinted ? n2 / n3 : n2 / n1;
    report.b += n3 / (n1 * n1) - 3.0 * b_tail;
    report.c += n2 * n2 / (n1 * n1 * n1) - 2.0 * n2 / n1;
  }
  report.first_order = report.a * spec.d2 / 2.0;
  report.second_order = report.b * spec.d3 / 6.0 + report.c * spec.d4 / 8.0;
  return report;
}

double expansion_mse(const Distribution& p, const Mechanism& w) {
  RequireSameSize(p, w.size(), "expansion_mse");
  return Variances(p, phi_matrix(w).entries).sum();
}

double expansion_tv(const Distribution& p, const Mechanism& w) {
  RequireSameSize(p, w.size(), "expansion_tv");
  return std::sqrt(2.0 / std::numbers::pi) *
         Variances(p, phi_matrix(w).entries).cwiseSqrt().sum();
}

std::string_view MetricName(Metric metric) {
  switch (metric) {
    case Metric::kFDiv: return "fdiv";
    case Metric::kMse: return "mse";
    case Metric::kTv: return "tv";
  }
  return "unknown";
}

Metric ParseMetric(std::string_view name) {
  if (name == "fdiv" || name == "f-div" || name == "kl") return Metric::kFDiv;
  if (name == "mse") return Metric::kMse;
  if (name == "tv") return Metric::kTv;
  throw Error(ErrorCode::kInvalidArgument, "unknown metric '" + std::string(name) + "'");
}

double alpha_fdiv(const Distribution& p, const Matrix& phi) {
  RequireSameSize(p, static_cast<int>(phi.rows()), "alpha_fdiv");
  RequireFullSupport(p, "alpha_fdiv");
  const Vector inv = p.values().cwiseInverse();
  const double k = p.size();
  return ((p.values() * phi).dot(inv) - 1.0) / (k - 1.0);
}

double alpha_mse(const Distribution& p, const Matrix& phi) {
  RequireSameSize(p, static_cast<int>(phi.rows()), "alpha_mse");
  const double norm2 = p.values().squaredNorm();
  if (1.0 - norm2 <= kSupportFloor) {
    throw Error(ErrorCode::kDegenerateSource, "alpha_mse: source is a point mass");
  }
  return ((p.values() * phi).sum() - norm2) / (1.0 - norm2);
}

double alpha_tv(const Distribution& p, const Matrix& phi) {
  RequireSameSize(p, static_cast<int>(phi.rows()), "alpha_tv");
  if (1.0 - p.values().squaredNorm() <= kSupportFloor) {
    throw Error(ErrorCode::kDegenerateSource, "alpha_tv: source is a point mass");
  }
  const double numerator = Variances(p, phi).cwiseSqrt().sum();
  const double denominator =
      (p.values() - p.values().cwiseProduct(p.values())).cwiseSqrt().sum();
  const double ratio = numerator / denominator;
  return ratio * ratio;
}

double alpha(Metric metric, const Distribution& p, const Matrix& phi) {
  switch (metric) {
    case Metric::kFDiv: return alpha_fdiv(p, phi);
    case Metric::kMse: return alpha_mse(p, phi);
    case Metric::kTv: return alpha_tv(p, phi);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown metric");
}

CentralMoments central_moments(const Distribution& p, const Mechanism& w, int k,
                               std::int64_t n) {
  RequireSameSize(p, w.size(), "central_moments");
  if (k < 0 || k >= w.size()) {
    throw Error(ErrorCode::kInvalidArgument, "central_moments: index out of range");
  }
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "central_moments: n must be >= 1");
  const NuTable nu = nu_table(p, w, 4);
  const double n1 = nu(1, k);
  const double n2 = nu(2, k);
  const double n3 = nu(3, k);
  const double n4 = nu(4, k);
  const double nn = static_cast<double>(n);
  CentralMoments m;
  m.m2 = nn * (n2 - n1 * n1);
  m.m3 = nn * (2.0 * n1 * n1 * n1 - 3.0 * n1 * n2 + n3);
  // n mu4 + 3 n (n - 1) sigma^4 for a sum of n i.i.d. terms with raw
  // moments nu1..nu4; the nu4 coefficient is 1.
  m.m4 = nn * ((3.0 * nn - 6.0) * std::pow(n1, 4) + 3.0 * (nn - 1.0) * n2 * n2 +
               (12.0 - 6.0 * nn) * n1 * n1 * n2 - 4.0 * n1 * n3 + n4);
  return m;
}

double dpi_gap(const Mechanism& w, const Mechanism& w_prime) {
  const Mechanism composed = compose(w, w_prime);
  return (phi_matrix(composed).entries - phi_matrix(w).entries).minCoeff();
}

double boundary_exponent(const Distribution& p, const Mechanism& w) {
  RequireSameSize(p, w.size(), "boundary_exponent");
  RequireFullSupport(p, "boundary_exponent");
  const int k = w.size();
  const Vector q = p.values() * w.matrix();

  double best = std::numeric_limits<double>::infinity();
  for (int face = 0; face < k; ++face) {
    // Rows of W available on the face r_face = 0.
    Matrix rows(k - 1, k);
    for (int i = 0, r = 0; i < k; ++i) {
      if (i != face) rows.row(r++) = w.matrix().row(i);
    }
    if (k == 2) {
      best = std::min(best, Kl(rows.row(0), q));
      continue;
    }
    SimplexProblem problem;
    problem.objective = [&](const Vector& r) { return Kl(r * rows, q); };
    problem.gradient = [&](const Vector& r) {
      const Vector out = r * rows;
      Vector log_ratio(k);
      for (int l = 0; l < k; ++l) {
        log_ratio[l] = std::log(std::max(out[l], kLogFloor) / q[l]) + 1.0;
      }
      return Vector(log_ratio * rows.transpose());
    };
    SimplexSolverOptions options;
    options.max_iterations = 10000;
    const SimplexSolverResult solved =
        minimize_on_simplex(problem, Vector::Constant(k - 1, 1.0 / (k - 1)), options);
    if (!solved.converged) {
      throw Error(ErrorCode::kConvergenceFailure,
                  "boundary_exponent: face " + std::to_string(face) + " KKT residual " +
                      std::to_string(solved.kkt_residual));
    }
    best = std::min(best, solved.objective);
  }
  return best;
}

}  // namespace ldprr
