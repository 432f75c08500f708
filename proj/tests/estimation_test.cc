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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "ldprr/simulation.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace ldprr {
namespace {

using testing::D;
using testing::V;

const double kLn3 = std::log(3.0);

EmpiricalType Counts(std::vector<std::int64_t> c) { return EmpiricalType::FromCounts(std::move(c)); }

EmpiricalType RandomType(int k, std::int64_t n, std::mt19937_64& gen) {
  std::vector<double> weights(k);
  std::exponential_distribution<double> exp1(1.0);
  for (auto& w : weights) w = exp1(gen);
  std::discrete_distribution<int> pick(weights.begin(), weights.end());
  std::vector<std::int64_t> counts(k, 0);
  for (std::int64_t i = 0; i < n; ++i) ++counts[pick(gen)];
  return Counts(counts);
}

Vector MlGradient(const Vector& t, const Matrix& w, const Vector& p) {
  const Vector q = p * w;
  Vector ratio(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i) ratio[i] = t[i] > 0 ? t[i] / q[i] : 0.0;
  return -(w * ratio.transpose()).transpose();
}

Vector MmseGradient(const Vector& t, const Matrix& w, const Vector& p) {
  return -2.0 * (t - p * w) * w.transpose();
}

TEST(EmpiricalTypeTest, Examples) {
  const std::vector<int> a{1, 1, 2};
  const EmpiricalType ta = empirical_type(a, 2);
  EXPECT_EQ(ta.counts(), (std::vector<std::int64_t>{2, 1}));
  EXPECT_EQ(ta.n(), 3);
  const std::vector<int> b{3, 3, 3};
  EXPECT_EQ(empirical_type(b, 4).counts(), (std::vector<std::int64_t>{0, 0, 3, 0}));
  EXPECT_NEAR(empirical_type(b, 4).type()[2], 1.0, 1e-15);
  EXPECT_LDPRR_ERROR(empirical_type(std::vector<int>{}, 2), ErrorCode::kInvalidArgument);
  EXPECT_LDPRR_ERROR(empirical_type(std::vector<int>{1, 5}, 4), ErrorCode::kOutOfAlphabet);
  EXPECT_LDPRR_ERROR(empirical_type(std::vector<int>{0}, 4), ErrorCode::kOutOfAlphabet);
  EXPECT_LDPRR_ERROR(Counts({0, 0}), ErrorCode::kAllZeroType);
  EXPECT_LDPRR_ERROR(Counts({1, -1, 3}), ErrorCode::kNegativeEntry);
}

TEST(RawEstimateTest, Examples) {
  const Mechanism w = step_mechanism(2, kLn3);
  const RawVector r = raw_estimate(Counts({1, 0}), w);
  EXPECT_NEAR(r[0], 1.5, 1e-12);
  EXPECT_NEAR(r[1], -0.5, 1e-12);
  const RawVector half = raw_estimate(Counts({5, 5}), w);
  EXPECT_NEAR(half[0], 0.5, 1e-12);
  // q = (0.625, 0.375) is exactly the image of p = (0.75, 0.25).
  const RawVector exact = raw_estimate(Counts({5, 3}), w);
  EXPECT_NEAR(exact[0], 0.75, 1e-12);
  EXPECT_LDPRR_ERROR(raw_estimate(Counts({1, 2, 3}), w), ErrorCode::kLengthMismatch);
}

TEST(MlEstimateTest, Examples) {
  const Mechanism w = step_mechanism(2, kLn3);
  const Distribution boundary = ml_estimate(Counts({1, 0}), w);
  EXPECT_NEAR(boundary[0], 1.0, 1e-8);
  EXPECT_NEAR(boundary[1], 0.0, 1e-8);
  const Distribution interior = ml_estimate(Counts({2, 1}), w);
  EXPECT_NEAR(interior[0], raw_estimate(Counts({2, 1}), w)[0], 1e-12);

  const WaterfillingResult wf = ml_waterfilling(V({1.0, 0.0}), kLn3);
  EXPECT_NEAR(wf.estimate[0], 1.0, 1e-15);
  EXPECT_NEAR(wf.eta, 3.0, 1e-12);
}

TEST(MmseEstimateTest, Examples) {
  const Mechanism w = step_mechanism(2, kLn3);
  const Distribution boundary = mmse_estimate(Counts({1, 0}), w);
  EXPECT_NEAR(boundary[0], 1.0, 1e-8);
  const WaterfillingResult wf = mmse_waterfilling(V({1.0, 0.0}), kLn3);
  EXPECT_NEAR(wf.estimate[0], 1.0, 1e-15);
  EXPECT_NEAR(wf.eta, -2.0, 1e-12);
}

TEST(WaterfillingTest, UniformTypeGivesUniform) {
  for (int k = 2; k <= 7; ++k) {
    const Vector t = Vector::Constant(k, 1.0 / k);
    for (const auto& wf : {ml_waterfilling(t, 0.8), mmse_waterfilling(t, 0.8)}) {
      EXPECT_LT((wf.estimate.values() - t).cwiseAbs().maxCoeff(), 1e-14);
    }
  }
}

TEST(WaterfillingTest, FourSymbolClippedType) {
  const EmpiricalType t = Counts({4, 3, 2, 1});
  const Mechanism w = step_mechanism(4, 1.0);
  // The raw estimate has a negative last entry, so both projections clip it.
  EXPECT_LT(raw_estimate(t, w)[3], 0.0);
  const Distribution ml = ml_estimate_step(t, 4, 1.0);
  const Distribution mmse = mmse_estimate_step(t, 4, 1.0);
  EXPECT_EQ(ml[3], 0.0);
  EXPECT_EQ(mmse[3], 0.0);
  EXPECT_LT((ml.values() - ml_estimate(t, w).values()).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT((mmse.values() - mmse_estimate(t, w).values()).cwiseAbs().maxCoeff(), 1e-6);
}

// The closed forms satisfy the KKT conditions of their own objectives, and
// fail those of the other objective on clipped types.
// The noiseless output of an estimate on a face of the simplex puts a water
// level at exactly zero; rounding must not reject every support.
TEST(WaterfillingTest, BoundaryInputReturnsItself) {
  for (double eps : {0.5, 1.0, 2.0}) {
    for (int k : {3, 4, 6}) {
      Vector p = Vector::Zero(k);
      for (int i = 1; i < k; ++i) p[i] = static_cast<double>(i) / (k * (k - 1) / 2.0);
      const Distribution source = Distribution::FromNearSimplex(p);
      const Vector q = pushforward(source, step_mechanism(k, eps)).values();
      const auto ml = ml_waterfilling(q, eps);
      const auto mmse = mmse_waterfilling(q, eps);
      EXPECT_LT((ml.estimate.values() - source.values()).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_LT((mmse.estimate.values() - source.values()).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(WaterfillingTest, SatisfiesKktOfItsObjective) {
  std::mt19937_64 gen(5);
  int clipped = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int k = 2 + trial % 5;
    const double eps = 0.3 + 0.01 * trial;
    const Mechanism w = step_mechanism(k, eps);
    const EmpiricalType t = RandomType(k, 5 + trial % 30, gen);
    const Vector type = t.type();
    const Vector ml = ml_estimate_step(t, k, eps).values();
    const Vector mmse = mmse_estimate_step(t, k, eps).values();
    EXPECT_LT(simplex_kkt_residual(ml, MlGradient(type, w.matrix(), ml)), 1e-9);
    EXPECT_LT(simplex_kkt_residual(mmse, MmseGradient(type, w.matrix(), mmse)), 1e-9);
    if ((ml - mmse).cwiseAbs().maxCoeff() > 1e-6) ++clipped;
  }
  EXPECT_GT(clipped, 10);
}

TEST(GenericEstimatorTest, AgreesWithClosedForms) {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 2 + trial % 5;
    const double eps = 0.5 + 0.02 * trial;
    const Mechanism w = step_mechanism(k, eps);
    const EmpiricalType t = RandomType(k, 3 + trial % 40, gen);
    EXPECT_LT((ml_estimate(t, w).values() - ml_estimate_step(t, k, eps).values()).cwiseAbs().maxCoeff(),
              1e-6);
    EXPECT_LT(
        (mmse_estimate(t, w).values() - mmse_estimate_step(t, k, eps).values()).cwiseAbs().maxCoeff(),
        1e-6);
  }
}

TEST(GenericEstimatorTest, KktOnGeneralMechanisms) {
  std::mt19937_64 gen(8);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int k = 2 + static_cast<int>(seed % 5);
    const Mechanism w = random_eps_private(k, 1.5, seed);
    const EmpiricalType t = RandomType(k, 10, gen);
    const Vector ml = ml_estimate(t, w).values();
    const Vector mmse = mmse_estimate(t, w).values();
    EXPECT_LT(simplex_kkt_residual(ml, MlGradient(t.type(), w.matrix(), ml)), 1e-8);
    EXPECT_LT(simplex_kkt_residual(mmse, MmseGradient(t.type(), w.matrix(), mmse)), 1e-8);
  }
}

// Scalar search over p = (x, 1 - x) as an independent K = 2 oracle.
TEST(GenericEstimatorTest, TwoSymbolGoldenSection) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Mechanism w = random_eps_private(2, 2.0, seed);
    const EmpiricalType t = Counts({static_cast<std::int64_t>(seed % 7), 7 - static_cast<std::int64_t>(seed % 7) + 1});
    const oracle::Vec type = oracle::FromEigen(t.type());
    auto q_of = [&](double x) {
      return oracle::Vec{x * w.matrix()(0, 0) + (1 - x) * w.matrix()(1, 0),
                         x * w.matrix()(0, 1) + (1 - x) * w.matrix()(1, 1)};
    };
    auto kl = [&](double x) { return oracle::Kl(type, q_of(x)); };
    auto sq = [&](double x) {
      const auto q = q_of(x);
      return std::pow(type[0] - q[0], 2) + std::pow(type[1] - q[1], 2);
    };
    EXPECT_NEAR(ml_estimate(t, w)[0], oracle::GoldenMin(kl, 0.0, 1.0), 1e-6);
    EXPECT_NEAR(mmse_estimate(t, w)[0], oracle::GoldenMin(sq, 0.0, 1.0), 1e-6);
  }
}

TEST(EstimatorPropertyTest, IdempotentOnInteriorRawEstimates) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int k = 2 + static_cast<int>(seed % 4);
    const Mechanism w = random_eps_private(k, 2.0, seed);
    // Types near the image of a central source keep the raw estimate inside.
    const Vector q = Distribution::Uniform(k).values() * w.matrix();
    std::vector<std::int64_t> counts(k);
    for (int i = 0; i < k; ++i) counts[i] = std::llround(q[i] * 1e6);
    const EmpiricalType t = Counts(counts);
    const RawVector raw = raw_estimate(t, w);
    ASSERT_TRUE(raw.InSimplex());
    EXPECT_LT((ml_estimate(t, w).values() - raw.values()).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LT((mmse_estimate(t, w).values() - raw.values()).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(EstimatorPropertyTest, PermutationEquivariance) {
  std::mt19937_64 gen(13);
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const int k = 3 + static_cast<int>(seed % 3);
    const Mechanism w = random_eps_private(k, 1.0, seed);
    const EmpiricalType t = RandomType(k, 8, gen);
    std::vector<int> perm(k);
    for (int i = 0; i < k; ++i) perm[i] = (i + 1 + static_cast<int>(seed)) % k;
    const Matrix pi = permutation_mechanism(perm).matrix();
    // Relabel both the inputs and the outputs.
    const Mechanism wp = Mechanism::FromMatrix(pi.transpose() * w.matrix() * pi);
    std::vector<std::int64_t> counts(k);
    for (int i = 0; i < k; ++i) counts[perm[i]] = t.counts()[i];
    const EmpiricalType tp = Counts(counts);
    for (auto e : {Estimator::kMl, Estimator::kMmse}) {
      const Vector a = EstimatorFn(e, w)(t).values() * pi;
      const Vector b = EstimatorFn(e, wp)(tp).values();
      EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-8);
    }
  }
}

TEST(EstimatorPropertyTest, ConsistentOnFourSymbolStep) {
  const Distribution p = D({0.5, 0.25, 0.125, 0.125});
  const Mechanism w = step_mechanism(4, 1.0);
  const Distribution q = pushforward(p, w);
  double previous = 1e300;
  for (std::int64_t n : {100, 1000, 10000, 100000}) {
    std::vector<double> errors;
    for (int trial = 0; trial < 201; ++trial) {
      CounterRng rng(77, trial);
      errors.push_back(
          (ml_estimate_step(sample_type_multinomial(q, n, rng), 4, 1.0).values() - p.values()).norm());
    }
    std::nth_element(errors.begin(), errors.begin() + 100, errors.end());
    const double median = errors[100];
    EXPECT_LT(median, previous);
    previous = median;
  }
  EXPECT_LT(previous, 0.02);
}

}  // namespace
}  // namespace ldprr
