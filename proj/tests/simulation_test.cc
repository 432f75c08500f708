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

#include "ldprr/simulation.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "test_util.hpp"

namespace ldprr {
namespace {

using testing::D;

const double kLn3 = std::log(3.0);

TEST(SamplingTest, IdentityNearPointMass) {
  CounterRng rng(1, 0);
  const EmpiricalType t = sample_chain(D({0.999, 0.0005, 0.0005}), Mechanism::Identity(3), 1000, rng);
  EXPECT_GE(t.counts()[0], 990);
  EXPECT_EQ(t.n(), 1000);
}

TEST(SamplingTest, DeterministicPerStream) {
  const Distribution p = D({0.2, 0.3, 0.5});
  const Mechanism w = step_mechanism(3, 1.0);
  CounterRng a(9, 4), b(9, 4), c(9, 5);
  const auto ta = sample_chain(p, w, 500, a).counts();
  EXPECT_EQ(ta, sample_chain(p, w, 500, b).counts());
  EXPECT_NE(ta, sample_chain(p, w, 500, c).counts());
  CounterRng d(9, 4), e(9, 4);
  const Distribution q = pushforward(p, w);
  EXPECT_EQ(sample_type_multinomial(q, 500, d).counts(), sample_type_multinomial(q, 500, e).counts());
}

// Per-coordinate mean and variance of both sampling paths match the
// multinomial moments n q_k and n q_k (1 - q_k).
TEST(SamplingTest, BothPathsHaveMultinomialMoments) {
  const Distribution p = D({0.1, 0.2, 0.3, 0.4});
  const Mechanism w = random_eps_private(4, 1.0, 3);
  const Distribution q = pushforward(p, w);
  const int trials = 100000;
  const std::int64_t n = 7;
  for (bool chain : {true, false}) {
    Vector sum = Vector::Zero(4), sum_sq = Vector::Zero(4);
    for (int i = 0; i < trials; ++i) {
      CounterRng rng(chain ? 10 : 11, i);
      const EmpiricalType t = chain ? sample_chain(p, w, n, rng) : sample_type_multinomial(q, n, rng);
      for (int k = 0; k < 4; ++k) {
        const double c = static_cast<double>(t.counts()[k]);
        sum[k] += c;
        sum_sq[k] += c * c;
      }
    }
    for (int k = 0; k < 4; ++k) {
      const double mean = sum[k] / trials;
      const double var = sum_sq[k] / trials - mean * mean;
      const double expected_var = n * q[k] * (1 - q[k]);
      EXPECT_NEAR(mean, n * q[k], 4 * std::sqrt(expected_var / trials)) << chain << " " << k;
      EXPECT_NEAR(var, expected_var, 0.03 * expected_var) << chain << " " << k;
    }
  }
}

TEST(MonteCarloLossTest, IdentityMseMatchesMultinomialVariance) {
  const auto r = monte_carlo_loss(Distribution::Uniform(2), Mechanism::Identity(2), 100,
                                  LossMetric::Mse(), Estimator::kMl, 100000, 5);
  EXPECT_NEAR(r.mean, 0.005, 3 * r.std_error);
  EXPECT_EQ(r.trials, 100000);
  EXPECT_EQ(r.metric, "mse");
  EXPECT_EQ(r.seed, 5u);

  const Distribution p = D({0.2, 0.3, 0.5});
  const auto raw = monte_carlo_loss(p, Mechanism::Identity(3), 40, LossMetric::Mse(),
                                    Estimator::kRawClipped, 100000, 6);
  EXPECT_NEAR(raw.mean, (0.16 + 0.21 + 0.25) / 40, 3 * raw.std_error);
}

TEST(MonteCarloLossTest, IndependentOfThreadCount) {
  const Distribution p = D({0.5, 0.25, 0.125, 0.125});
  const Mechanism w = step_mechanism(4, 1.0);
  const auto kl = LossMetric::FDiv(FDivergenceSpec::KullbackLeibler());
  const auto one = monte_carlo_loss(p, w, 200, kl, Estimator::kMl, 5000, 8, {1});
  const auto four = monte_carlo_loss(p, w, 200, kl, Estimator::kMl, 5000, 8, {4});
  EXPECT_EQ(one.mean, four.mean);
  EXPECT_EQ(one.std_error, four.std_error);
  const auto chain1 = monte_carlo_loss(p, w, 50, kl, Estimator::kMmse, 999, 8, {1, Sampling::kChain});
  const auto chain3 = monte_carlo_loss(p, w, 50, kl, Estimator::kMmse, 999, 8, {3, Sampling::kChain});
  EXPECT_EQ(chain1.mean, chain3.mean);
}

TEST(MonteCarloLossTest, Errors) {
  const Mechanism w = step_mechanism(2, 1.0);
  EXPECT_LDPRR_ERROR(monte_carlo_loss(Distribution::Uniform(2), w, 10, LossMetric::Mse(),
                                      Estimator::kMl, 1, 0),
                     ErrorCode::kInvalidArgument);
  // KL against a source with a zero coordinate fails inside every trial.
  try {
    monte_carlo_loss(D({1.0, 0.0}), w, 10, LossMetric::FDiv(FDivergenceSpec::KullbackLeibler()),
                     Estimator::kMl, 10, 0, {2});
    ADD_FAILURE() << "expected TrialFailure";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTrialFailure);
    EXPECT_NE(std::string(e.what()).find("trial 0"), std::string::npos);
  }
}

TEST(MonteCarloLossTest, MlAndMmseAgreeAtLargeN) {
  const Distribution p = D({0.5, 0.25, 0.125, 0.125});
  const Mechanism w = step_mechanism(4, 1.0);
  const std::vector<LossMetric> metrics{LossMetric::Mse()};
  const std::vector<Estimator> estimators{Estimator::kMl, Estimator::kMmse};
  const auto r = monte_carlo_losses(p, w, 10000, metrics, estimators, 20000, 3);
  const double se = std::hypot(r[0].std_error, r[1].std_error);
  EXPECT_LT(std::abs(r[0].mean - r[1].mean), 3 * se);
}

TEST(EscapeProbabilityTest, IdentityNeverEscapes) {
  const auto e = escape_probability(D({0.3, 0.7}), Mechanism::Identity(2), 5, 1000, 1);
  EXPECT_EQ(e.estimate, 0.0);
}

TEST(EscapeProbabilityTest, TwoSymbolsMatchEnumeration) {
  const Distribution p = Distribution::Uniform(2);
  const Mechanism w = step_mechanism(2, kLn3);
  const double exponent = boundary_exponent(p, w);
  for (int n : {10, 15, 20}) {
    const double exact =
        oracle::EscapeProbabilityK2(oracle::FromEigen(p.values()), oracle::FromEigen(w.matrix()), n);
    const auto e = escape_probability(p, w, n, 200000, 100 + n);
    EXPECT_NEAR(e.estimate, exact, 3 * e.std_error) << n;
    EXPECT_LE(exact, std::exp(-n * exponent)) << n;
  }
  EXPECT_NEAR(oracle::EscapeProbabilityK2({0.5, 0.5}, {{0.75, 0.25}, {0.25, 0.75}}, 10), 0.109375,
              1e-15);
}

TEST(EscapeProbabilityTest, DecreasesWithSampleSize) {
  const Distribution p = D({0.4, 0.6});
  const Mechanism w = step_mechanism(2, 1.0);
  double previous = 1.0, previous_se = 0.0;
  for (int n : {10, 20, 40, 80}) {
    const auto e = escape_probability(p, w, n, 50000, n, {2});
    EXPECT_LT(e.estimate, previous + 2 * std::hypot(e.std_error, previous_se));
    previous = e.estimate;
    previous_se = e.std_error;
  }
}

TEST(ConvergenceSweepTest, IdentityRatiosAreOne) {
  const Distribution p = D({0.2, 0.3, 0.5});
  const std::vector<std::int64_t> grid{20, 80};
  const std::vector<LossMetric> metrics{LossMetric::FDiv(FDivergenceSpec::KullbackLeibler()),
                                        LossMetric::Mse(), LossMetric::Tv()};
  const std::vector<Estimator> estimators{Estimator::kMl, Estimator::kMmse};
  const SweepResult s = convergence_sweep(p, Mechanism::Identity(3), grid, metrics, estimators, 500, 2);
  EXPECT_EQ(s.rows.size(), 2u * 2 * 3 * 2);
  for (const auto& row : s.rows) EXPECT_EQ(row.normalized, 1.0);
}

TEST(ConvergenceSweepTest, RatiosApproachAlpha) {
  const Distribution p = D({0.5, 0.25, 0.125, 0.125});
  const Mechanism w = step_mechanism(4, 1.0);
  const std::vector<std::int64_t> grid{125, 2000};
  const std::vector<LossMetric> metrics{LossMetric::FDiv(FDivergenceSpec::KullbackLeibler()),
                                        LossMetric::Mse(), LossMetric::Tv()};
  const std::vector<Estimator> estimators{Estimator::kMl};
  const SweepResult s = convergence_sweep(p, w, grid, metrics, estimators, 4000, 11);
  EXPECT_NEAR(s.Find(2000, "kl", Estimator::kMl)->normalized / alpha_fdiv(p, w), 1.0, 0.1);
  EXPECT_NEAR(s.Find(2000, "mse", Estimator::kMl)->normalized / alpha_mse(p, w), 1.0, 0.1);
  EXPECT_NEAR(s.Find(2000, "tv", Estimator::kMl)->normalized / alpha_tv(p, w), 1.0, 0.1);
  EXPECT_EQ(s.Find(2000, "kl", Estimator::kMmse), nullptr);

  std::ostringstream out;
  write_sweep_csv(out, s);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "# seed=11 version=0.1.0");
  std::getline(in, line);
  EXPECT_EQ(line, "n,metric,estimator,mechanism,mean,std_error,normalized");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 12);
}

TEST(ConvergenceSweepTest, RejectsUnsortedGrid) {
  const std::vector<std::int64_t> grid{100, 50};
  const std::vector<LossMetric> metrics{LossMetric::Mse()};
  const std::vector<Estimator> estimators{Estimator::kMl};
  EXPECT_LDPRR_ERROR(convergence_sweep(Distribution::Uniform(2), step_mechanism(2, 1.0), grid,
                                       metrics, estimators, 10, 0),
                     ErrorCode::kInvalidArgument);
}

TEST(NamesTest, RoundTrip) {
  for (auto e : {Estimator::kMl, Estimator::kMmse, Estimator::kRawClipped}) {
    EXPECT_EQ(ParseEstimator(EstimatorName(e)), e);
  }
  EXPECT_LDPRR_ERROR(ParseEstimator("bayes"), ErrorCode::kInvalidArgument);
  EXPECT_EQ(LossMetric::ByName("hellinger").Name(), "hellinger");
  EXPECT_EQ(LossMetric::ByName("tv").metric, Metric::kTv);
  EXPECT_EQ(LossMetric::ByName("mse").Name(), "mse");
}

}  // namespace
}  // namespace ldprr
