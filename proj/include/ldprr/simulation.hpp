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

#ifndef LDPRR_SIMULATION_HPP_
#define LDPRR_SIMULATION_HPP_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ldprr/analysis.hpp"
#include "ldprr/core.hpp"
#include "ldprr/estimation.hpp"
#include "ldprr/mechanisms.hpp"
#include "ldprr/rng.hpp"

namespace ldprr {

enum class Estimator { kMl, kMmse, kRawClipped };
std::string_view EstimatorName(Estimator estimator);  // ml | mmse | raw-clipped
Estimator ParseEstimator(std::string_view name);

// Applies an estimator under a fixed channel. Step channels are detected
// once and routed to the waterfilling closed forms.
class EstimatorFn {
 public:
  EstimatorFn(Estimator estimator, const Mechanism& w);
  Distribution operator()(const EmpiricalType& t) const;
  Estimator estimator() const { return estimator_; }

 private:
  Estimator estimator_;
  const Mechanism* w_;
  bool step_ = false;
};

// A loss between the true source and an estimate. For kFDiv the loss is
// f_divergence(divergence, p, p_hat).
struct LossMetric {
  Metric metric = Metric::kMse;
  FDivergenceSpec divergence = FDivergenceSpec::KullbackLeibler();

  static LossMetric FDiv(FDivergenceSpec spec) { return {Metric::kFDiv, std::move(spec)}; }
  static LossMetric Mse() { return {Metric::kMse, FDivergenceSpec::KullbackLeibler()}; }
  static LossMetric Tv() { return {Metric::kTv, FDivergenceSpec::KullbackLeibler()}; }
  // kl | hellinger | pearson | triangular | mse | tv
  static LossMetric ByName(const std::string& name);

  std::string Name() const;
  double operator()(const Distribution& p, const Distribution& p_hat) const;
};

enum class Sampling { kMultinomial, kChain };

struct SimulationOptions {
  int threads = 1;
  Sampling sampling = Sampling::kMultinomial;
};

// Draws x_i ~ p and y_i ~ W(x_i, .) one symbol at a time; returns the type of y.
EmpiricalType sample_chain(const Distribution& p, const Mechanism& w, std::int64_t n,
                           CounterRng& rng);

// Draws the output type directly from Multinomial(n, q) by sequential
// binomial splitting.
EmpiricalType sample_type_multinomial(const Distribution& q, std::int64_t n, CounterRng& rng);

struct LossReport {
  std::string metric;
  Estimator estimator = Estimator::kMl;
  std::int64_t n = 0;
  std::int64_t trials = 0;
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t seed = 0;
};

// Trial i draws from CounterRng(seed, i); per-trial losses are reduced in
// trial order, so the result does not depend on options.threads. A failing
// trial aborts with TrialFailure naming the trial index.
LossReport monte_carlo_loss(const Distribution& p, const Mechanism& w, std::int64_t n,
                            const LossMetric& metric, Estimator estimator,
                            std::int64_t trials, std::uint64_t seed,
                            const SimulationOptions& options = {});

// Every (metric, estimator) pair evaluated on the same trials. Reports are
// ordered metric-major.
std::vector<LossReport> monte_carlo_losses(const Distribution& p, const Mechanism& w,
                                           std::int64_t n, std::span<const LossMetric> metrics,
                                           std::span<const Estimator> estimators,
                                           std::int64_t trials, std::uint64_t seed,
                                           const SimulationOptions& options = {});

struct EscapeEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

// Fraction of trials whose raw estimate has an entry below -1e-12 or above
// 1 + 1e-12. Samples through the explicit chain.
EscapeEstimate escape_probability(const Distribution& p, const Mechanism& w, std::int64_t n,
                                  std::int64_t trials, std::uint64_t seed,
                                  const SimulationOptions& options = {});

struct SweepRow {
  std::string mechanism;  // "W" or "identity"
  LossReport report;
  // mean / identity mean, squared for TV; 1 on identity rows.
  double normalized = 1.0;
};

struct SweepResult {
  std::vector<std::int64_t> n_grid;
  std::vector<SweepRow> rows;
  std::uint64_t seed = 0;

  const SweepRow* Find(std::int64_t n, std::string_view metric, Estimator estimator,
                       std::string_view mechanism = "W") const;
};

SweepResult convergence_sweep(const Distribution& p, const Mechanism& w,
                              std::span<const std::int64_t> n_grid,
                              std::span<const LossMetric> metrics,
                              std::span<const Estimator> estimators, std::int64_t trials,
                              std::uint64_t seed, const SimulationOptions& options = {});

// n,metric,estimator,mechanism,mean,std_error,normalized
void write_sweep_csv(std::ostream& out, const SweepResult& sweep);

}  // namespace ldprr

#endif  // LDPRR_SIMULATION_HPP_
