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

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>

#include "ldprr/version.hpp"

namespace ldprr {

namespace {

constexpr double kEscapeSlack = 1e-12;
constexpr double kStepMatch = 1e-14;

Vector CumulativeRow(const Vector& v) {
  Vector c(v.size());
  double acc = 0.0;
  for (Eigen::Index k = 0; k < v.size(); ++k) c[k] = (acc += v[k]);
  c[v.size() - 1] = 1.0;
  return c;
}

int Draw(const Vector& cumulative, double u) {
  const double* begin = cumulative.data();
  const double* end = begin + cumulative.size();
  const double* hit = std::upper_bound(begin, end, u);
  return static_cast<int>(std::min<std::ptrdiff_t>(hit - begin, cumulative.size() - 1));
}

// Runs body(i) for i in [0, trials) over up to `threads` workers on
// contiguous blocks. The first failure by trial index is rethrown as
// TrialFailure.
template <typename Body>
void ForEachTrial(std::int64_t trials, int threads, Body&& body) {
  const int workers =
      static_cast<int>(std::clamp<std::int64_t>(threads, 1, std::max<std::int64_t>(trials, 1)));
  std::int64_t failed_index = std::numeric_limits<std::int64_t>::max();
  std::string failed_message;
  std::mutex mu;

  auto run = [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i) {
      try {
        body(i);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < failed_index) {
          failed_index = i;
          failed_message = e.what();
        }
        return;
      }
    }
  };

  if (workers == 1) {
    run(0, trials);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back(run, trials * w / workers, trials * (w + 1) / workers);
    }
    for (auto& t : pool) t.join();
  }
  if (failed_index != std::numeric_limits<std::int64_t>::max()) {
    throw Error(ErrorCode::kTrialFailure,
                "trial " + std::to_string(failed_index) + " failed: " + failed_message);
  }
}

// Mean and standard error of column j, summed in row order.
LossReport Summarize(const Matrix& losses, Eigen::Index j) {
  const Eigen::Index trials = losses.rows();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < trials; ++i) sum += losses(i, j);
  const double mean = sum / trials;
  double ss = 0.0;
  for (Eigen::Index i = 0; i < trials; ++i) {
    const double d = losses(i, j) - mean;
    ss += d * d;
  }
  LossReport report;
  report.mean = mean;
  report.std_error = std::sqrt(ss / (trials - 1.0) / trials);
  report.trials = trials;
  return report;
}

void CheckTrials(std::int64_t trials, std::int64_t n) {
  if (trials < 2) throw Error(ErrorCode::kInvalidArgument, "need at least 2 trials");
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "need n >= 1");
}

std::vector<LossReport> RunLosses(const Distribution& p, const Mechanism& w, std::int64_t n,
                                  std::span<const LossMetric> metrics,
                                  std::span<const Estimator> estimators, std::int64_t trials,
                                  std::uint64_t key, std::uint64_t seed,
                                  const SimulationOptions& options) {
  CheckTrials(trials, n);
  if (p.size() != w.size()) {
    throw Error(ErrorCode::kLengthMismatch, "source and mechanism differ in size");
  }
  const Distribution q = pushforward(p, w);
  std::vector<EstimatorFn> fns;
  for (Estimator e : estimators) fns.emplace_back(e, w);
  const Eigen::Index columns =
      static_cast<Eigen::Index>(metrics.size() * estimators.size());
  Matrix losses(trials, columns);

  ForEachTrial(trials, options.threads, [&](std::int64_t i) {
    CounterRng rng(key, static_cast<std::uint64_t>(i));
    const EmpiricalType t = options.sampling == Sampling::kChain
                                ? sample_chain(p, w, n, rng)
                                : sample_type_multinomial(q, n, rng);
    for (std::size_t e = 0; e < fns.size(); ++e) {
      const Distribution p_hat = fns[e](t);
      for (std::size_t m = 0; m < metrics.size(); ++m) {
        losses(i, static_cast<Eigen::Index>(m * fns.size() + e)) = metrics[m](p, p_hat);
      }
    }
  });

  std::vector<LossReport> reports;
  for (std::size_t m = 0; m < metrics.size(); ++m) {
    for (std::size_t e = 0; e < estimators.size(); ++e) {
      LossReport r = Summarize(losses, static_cast<Eigen::Index>(m * estimators.size() + e));
      r.metric = metrics[m].Name();
      r.estimator = estimators[e];
      r.n = n;
      r.seed = seed;
      reports.push_back(std::move(r));
    }
  }
  return reports;
}

}  // namespace

std::string_view EstimatorName(Estimator estimator) {
  switch (estimator) {
    case Estimator::kMl:
      return "ml";
    case Estimator::kMmse:
      return "mmse";
    case Estimator::kRawClipped:
      return "raw-clipped";
  }
  return "?";
}

Estimator ParseEstimator(std::string_view name) {
  if (name == "ml") return Estimator::kMl;
  if (name == "mmse") return Estimator::kMmse;
  if (name == "raw-clipped") return Estimator::kRawClipped;
  throw Error(ErrorCode::kInvalidArgument, "unknown estimator '" + std::string(name) + "'");
}

EstimatorFn::EstimatorFn(Estimator estimator, const Mechanism& w)
    : estimator_(estimator), w_(&w) {
  const double eps = w.epsilon();
  if (std::isfinite(eps) && eps > 0.0) {
    const Matrix reference = step_mechanism(w.size(), eps).matrix();
    step_ = (reference - w.matrix()).cwiseAbs().maxCoeff() < kStepMatch;
  }
}

Distribution EstimatorFn::operator()(const EmpiricalType& t) const {
  switch (estimator_) {
    case Estimator::kMl:
      return step_ ? ml_estimate_step(t, w_->size(), w_->epsilon()) : ml_estimate(t, *w_);
    case Estimator::kMmse:
      return step_ ? mmse_estimate_step(t, w_->size(), w_->epsilon()) : mmse_estimate(t, *w_);
    case Estimator::kRawClipped: {
      const Vector clipped = raw_estimate(t, *w_).values().cwiseMax(0.0);
      return Distribution::FromValues(clipped / clipped.sum());
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown estimator");
}

LossMetric LossMetric::ByName(const std::string& name) {
  if (name == "mse") return Mse();
  if (name == "tv") return Tv();
  return FDiv(FDivergenceSpec::ByName(name));
}

std::string LossMetric::Name() const {
  return metric == Metric::kFDiv ? divergence.name : std::string(MetricName(metric));
}

double LossMetric::operator()(const Distribution& p, const Distribution& p_hat) const {
  switch (metric) {
    case Metric::kFDiv:
      return f_divergence(divergence, p, p_hat);
    case Metric::kMse:
      return mse_distance(p, p_hat);
    case Metric::kTv:
      return tv_distance(p, p_hat);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown metric");
}

EmpiricalType sample_chain(const Distribution& p, const Mechanism& w, std::int64_t n,
                           CounterRng& rng) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "sample_chain needs n >= 1");
  if (p.size() != w.size()) {
    throw Error(ErrorCode::kLengthMismatch, "source and mechanism differ in size");
  }
  const int k = p.size();
  const Vector source = CumulativeRow(p.values());
  std::vector<Vector> rows;
  rows.reserve(k);
  for (int r = 0; r < k; ++r) rows.push_back(CumulativeRow(w.matrix().row(r)));
  std::vector<std::int64_t> counts(k, 0);
  for (std::int64_t i = 0; i < n; ++i) {
    const int x = Draw(source, rng.Uniform01());
    ++counts[Draw(rows[x], rng.Uniform01())];
  }
  return EmpiricalType::FromCounts(std::move(counts));
}

EmpiricalType sample_type_multinomial(const Distribution& q, std::int64_t n, CounterRng& rng) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "multinomial needs n >= 1");
  const int k = q.size();
  std::vector<std::int64_t> counts(k, 0);
  std::int64_t left = n;
  double mass = 1.0;
  for (int i = 0; i + 1 < k && left > 0; ++i) {
    const double prob = mass > 0.0 ? std::clamp(q[i] / mass, 0.0, 1.0) : 1.0;
    std::binomial_distribution<std::int64_t> draw(left, prob);
    counts[i] = draw(rng);
    left -= counts[i];
    mass -= q[i];
  }
  counts[k - 1] += left;
  return EmpiricalType::FromCounts(std::move(counts));
}

LossReport monte_carlo_loss(const Distribution& p, const Mechanism& w, std::int64_t n,
                            const LossMetric& metric, Estimator estimator,
                            std::int64_t trials, std::uint64_t seed,
                            const SimulationOptions& options) {
  return monte_carlo_losses(p, w, n, std::span(&metric, 1), std::span(&estimator, 1), trials,
                            seed, options)
      .front();
}

std::vector<LossReport> monte_carlo_losses(const Distribution& p, const Mechanism& w,
                                           std::int64_t n, std::span<const LossMetric> metrics,
                                           std::span<const Estimator> estimators,
                                           std::int64_t trials, std::uint64_t seed,
                                           const SimulationOptions& options) {
  return RunLosses(p, w, n, metrics, estimators, trials, seed, seed, options);
}

EscapeEstimate escape_probability(const Distribution& p, const Mechanism& w, std::int64_t n,
                                  std::int64_t trials, std::uint64_t seed,
                                  const SimulationOptions& options) {
  CheckTrials(trials, n);
  std::vector<unsigned char> escaped(static_cast<std::size_t>(trials), 0);
  ForEachTrial(trials, options.threads, [&](std::int64_t i) {
    CounterRng rng(seed, static_cast<std::uint64_t>(i));
    const RawVector raw = raw_estimate(sample_chain(p, w, n, rng), w);
    escaped[static_cast<std::size_t>(i)] = raw.InSimplex(kEscapeSlack) ? 0 : 1;
  });
  std::int64_t hits = 0;
  for (auto e : escaped) hits += e;
  const double f = static_cast<double>(hits) / trials;
  return {f, std::sqrt(f * (1.0 - f) / trials)};
}

const SweepRow* SweepResult::Find(std::int64_t n, std::string_view metric, Estimator estimator,
                                  std::string_view mechanism) const {
  for (const auto& row : rows) {
    if (row.report.n == n && row.report.metric == metric &&
        row.report.estimator == estimator && row.mechanism == mechanism) {
      return &row;
    }
  }
  return nullptr;
}

SweepResult convergence_sweep(const Distribution& p, const Mechanism& w,
                              std::span<const std::int64_t> n_grid,
                              std::span<const LossMetric> metrics,
                              std::span<const Estimator> estimators, std::int64_t trials,
                              std::uint64_t seed, const SimulationOptions& options) {
  if (n_grid.empty() || !std::is_sorted(n_grid.begin(), n_grid.end()) ||
      std::adjacent_find(n_grid.begin(), n_grid.end()) != n_grid.end()) {
    throw Error(ErrorCode::kInvalidArgument, "n_grid must be non-empty and strictly ascending");
  }
  const Mechanism identity = Mechanism::Identity(w.size());
  SweepResult sweep;
  sweep.n_grid.assign(n_grid.begin(), n_grid.end());
  sweep.seed = seed;
  for (std::int64_t n : n_grid) {
    // Both channels share trial streams, so W = identity reproduces the
    // reference exactly and the ratios carry correlated noise.
    const auto u = static_cast<std::uint64_t>(n);
    const auto privatized =
        RunLosses(p, w, n, metrics, estimators, trials, DeriveSeed(seed, u), seed, options);
    const auto reference = RunLosses(p, identity, n, metrics, estimators, trials,
                                     DeriveSeed(seed, u), seed, options);
    for (std::size_t i = 0; i < privatized.size(); ++i) {
      double ratio = privatized[i].mean / reference[i].mean;
      if (privatized[i].metric == "tv") ratio *= ratio;
      sweep.rows.push_back({"W", privatized[i], ratio});
    }
    for (const auto& r : reference) sweep.rows.push_back({"identity", r, 1.0});
  }
  return sweep;
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep) {
  const auto old_precision = out.precision(17);
  out << "# seed=" << sweep.seed << " version=" << kVersion << '\n';
  out << "n,metric,estimator,mechanism,mean,std_error,normalized\n";
  for (const auto& row : sweep.rows) {
    out << row.report.n << ',' << row.report.metric << ','
        << EstimatorName(row.report.estimator) << ',' << row.mechanism << ','
        << row.report.mean << ',' << row.report.std_error << ',' << row.normalized << '\n';
  }
  out.precision(old_precision);
}

}  // namespace ldprr
