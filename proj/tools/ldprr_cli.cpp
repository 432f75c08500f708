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

// ldprr command-line front end: mechanism | bounds | simulate | estimate.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ldprr/analysis.hpp"
#include "ldprr/bounds.hpp"
#include "ldprr/core.hpp"
#include "ldprr/estimation.hpp"
#include "ldprr/io.hpp"
#include "ldprr/mechanisms.hpp"
#include "ldprr/simulation.hpp"
#include "ldprr/version.hpp"

namespace {

using json = nlohmann::json;
using ldprr::Error;
using ldprr::ErrorCode;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

// Validation problems are configuration errors; everything else that goes
// wrong while computing is a runtime failure.
int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConvergenceFailure:
    case ErrorCode::kRetriesExhausted:
    case ErrorCode::kTrialFailure:
      return kExitRuntime;
    default:
      return kExitConfig;
  }
}

[[noreturn]] void ConfigError(const std::string& message) {
  throw Error(ErrorCode::kInvalidArgument, message);
}

std::vector<double> ParseList(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) ConfigError("bad number '" + item + "'");
    } catch (const std::logic_error&) {
      ConfigError("bad number '" + item + "'");
    }
  }
  return out;
}

std::int64_t ParseCount(const std::string& text, const char* what) {
  double value = 0.0;
  try {
    value = std::stod(text);
  } catch (const std::logic_error&) {
    ConfigError(std::string("bad ") + what + " '" + text + "'");
  }
  if (!(value >= 1.0) || value != std::floor(value) || value > 9e15) {
    ConfigError(std::string(what) + " must be a positive integer");
  }
  return static_cast<std::int64_t>(value);
}

ldprr::Vector ToVector(const std::vector<double>& v) {
  ldprr::Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

std::vector<double> ToStd(const ldprr::Vector& v) { return {v.data(), v.data() + v.size()}; }

// --eps or --eps-exp, exactly one.
struct EpsOptions {
  std::optional<double> eps;
  std::optional<double> eps_exp;

  void Add(CLI::App* app) {
    auto* a = app->add_option("--eps", eps, "privacy level epsilon");
    auto* b = app->add_option("--eps-exp", eps_exp, "e^epsilon (so --eps-exp 3 means ln 3)");
    a->excludes(b);
  }
  bool given() const { return eps || eps_exp; }
  double Get() const {
    if (eps_exp) {
      if (!(*eps_exp > 1.0)) ConfigError("--eps-exp must exceed 1");
      return std::log(*eps_exp);
    }
    if (!eps) ConfigError("one of --eps or --eps-exp is required");
    if (!(*eps > 0.0) || !std::isfinite(*eps)) ConfigError("epsilon must be finite and > 0");
    return *eps;
  }
};

void RequireK(int k) {
  if (k < 2) ConfigError("K must be >= 2");
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) ConfigError("cannot read '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Writes to `path`, or stdout when empty.
void Emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) ConfigError("cannot write '" + path + "'");
  out << text;
}

json MatrixJson(const ldprr::Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(ToStd(m.row(r)));
  return rows;
}

// ---- mechanism -------------------------------------------------------------

struct MechanismArgs {
  bool step = false;
  bool random = false;
  std::string circulant;
  std::string file;
  int k = 0;
  EpsOptions eps;
  std::uint64_t seed = 0;
  std::string out;
};

int RunMechanism(const MechanismArgs& args) {
  std::optional<ldprr::Mechanism> w;
  std::optional<ldprr::CirculantSpec> spec;
  const int sources = args.step + args.random + !args.circulant.empty() + !args.file.empty();
  if (sources != 1) ConfigError("choose exactly one of --step, --random, --circulant, --file");
  if (args.step || args.random) {
    RequireK(args.k);
    const double eps = args.eps.Get();
    w = args.step ? ldprr::step_mechanism(args.k, eps)
                  : ldprr::random_eps_private(args.k, eps, args.seed);
  } else if (!args.circulant.empty()) {
    spec.emplace(ldprr::make_distribution(ToVector(ParseList(args.circulant))));
    w = ldprr::circulant_mechanism(*spec);
  } else {
    w = ldprr::mechanism_from_json(ReadFile(args.file));
  }

  const int k = w->size();
  const ldprr::PhiMatrix phi = ldprr::phi_matrix(*w);
  json report;
  report["mechanism"] = json::parse(ldprr::mechanism_to_json(*w));
  report["Phi"] = MatrixJson(phi.entries);
  report["phi"] = phi.phi;
  const double eps = w->epsilon();
  if (std::isfinite(eps) && eps > 0.0) {
    report["phi_star"] = ldprr::phi_star(k, eps);
    report["phi_lower_bound"] = ldprr::phi_lower_bound(k, eps);
  }
  std::cout << std::setprecision(17) << report.dump(2) << '\n';
  if (spec) {
    const double spectral = ldprr::phi_circulant_spectral(*spec);
    std::cout << "phi spectral=" << spectral << " direct=" << phi.phi
              << " abs_diff=" << std::abs(spectral - phi.phi) << '\n';
  }
  if (!args.out.empty()) Emit(args.out, ldprr::mechanism_to_json(*w) + "\n");
  return kExitOk;
}

// ---- bounds ----------------------------------------------------------------

struct BoundsArgs {
  bool feasibility = false;
  bool minmax = false;
  int k = 0;
  bool uniform = false;
  std::string p;
  std::optional<double> p0;
  EpsOptions eps;
  std::string eps_grid;
  std::string metric = "all";
  std::uint64_t seed = 0;
  std::string out;
};

std::vector<double> EpsGrid(const BoundsArgs& args) {
  if (args.eps_grid.empty()) return {args.eps.Get()};
  if (args.eps.given()) ConfigError("--eps-grid excludes --eps/--eps-exp");
  std::vector<double> parts;
  std::stringstream in(args.eps_grid);
  std::string item;
  while (std::getline(in, item, ':')) parts.push_back(ParseList(item).at(0));
  if (parts.size() != 3) ConfigError("--eps-grid expects start:stop:step");
  const double start = parts[0], stop = parts[1], step = parts[2];
  if (!(start > 0.0) || !(step > 0.0) || stop < start) ConfigError("invalid --eps-grid");
  const auto count = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> grid;
  for (int i = 0; i < count; ++i) grid.push_back(start + i * step);
  return grid;
}

int RunBounds(const BoundsArgs& args) {
  if (args.feasibility == args.minmax) ConfigError("choose one of --feasibility or --minmax");
  const std::vector<double> grid = EpsGrid(args);
  std::vector<ldprr::Metric> metrics;
  if (args.metric == "all") {
    metrics = {ldprr::Metric::kFDiv, ldprr::Metric::kMse, ldprr::Metric::kTv};
  } else {
    metrics = {ldprr::ParseMetric(args.metric)};
  }

  std::vector<ldprr::TradeoffPoint> points;
  if (args.feasibility) {
    if (args.uniform == !args.p.empty()) ConfigError("choose one of --uniform or --p");
    const ldprr::Distribution p = args.uniform
                                      ? (RequireK(args.k), ldprr::Distribution::Uniform(args.k))
                                      : ldprr::make_distribution(ToVector(ParseList(args.p)));
    if (!p.IsFullySupported()) ConfigError("source must be fully supported");
    for (auto metric : metrics) {
      auto curve = ldprr::feasibility_curve(metric, p, grid);
      points.insert(points.end(), curve.begin(), curve.end());
    }
  } else {
    RequireK(args.k);
    if (!args.p0) ConfigError("--minmax needs --p0");
    if (!(*args.p0 > 0.0) || !(*args.p0 < 1.0 / args.k)) {
      throw Error(ErrorCode::kInvalidP0, "p0 must satisfy 0 < p0 < 1/K");
    }
    for (auto metric : metrics) {
      auto curve = ldprr::minmax_curve(metric, args.k, *args.p0, grid);
      points.insert(points.end(), curve.begin(), curve.end());
    }
  }
  std::ostringstream csv;
  ldprr::write_tradeoff_csv(csv, points, args.seed);
  Emit(args.out, csv.str());
  return kExitOk;
}

// ---- simulate --------------------------------------------------------------

struct SimulateArgs {
  std::string config;
  bool escape = false;
  int k = 0;
  EpsOptions eps;
  std::string p;
  std::string n;
  std::string trials;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string out;
};

ldprr::Mechanism MechanismFromConfig(const json& cfg, int k, std::optional<double> eps) {
  const json spec = cfg.value("mechanism", json("step"));
  if (spec.is_string() && spec.get<std::string>() == "step") {
    if (!eps) ConfigError("step mechanism needs epsilon");
    return ldprr::step_mechanism(k, *eps);
  }
  if (spec.is_object() && spec.contains("circulant")) {
    return ldprr::circulant_mechanism(ldprr::CirculantSpec(
        ldprr::make_distribution(ToVector(spec["circulant"].get<std::vector<double>>()))));
  }
  if (spec.is_object() && spec.contains("matrix")) {
    return ldprr::mechanism_from_json(spec.dump());
  }
  ConfigError("mechanism must be \"step\", {\"circulant\": [...]} or a mechanism object");
}

int RunEscape(const SimulateArgs& args) {
  RequireK(args.k);
  const double eps = args.eps.Get();
  if (args.n.empty() || args.trials.empty()) ConfigError("--escape needs --n and --trials");
  const std::int64_t n = ParseCount(args.n, "--n");
  const std::int64_t trials = ParseCount(args.trials, "--trials");
  const ldprr::Distribution p = args.p.empty()
                                    ? ldprr::Distribution::Uniform(args.k)
                                    : ldprr::make_distribution(ToVector(ParseList(args.p)));
  if (p.size() != args.k) ConfigError("--p length differs from K");
  const ldprr::Mechanism w = ldprr::step_mechanism(args.k, eps);
  const std::uint64_t seed = args.seed.value_or(0);
  const auto est = ldprr::escape_probability(p, w, n, trials, seed, {args.threads});
  const double exponent = ldprr::boundary_exponent(p, w);
  json report = {{"n", n},
                 {"trials", trials},
                 {"seed", seed},
                 {"estimate", est.estimate},
                 {"std_error", est.std_error},
                 {"boundary_exponent", exponent},
                 {"bound", std::exp(-static_cast<double>(n) * exponent)}};
  std::cout << std::setprecision(17) << report.dump(2) << '\n';
  return kExitOk;
}

int RunSweep(const SimulateArgs& args) {
  json cfg;
  try {
    cfg = json::parse(ReadFile(args.config));
  } catch (const json::exception& e) {
    ConfigError(std::string("config: ") + e.what());
  }
  if (!cfg.is_object()) ConfigError("config must be a JSON object");
  try {
    const auto probs = cfg.at("p").get<std::vector<double>>();
    const ldprr::Distribution p = ldprr::make_distribution(ToVector(probs));
    if (!p.IsFullySupported()) ConfigError("source must be fully supported");
    const int k = cfg.value("k", p.size());
    if (k != p.size()) ConfigError("k differs from length of p");
    std::optional<double> eps;
    if (cfg.contains("epsilon")) eps = cfg["epsilon"].get<double>();
    if (cfg.contains("epsilon_exp")) eps = std::log(cfg["epsilon_exp"].get<double>());
    if (args.eps.given()) eps = args.eps.Get();
    if (eps && (!(*eps > 0.0) || !std::isfinite(*eps))) ConfigError("epsilon must be > 0");
    const ldprr::Mechanism w = MechanismFromConfig(cfg, k, eps);

    const auto n_grid = cfg.at("n_grid").get<std::vector<std::int64_t>>();
    std::int64_t trials = cfg.value("trials", std::int64_t{20000});
    if (!args.trials.empty()) trials = ParseCount(args.trials, "--trials");
    const std::uint64_t seed = args.seed.value_or(cfg.value("seed", std::uint64_t{0}));
    std::vector<ldprr::LossMetric> metrics;
    for (const auto& m : cfg.value("metrics", std::vector<std::string>{"kl", "mse", "tv"})) {
      metrics.push_back(ldprr::LossMetric::ByName(m));
    }
    std::vector<ldprr::Estimator> estimators;
    for (const auto& e : cfg.value("estimators", std::vector<std::string>{"ml", "mmse"})) {
      estimators.push_back(ldprr::ParseEstimator(e));
    }
    std::string out = cfg.value("output", std::string());
    if (!args.out.empty()) out = args.out;

    const auto sweep =
        ldprr::convergence_sweep(p, w, n_grid, metrics, estimators, trials, seed, {args.threads});
    std::ostringstream csv;
    ldprr::write_sweep_csv(csv, sweep);
    Emit(out, csv.str());

    // Summary on stderr when the CSV goes to stdout.
    std::ostream& log = out.empty() ? std::cerr : std::cout;
    const ldprr::Matrix phi = ldprr::phi_matrix(w).entries;
    const std::int64_t n_last = n_grid.back();
    for (const auto& metric : metrics) {
      const double predicted = ldprr::alpha(metric.metric, p, phi);
      for (auto e : estimators) {
        const auto* row = sweep.Find(n_last, metric.Name(), e);
        log << "n=" << n_last << " metric=" << metric.Name()
            << " estimator=" << ldprr::EstimatorName(e) << " normalized=" << row->normalized
            << " alpha=" << predicted
            << " rel_diff=" << std::abs(row->normalized / predicted - 1.0) << '\n';
      }
    }
  } catch (const json::exception& e) {
    ConfigError(std::string("config: ") + e.what());
  }
  return kExitOk;
}

int RunSimulate(const SimulateArgs& args) {
  if (args.escape) return RunEscape(args);
  if (args.config.empty()) ConfigError("simulate needs --config or --escape");
  return RunSweep(args);
}

// ---- estimate --------------------------------------------------------------

struct EstimateArgs {
  std::string counts;
  std::string samples;
  int k = 0;
  EpsOptions eps;
  std::string mechanism_file;
  std::string estimator = "ml";
  bool compare = false;
};

ldprr::EmpiricalType LoadType(const EstimateArgs& args, int k) {
  if (!args.counts.empty()) {
    std::vector<std::int64_t> counts;
    for (double c : ParseList(args.counts)) {
      if (c < 0.0 || c != std::floor(c)) ConfigError("counts must be nonnegative integers");
      counts.push_back(static_cast<std::int64_t>(c));
    }
    if (static_cast<int>(counts.size()) != k) {
      throw Error(ErrorCode::kOutOfAlphabet, "counts length differs from K");
    }
    return ldprr::EmpiricalType::FromCounts(std::move(counts));
  }
  std::stringstream in(ReadFile(args.samples));
  std::vector<int> samples;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      std::size_t used = 0;
      const long value = std::stol(line, &used);
      if (line.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument("");
      samples.push_back(static_cast<int>(value));
    } catch (const std::logic_error&) {
      ConfigError("sample line " + std::to_string(line_no) + " is not an integer");
    }
  }
  return ldprr::empirical_type(samples, k);
}

int RunEstimate(const EstimateArgs& args) {
  if (args.counts.empty() == args.samples.empty()) {
    ConfigError("choose one of --counts or --samples");
  }
  std::optional<ldprr::Mechanism> w;
  if (!args.mechanism_file.empty()) {
    w = ldprr::mechanism_from_json(ReadFile(args.mechanism_file));
    if (args.k != 0 && args.k != w->size()) ConfigError("-k differs from the mechanism size");
  } else {
    int k = args.k;
    if (k == 0 && !args.counts.empty()) k = static_cast<int>(ParseList(args.counts).size());
    RequireK(k);
    w = ldprr::step_mechanism(k, args.eps.Get());
  }
  const ldprr::EmpiricalType t = LoadType(args, w->size());

  json report;
  report["n"] = t.n();
  report["counts"] = t.counts();
  report["raw"] = ToStd(ldprr::raw_estimate(t, *w).values());
  std::vector<ldprr::Estimator> which;
  if (args.compare) {
    which = {ldprr::Estimator::kMl, ldprr::Estimator::kMmse};
  } else {
    which = {ldprr::ParseEstimator(args.estimator)};
  }
  for (auto e : which) {
    report[std::string(ldprr::EstimatorName(e))] =
        ToStd(ldprr::EstimatorFn(e, *w)(t).values());
  }
  std::cout << std::setprecision(17) << report.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Locally private randomized response: mechanisms, bounds, simulation, estimation"};
  app.set_version_flag("--version", std::string(ldprr::kVersion));
  app.require_subcommand(1);

  MechanismArgs mech;
  auto* mechanism = app.add_subcommand("mechanism", "build a channel and report Phi, phi");
  mechanism->add_flag("--step", mech.step, "step mechanism");
  mechanism->add_flag("--random", mech.random, "random eps-private mechanism");
  mechanism->add_option("--circulant", mech.circulant, "comma-separated first row");
  mechanism->add_option("--file", mech.file, "mechanism JSON file");
  mechanism->add_option("-k", mech.k, "alphabet size");
  mech.eps.Add(mechanism);
  mechanism->add_option("--seed", mech.seed, "seed for --random");
  mechanism->add_option("--out", mech.out, "save mechanism JSON here");

  BoundsArgs bnd;
  auto* bounds = app.add_subcommand("bounds", "privacy-fidelity trade-off bounds as CSV");
  bounds->add_flag("--feasibility", bnd.feasibility, "known source regime");
  bounds->add_flag("--minmax", bnd.minmax, "worst case over sources with entries >= p0");
  bounds->add_option("-k", bnd.k, "alphabet size");
  bounds->add_flag("--uniform", bnd.uniform, "uniform source");
  bounds->add_option("--p", bnd.p, "comma-separated source");
  bounds->add_option("--p0", bnd.p0, "minimum source probability");
  bnd.eps.Add(bounds);
  bounds->add_option("--eps-grid", bnd.eps_grid, "start:stop:step");
  bounds->add_option("--metric", bnd.metric, "fdiv | mse | tv | all");
  bounds->add_option("--seed", bnd.seed, "recorded in the CSV header");
  bounds->add_option("--out", bnd.out, "CSV path (default stdout)");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo sweeps and escape probability");
  simulate->add_option("--config", sim.config, "JSON experiment config");
  simulate->add_flag("--escape", sim.escape, "escape probability of the raw estimate");
  simulate->add_option("-k", sim.k, "alphabet size (--escape)");
  sim.eps.Add(simulate);
  simulate->add_option("--p", sim.p, "comma-separated source (--escape, default uniform)");
  simulate->add_option("--n", sim.n, "sample size (--escape)");
  simulate->add_option("--trials", sim.trials, "Monte Carlo trials");
  simulate->add_option("--seed", sim.seed, "master seed");
  simulate->add_option("--threads", sim.threads, "worker threads")->check(CLI::PositiveNumber);
  simulate->add_option("--out", sim.out, "CSV path (default from config, else stdout)");

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "estimate the source from privatized data");
  estimate->add_option("--counts", est.counts, "comma-separated output counts");
  estimate->add_option("--samples", est.samples, "file with one 1-based symbol per line");
  estimate->add_option("-k", est.k, "alphabet size");
  est.eps.Add(estimate);
  estimate->add_option("--mechanism-file", est.mechanism_file, "mechanism JSON (else step)");
  estimate->add_option("--estimator", est.estimator, "ml | mmse | raw-clipped");
  estimate->add_flag("--compare", est.compare, "ML and MMSE side by side");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*mechanism) return RunMechanism(mech);
    if (*bounds) return RunBounds(bnd);
    if (*simulate) return RunSimulate(sim);
    if (*estimate) return RunEstimate(est);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}
