//
// Copyright 2026 The R2DP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "r2dp/bench.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "fmt/format.h"
#include "r2dp/errors.h"
#include "r2dp/privacy_analysis.h"
#include "r2dp/serialization.h"

namespace r2dp {
namespace {

using boost::property_tree::ptree;

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> items;
  boost::split(items, text, boost::is_any_of(","));
  for (std::string& item : items) boost::trim(item);
  items.erase(std::remove(items.begin(), items.end(), std::string()), items.end());
  return items;
}

std::vector<double> ParseNumberList(const std::string& text) {
  std::vector<double> values;
  for (const std::string& item : SplitList(text)) values.push_back(ParseNumber(item));
  return values;
}

std::string CsvField(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c == '\n' ? ' ' : c;
  }
  return quoted + "\"";
}

// Typed getters that report the offending key.
template <class T>
T Required(const ptree& tree, const std::string& key) {
  const auto value = tree.get_optional<std::string>(key);
  if (!value) throw ParseError(fmt::format("config is missing '{}'", key));
  try {
    if constexpr (std::is_same_v<T, std::string>) {
      return boost::trim_copy(*value);
    } else {
      return static_cast<T>(ParseNumber(*value));
    }
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("config key '{}': {}", key, e.what()));
  }
}

template <class T>
T Optional(const ptree& tree, const std::string& key, T fallback) {
  return tree.get_optional<std::string>(key) ? Required<T>(tree, key) : fallback;
}

uint64_t RequiredSeed(const ptree& tree, const std::string& key, uint64_t fallback) {
  const auto value = tree.get_optional<std::string>(key);
  if (!value) return fallback;
  try {
    return std::stoull(boost::trim_copy(*value));
  } catch (const std::exception&) {
    throw ParseError(fmt::format("config key '{}' must be a non-negative integer", key));
  }
}

}  // namespace

double QuerySpec::NaturalSensitivity() const {
  return kind == QueryKind::kCount ? 1.0 : scale / static_cast<double>(window);
}

void QuerySpec::Validate() const {
  if (!(declared_sensitivity > 0.0) || !std::isfinite(declared_sensitivity)) {
    throw InvalidArgument("declared sensitivity must be positive and finite");
  }
  if (kind == QueryKind::kCount) {
    if (declared_sensitivity != 1.0) {
      throw InvalidArgument(fmt::format("a count query has sensitivity 1, not {}",
                                        declared_sensitivity));
    }
    return;
  }
  if (window < 1) throw InvalidArgument("moving-average window must be >= 1");
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw InvalidArgument("moving-average scale must be positive and finite");
  }
  if (declared_sensitivity < NaturalSensitivity() * (1.0 - 1e-12)) {
    throw InvalidArgument(fmt::format(
        "declared sensitivity {} is below the moving average's sensitivity {}",
        declared_sensitivity, NaturalSensitivity()));
  }
}

double EvaluateQuery(const std::vector<double>& dataset, const QuerySpec& query) {
  if (dataset.empty()) throw EmptyDataset("query over an empty dataset");
  if (query.kind == QueryKind::kCount) return static_cast<double>(dataset.size());
  // Average of the most recent `window` values; a short stream is padded
  // with zeros so the denominator, and with it the sensitivity, stays fixed.
  const std::size_t window = static_cast<std::size_t>(query.window);
  const std::size_t first = dataset.size() > window ? dataset.size() - window : 0;
  double sum = 0.0;
  for (std::size_t i = first; i < dataset.size(); ++i) {
    sum += std::clamp(dataset[i], 0.0, query.scale);
  }
  return sum / static_cast<double>(window);
}

double RunQuery(const std::vector<double>& dataset, const QuerySpec& query,
                const NoiseMechanism& mechanism, Rng& rng) {
  return Perturb(mechanism, EvaluateQuery(dataset, query), rng);
}

std::vector<double> GenerateSynthetic(const SyntheticSpec& spec, std::size_t n, uint64_t seed) {
  if (n < 1) throw InvalidArgument("synthetic datasets need n >= 1");
  Rng rng = DeriveStream(seed, 0);
  std::vector<double> data;
  switch (spec.kind) {
    case SyntheticKind::kConstantStream:
      data.assign(n, spec.value);
      break;
    case SyntheticKind::kPoissonCounts: {
      if (!(spec.rate > 0.0)) throw InvalidArgument("Poisson rate must be > 0");
      std::poisson_distribution<long long> poisson(spec.rate);
      data.reserve(n);
      for (std::size_t i = 0; i < n; ++i) data.push_back(static_cast<double>(poisson(rng)));
      break;
    }
    case SyntheticKind::kHistogram50: {
      std::vector<double> counts(50, 0.0);
      std::normal_distribution<double> normal(25.0, 8.0);
      std::exponential_distribution<double> exponential(0.1);
      for (std::size_t i = 0; i < n; ++i) {
        double x = -1.0;
        while (!(x >= 0.0 && x < 50.0)) {
          if (spec.shape == "uniform") {
            x = 50.0 * OpenUniform(rng);
          } else if (spec.shape == "gaussian") {
            x = normal(rng);
          } else if (spec.shape == "exponential") {
            x = exponential(rng);
          } else {
            throw InvalidArgument(fmt::format("unknown histogram shape '{}'", spec.shape));
          }
        }
        counts[static_cast<std::size_t>(x)] += 1.0;
      }
      for (double& c : counts) c /= static_cast<double>(n);
      data = std::move(counts);
      break;
    }
  }
  return data;
}

Histogram UnitBinHistogram(const std::vector<double>& masses) {
  Histogram histogram;
  histogram.masses = masses;
  for (std::size_t i = 0; i <= masses.size(); ++i) {
    histogram.bin_edges.push_back(static_cast<double>(i));
  }
  // Tolerate rounding in the input before validating.
  double total = 0.0;
  for (double m : histogram.masses) total += m;
  if (total > 0.0) {
    for (double& m : histogram.masses) m /= total;
  }
  histogram.Validate();
  return histogram;
}

std::vector<double> ReadDatasetCsv(std::istream& in) {
  std::vector<double> data;
  std::string line;
  bool first = true;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::string field = line.substr(0, line.find(','));
    boost::trim(field);
    if (field.empty()) continue;
    try {
      data.push_back(ParseNumber(field));
    } catch (const ParseError&) {
      if (!first) {
        throw ParseError(fmt::format("dataset line {}: '{}' is not a number", line_number,
                                     field));
      }
    }
    first = false;
  }
  return data;
}

std::vector<double> ReadDatasetCsvFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open dataset '{}'", path));
  return ReadDatasetCsv(in);
}

void ExperimentGrid::Validate() const {
  if (epsilons.empty() || sensitivities.empty()) {
    throw InvalidArgument("grid needs at least one epsilon and one sensitivity");
  }
  for (double e : epsilons) PrivacySpec{e, 1.0}.Validate();
  for (double d : sensitivities) {
    PrivacySpec{1.0, d}.Validate();
    QuerySpec declared = query;
    declared.declared_sensitivity = d;
    declared.Validate();
  }
  if (trials < 1) throw InvalidArgument("grid trials must be >= 1");
  if (mechanisms.empty()) throw InvalidArgument("grid needs at least one mechanism");
  for (const std::string& m : mechanisms) {
    if (m != "r2dp" && m != "laplace" && m != "staircase") {
      throw InvalidArgument(fmt::format("unknown grid mechanism '{}'", m));
    }
  }
  const bool parametric = goal.metric == Metric::kUsefulness ||
                          goal.metric == Metric::kMallows ||
                          goal.metric == Metric::kRenyiDivergence;
  if (parametric && metric_params.empty()) {
    throw InvalidArgument("grid needs metric parameters for this metric");
  }
}

namespace {

struct CellTask {
  double epsilon;
  double sensitivity;
  UtilityGoal goal;
  uint64_t seed;
  std::size_t mechanism_index;
};

// One row: calibrate, compute the analytic utility, then `trials` draws.
GridRow RunRow(const ExperimentGrid& grid, const SearchSpaceSpec& spec,
               const std::vector<double>& dataset, const CellTask& task, bool timing,
               long long* draws) {
  const auto start = std::chrono::steady_clock::now();
  const UtilityGoal& goal = task.goal;
  const EvaluationOptions options{spec.constraint_tol, spec.eval_seed, spec.eval_trials};
  const PrivacySpec privacy{task.epsilon, task.sensitivity};
  QuerySpec query = grid.query;
  query.declared_sensitivity = task.sensitivity;
  GridRow row;
  row.epsilon_target = task.epsilon;
  row.sensitivity = task.sensitivity;
  row.metric = std::string(MetricName(goal.metric));
  row.metric_param = goal.Parameter();
  row.mechanism = grid.mechanisms[task.mechanism_index];
  row.seed = task.seed;
  try {
    query.Validate();
    goal.Validate();
    NoiseMechanism mechanism = LaplaceMechanism{task.sensitivity / task.epsilon};
    if (row.mechanism == "r2dp") {
      const CalibratedMechanism calibrated = Optimize(spec, privacy, goal, task.seed);
      mechanism = R2dpMechanism{calibrated.combo};
      row.utility_analytic = calibrated.predicted_utility;
      row.epsilon_achieved = calibrated.achieved_epsilon;
      row.combo = FormatCombo(calibrated.combo);
    } else if (row.mechanism == "laplace") {
      const CandidateEvaluation eval =
          EvaluateCandidate(LaplaceSeed(privacy), privacy, goal, options);
      row.utility_analytic = eval.utility;
      row.epsilon_achieved = eval.epsilon;
    } else {
      mechanism = StaircaseMechanism{task.epsilon, task.sensitivity};
      row.utility_analytic = StaircaseUtility(privacy, goal, options);
      row.epsilon_achieved = task.epsilon;
    }
    const double truth = EvaluateQuery(dataset, query);
    const NoiseSampler noise = [&](Rng& rng) {
      ++*draws;
      return RunQuery(dataset, query, mechanism, rng) - truth;
    };
    Rng rng = DeriveStream(task.seed, 1 + task.mechanism_index);
    const MonteCarloEstimate estimate = ExpectedMetricEmpirical(noise, goal, grid.trials, rng);
    row.utility_empirical = estimate.mean;
    row.utility_stderr = estimate.std_error;
    row.trials = grid.trials;
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  if (timing) {
    row.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
  }
  return row;
}

}  // namespace

GridResult RunGrid(const ExperimentGrid& grid, const SearchSpaceSpec& spec,
                   const std::vector<double>& dataset, bool timing) {
  grid.Validate();
  std::vector<double> params = grid.metric_params;
  if (grid.goal.metric == Metric::kL1 || grid.goal.metric == Metric::kKlDivergence ||
      grid.goal.metric == Metric::kL2 || params.empty()) {
    params = {grid.goal.Parameter()};
  }
  std::vector<CellTask> tasks;
  uint64_t cell = 0;
  for (double epsilon : grid.epsilons) {
    for (double sensitivity : grid.sensitivities) {
      for (double param : params) {
        const uint64_t cell_seed = DeriveSeed(grid.seed, cell++);
        UtilityGoal goal = grid.goal;
        if (goal.metric == Metric::kUsefulness) goal.gamma = param;
        if (goal.metric == Metric::kMallows) goal.p = param;
        if (goal.metric == Metric::kRenyiDivergence) goal.alpha = param;
        for (std::size_t m = 0; m < grid.mechanisms.size(); ++m) {
          tasks.push_back({epsilon, sensitivity, goal, cell_seed, m});
        }
      }
    }
  }

  // Rows depend only on their own seed, so workers may finish in any order;
  // results land in their enumeration slot.
  GridResult result;
  result.rows.resize(tasks.size());
  std::vector<long long> draws(tasks.size(), 0);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      result.rows[i] = RunRow(grid, spec, dataset, tasks[i], timing, &draws[i]);
    }
  };
  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, tasks.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  for (std::size_t i = 0; i < tasks.size(); ++i) {
    result.mechanism_draws += draws[i];
    if (!result.rows[i].error.empty()) ++result.failed_rows;
  }
  return result;
}

void WriteGridCsv(const GridResult& result, std::ostream& out) {
  out << kGridCsvHeader << '\n';
  for (const GridRow& r : result.rows) {
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", FormatNumber(r.epsilon_target),
                       FormatNumber(r.epsilon_achieved), FormatNumber(r.sensitivity), r.metric,
                       FormatNumber(r.metric_param), r.mechanism,
                       FormatNumber(r.utility_analytic), FormatNumber(r.utility_empirical),
                       FormatNumber(r.utility_stderr), r.trials, r.seed,
                       FormatNumber(std::round(r.wall_ms * 1000.0) / 1000.0),
                       CsvField(r.error));
  }
}

void WriteGridRecords(const GridResult& result, std::ostream& out) {
  out << "epsilon_target,sensitivity,metric_param,combo\n";
  for (const GridRow& r : result.rows) {
    if (r.combo.empty()) continue;
    out << fmt::format("{},{},{},{}\n", FormatNumber(r.epsilon_target),
                       FormatNumber(r.sensitivity), FormatNumber(r.metric_param),
                       CsvField(r.combo));
  }
}

std::vector<FamilySlot> ParseFamilies(const std::string& list) {
  std::vector<FamilySlot> slots;
  for (const std::string& name : SplitList(list)) slots.push_back(DefaultSlot(FamilyFromName(name)));
  if (slots.empty()) throw ParseError("family list is empty");
  return slots;
}

BenchConfig LoadBenchConfig(std::istream& in, const std::string& base_dir) {
  ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ParseError(fmt::format("malformed config: {}", e.what()));
  }
  const auto resolve = [&base_dir](const std::string& path) {
    const std::filesystem::path p(path);
    return p.is_absolute() ? path : (std::filesystem::path(base_dir) / p).string();
  };
  BenchConfig config;

  // [data]
  const std::string data_kind = Optional<std::string>(tree, "data.kind", "poisson");
  const auto n = Optional<std::size_t>(tree, "data.n", 1000);
  const uint64_t data_seed = RequiredSeed(tree, "data.seed", 1);
  SyntheticSpec synthetic;
  synthetic.value = Optional<double>(tree, "data.value", synthetic.value);
  synthetic.rate = Optional<double>(tree, "data.rate", synthetic.rate);
  synthetic.shape = Optional<std::string>(tree, "data.shape", synthetic.shape);
  if (data_kind == "csv") {
    config.dataset = ReadDatasetCsvFile(resolve(Required<std::string>(tree, "data.path")));
  } else if (data_kind == "constant") {
    synthetic.kind = SyntheticKind::kConstantStream;
    config.dataset = GenerateSynthetic(synthetic, n, data_seed);
  } else if (data_kind == "poisson") {
    synthetic.kind = SyntheticKind::kPoissonCounts;
    config.dataset = GenerateSynthetic(synthetic, n, data_seed);
  } else if (data_kind == "histogram50") {
    synthetic.kind = SyntheticKind::kHistogram50;
    config.dataset = GenerateSynthetic(synthetic, n, data_seed);
  } else {
    throw ParseError(fmt::format("unknown data kind '{}'", data_kind));
  }

  // [query]
  QuerySpec& query = config.grid.query;
  const std::string query_kind = Optional<std::string>(tree, "query.kind", "count");
  if (query_kind == "count") {
    query.kind = QueryKind::kCount;
  } else if (query_kind == "moving_average") {
    query.kind = QueryKind::kMovingAverage;
    query.window = Required<int>(tree, "query.window");
    query.scale = Required<double>(tree, "query.scale");
  } else {
    throw ParseError(fmt::format("unknown query kind '{}'", query_kind));
  }

  // [grid]
  ExperimentGrid& grid = config.grid;
  grid.epsilons = ParseNumberList(Required<std::string>(tree, "grid.epsilons"));
  grid.sensitivities = ParseNumberList(Required<std::string>(tree, "grid.sensitivities"));
  grid.goal.metric = MetricFromName(Optional<std::string>(tree, "grid.metric", "usefulness"));
  grid.metric_params = ParseNumberList(Optional<std::string>(tree, "grid.params", ""));
  const std::string mechanisms = Optional<std::string>(tree, "grid.mechanisms", "");
  if (!mechanisms.empty()) grid.mechanisms = SplitList(mechanisms);
  grid.trials = Optional<long long>(tree, "grid.trials", grid.trials);
  grid.seed = RequiredSeed(tree, "grid.seed", grid.seed);
  grid.goal.records = Optional<double>(tree, "grid.records", grid.goal.records);
  if (grid.goal.metric == Metric::kMallows) grid.goal.prior_vector = config.dataset;
  if (grid.goal.metric == Metric::kKlDivergence || grid.goal.metric == Metric::kRenyiDivergence) {
    const std::string prior = Optional<std::string>(tree, "grid.prior_histogram", "");
    if (!prior.empty()) {
      grid.goal.prior_histogram = ReadHistogramFile(resolve(prior));
    } else if (data_kind == "histogram50") {
      grid.goal.prior_histogram = UnitBinHistogram(config.dataset);
    } else {
      throw ParseError("kl and renyi grids need grid.prior_histogram or data.kind = histogram50");
    }
  }
  grid.Validate();

  // [search]
  SearchSpaceSpec& search = config.search;
  search = SearchSpaceSpec::Default(Optional<std::string>(tree, "search.extended", "false") ==
                                    "true");
  const std::string families = Optional<std::string>(tree, "search.families", "");
  if (!families.empty()) search.slots = ParseFamilies(families);
  search.restarts = Optional<int>(tree, "search.restarts", search.restarts);
  search.max_evals = Optional<int>(tree, "search.max_evals", search.max_evals);
  search.constraint_tol = Optional<double>(tree, "search.constraint_tol", search.constraint_tol);
  search.coefficient_min =
      Optional<double>(tree, "search.coefficient_min", search.coefficient_min);
  search.coefficient_max =
      Optional<double>(tree, "search.coefficient_max", search.coefficient_max);
  search.eval_seed = RequiredSeed(tree, "search.eval_seed", search.eval_seed);
  search.eval_trials = Optional<long long>(tree, "search.eval_trials", search.eval_trials);
  // Optional box overrides: [box.<family>] <parameter> = lower, upper
  for (FamilySlot& slot : search.slots) {
    // Section names contain a dot, so look them up with a different separator.
    const auto section = tree.get_child_optional(
        ptree::path_type("box." + std::string(FamilyName(slot.family)), '/'));
    if (!section) continue;
    for (const auto& [key, value] : *section) {
      auto it = std::find_if(slot.boxes.begin(), slot.boxes.end(),
                             [&key = key](const ParameterBox& b) { return b.name == key; });
      if (it == slot.boxes.end()) {
        throw ParseError(fmt::format("{} has no searchable parameter '{}'",
                                     FamilyName(slot.family), key));
      }
      const std::vector<double> bounds = ParseNumberList(value.data());
      if (bounds.size() != 2) {
        throw ParseError(fmt::format("box for '{}' needs 'lower, upper'", key));
      }
      it->lower = bounds[0];
      it->upper = bounds[1];
    }
  }
  search.Validate();
  return config;
}

BenchConfig LoadBenchConfigFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open config '{}'", path));
  return LoadBenchConfig(in, std::filesystem::path(path).parent_path().string());
}

}  // namespace r2dp
