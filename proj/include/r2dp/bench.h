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

// Experiment harness: queries over a dataset, synthetic data, and grids of
// (epsilon, sensitivity, metric parameter, mechanism) cells written as CSV.

#ifndef R2DP_BENCH_H_
#define R2DP_BENCH_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "r2dp/mechanisms.h"
#include "r2dp/optimizer.h"
#include "r2dp/random.h"
#include "r2dp/utility_metrics.h"

namespace r2dp {

enum class QueryKind { kCount, kMovingAverage };

struct QuerySpec {
  QueryKind kind = QueryKind::kCount;
  // Moving average over the last `window` values, each clipped to [0, scale].
  int window = 1;
  double scale = 1.0;
  double declared_sensitivity = 1.0;

  // Sensitivity implied by the query itself: 1 for a count, scale / window
  // for a moving average.
  double NaturalSensitivity() const;
  // A count must declare exactly 1; a moving average must declare at least
  // scale / window.
  void Validate() const;
};

// True statistic. EmptyDataset for an empty input.
double EvaluateQuery(const std::vector<double>& dataset, const QuerySpec& query);

// True statistic plus one mechanism draw.
double RunQuery(const std::vector<double>& dataset, const QuerySpec& query,
                const NoiseMechanism& mechanism, Rng& rng);

enum class SyntheticKind { kConstantStream, kPoissonCounts, kHistogram50 };

struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::kPoissonCounts;
  double value = 1.0;              // constant stream
  double rate = 5.0;               // Poisson counts
  std::string shape = "gaussian";  // histogram50: uniform, gaussian or exponential
};

// ConstantStream and PoissonCounts give n values. Histogram50 bins n records
// drawn from `shape` on [0, 50) and returns the 50 bin masses.
std::vector<double> GenerateSynthetic(const SyntheticSpec& spec, std::size_t n, uint64_t seed);

// Masses on unit bins [0, 1), [1, 2), ...
Histogram UnitBinHistogram(const std::vector<double>& masses);

// One numeric column; a non-numeric first line is taken as a header.
std::vector<double> ReadDatasetCsv(std::istream& in);
std::vector<double> ReadDatasetCsvFile(const std::string& path);

struct ExperimentGrid {
  std::vector<double> epsilons;
  std::vector<double> sensitivities;
  // Metric and fixed settings; `metric_params` sweeps gamma, p or alpha.
  UtilityGoal goal;
  std::vector<double> metric_params;
  // Any of "r2dp", "laplace", "staircase", in output order.
  std::vector<std::string> mechanisms = {"r2dp", "laplace", "staircase"};
  long long trials = 10000;
  uint64_t seed = 1;
  QuerySpec query;

  void Validate() const;
};

struct GridRow {
  double epsilon_target = 0.0;
  double epsilon_achieved = 0.0;
  double sensitivity = 0.0;
  std::string metric;
  double metric_param = 0.0;
  std::string mechanism;
  double utility_analytic = 0.0;
  double utility_empirical = 0.0;
  double utility_stderr = 0.0;
  long long trials = 0;
  uint64_t seed = 0;
  double wall_ms = 0.0;
  std::string error;
  // Calibrated combination of r2dp rows.
  std::string combo;
};

struct GridResult {
  std::vector<GridRow> rows;
  long long mechanism_draws = 0;
  int failed_rows = 0;
};

// Rows in enumeration order epsilon, sensitivity, metric parameter,
// mechanism. A failing cell records its message and the run continues.
// `timing` fills wall_ms; otherwise it stays 0 so output is reproducible.
GridResult RunGrid(const ExperimentGrid& grid, const SearchSpaceSpec& spec,
                   const std::vector<double>& dataset, bool timing = false);

inline constexpr const char* kGridCsvHeader =
    "epsilon_target,epsilon_achieved,sensitivity,metric,metric_param,mechanism,"
    "utility_analytic,utility_empirical,utility_stderr,trials,seed,wall_ms,error";

void WriteGridCsv(const GridResult& result, std::ostream& out);

// r2dp rows as "epsilon_target,sensitivity,metric_param,combo".
void WriteGridRecords(const GridResult& result, std::ostream& out);

struct BenchConfig {
  ExperimentGrid grid;
  SearchSpaceSpec search;
  std::vector<double> dataset;
};

// INI config; see configs/ for the documented keys. Relative paths resolve
// against `base_dir`. Throws ParseError or InvalidArgument.
BenchConfig LoadBenchConfig(std::istream& in, const std::string& base_dir = ".");
BenchConfig LoadBenchConfigFile(const std::string& path);

// "gamma, uniform" -> slots with default boxes.
std::vector<FamilySlot> ParseFamilies(const std::string& list);

}  // namespace r2dp

#endif  // R2DP_BENCH_H_
