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

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "gtest/gtest.h"
#include "r2dp/bench.h"
#include "r2dp/errors.h"
#include "r2dp/serialization.h"
#include "test_support.h"

namespace r2dp {
namespace {

TEST(QueryTest, Validation) {
  QuerySpec count;
  EXPECT_NO_THROW(count.Validate());
  count.declared_sensitivity = 2;
  EXPECT_THROW(count.Validate(), InvalidArgument);

  QuerySpec average;
  average.kind = QueryKind::kMovingAverage;
  average.window = 30;
  average.scale = 15;
  average.declared_sensitivity = 0.5;
  EXPECT_DOUBLE_EQ(average.NaturalSensitivity(), 0.5);
  EXPECT_NO_THROW(average.Validate());
  average.declared_sensitivity = 0.4;
  EXPECT_THROW(average.Validate(), InvalidArgument);
  average.declared_sensitivity = 1;
  average.window = 0;
  EXPECT_THROW(average.Validate(), InvalidArgument);
}

TEST(QueryTest, Evaluate) {
  QuerySpec count;
  EXPECT_EQ(EvaluateQuery(std::vector<double>(100, 3.0), count), 100);
  EXPECT_THROW(EvaluateQuery({}, count), EmptyDataset);

  QuerySpec average;
  average.kind = QueryKind::kMovingAverage;
  average.window = 10;
  average.scale = 10;
  average.declared_sensitivity = 1;
  EXPECT_DOUBLE_EQ(EvaluateQuery(std::vector<double>(50, 1.0), average), 1.0);
  // Values are clipped to [0, scale] and only the last window counts.
  std::vector<double> data(20, 100.0);
  for (int i = 10; i < 20; ++i) data[i] = i % 2 ? -5.0 : 40.0;
  EXPECT_DOUBLE_EQ(EvaluateQuery(data, average), 5.0);
}

TEST(QueryTest, CountWithDegenerateMixingMatchesLaplaceUsefulness) {
  const std::vector<double> data(100, 1.0);
  const NoiseMechanism mechanism = R2dpMechanism{LinearCombo::Singleton(MgfDist::Degenerate(1))};
  Rng rng(42);
  const int trials = 100000;
  const double gamma = 0.7;
  int hits = 0;
  for (int i = 0; i < trials; ++i) {
    hits += std::abs(RunQuery(data, QuerySpec{}, mechanism, rng) - 100) <= gamma;
  }
  const double expected = -std::expm1(-gamma);
  const double se = std::sqrt(expected * (1 - expected) / trials);
  EXPECT_NEAR(static_cast<double>(hits) / trials, expected, 4 * se);
}

TEST(SyntheticTest, Kinds) {
  SyntheticSpec constant{.kind = SyntheticKind::kConstantStream, .value = 2.5};
  EXPECT_EQ(GenerateSynthetic(constant, 7, 1), std::vector<double>(7, 2.5));

  SyntheticSpec poisson{.kind = SyntheticKind::kPoissonCounts, .rate = 5};
  const std::vector<double> counts = GenerateSynthetic(poisson, 100000, 3);
  const double mean = std::accumulate(counts.begin(), counts.end(), 0.0) / counts.size();
  EXPECT_NEAR(mean, 5, 0.1);
  EXPECT_EQ(counts, GenerateSynthetic(poisson, 100000, 3));
  EXPECT_NE(counts, GenerateSynthetic(poisson, 100000, 4));

  for (const char* shape : {"uniform", "gaussian", "exponential"}) {
    SyntheticSpec hist{.kind = SyntheticKind::kHistogram50, .shape = shape};
    const std::vector<double> masses = GenerateSynthetic(hist, 5000, 9);
    ASSERT_EQ(masses.size(), 50u);
    EXPECT_NEAR(std::accumulate(masses.begin(), masses.end(), 0.0), 1.0, 1e-12) << shape;
    for (double m : masses) EXPECT_GE(m, 0.0);
  }
  SyntheticSpec bad{.kind = SyntheticKind::kHistogram50, .shape = "cauchy"};
  EXPECT_THROW(GenerateSynthetic(bad, 10, 1), InvalidArgument);
}

TEST(SyntheticTest, UnitBins) {
  const Histogram h = UnitBinHistogram({0.25, 0.75});
  EXPECT_EQ(h.bin_edges, (std::vector<double>{0, 1, 2}));
  EXPECT_EQ(h.masses, (std::vector<double>{0.25, 0.75}));
}

TEST(CsvTest, HeaderAndFirstColumn) {
  std::istringstream with_header("value,label\n1.5,a\n2,b\n\n-3,c\n");
  EXPECT_EQ(ReadDatasetCsv(with_header), (std::vector<double>{1.5, 2, -3}));
  std::istringstream bare("4\n5\n");
  EXPECT_EQ(ReadDatasetCsv(bare), (std::vector<double>{4, 5}));
  std::istringstream broken("1\nx\n");
  EXPECT_THROW(ReadDatasetCsv(broken), ParseError);
  EXPECT_THROW(ReadDatasetCsvFile("/nonexistent/data.csv"), ParseError);
}

ExperimentGrid SmallGrid() {
  ExperimentGrid grid;
  grid.epsilons = {0.5, 2};
  grid.sensitivities = {1};
  grid.metric_params = {0.4, 0.9};
  grid.trials = 20000;
  grid.seed = 17;
  return grid;
}

SearchSpaceSpec FastSearch() {
  SearchSpaceSpec spec = SearchSpaceSpec::Default();
  spec.restarts = 2;
  spec.max_evals = 200;
  return spec;
}

TEST(GridTest, LaplaceRowIsAnalytic) {
  ExperimentGrid grid;
  grid.epsilons = {1.5};
  grid.sensitivities = {1};
  grid.metric_params = {0.6};
  grid.mechanisms = {"laplace"};
  grid.trials = 100000;
  const GridResult result = RunGrid(grid, FastSearch(), {1, 2, 3});
  ASSERT_EQ(result.rows.size(), 1u);
  const GridRow& row = result.rows[0];
  EXPECT_EQ(row.error, "");
  EXPECT_NEAR(row.utility_analytic, -std::expm1(-0.6 * 1.5), 1e-14);
  EXPECT_NEAR(row.epsilon_achieved, 1.5, 1e-14);
  EXPECT_NEAR(row.utility_empirical, row.utility_analytic, 4 * row.utility_stderr);
  EXPECT_EQ(result.mechanism_draws, 100000);
  EXPECT_EQ(row.wall_ms, 0);
}

TEST(GridTest, OrderingDominanceAndDraws) {
  const ExperimentGrid grid = SmallGrid();
  const GridResult result = RunGrid(grid, FastSearch(), std::vector<double>(10, 1.0));
  ASSERT_EQ(result.rows.size(), 2u * 2u * 3u);
  EXPECT_EQ(result.failed_rows, 0);
  EXPECT_EQ(result.mechanism_draws, 12 * grid.trials);
  for (std::size_t i = 0; i < result.rows.size(); i += 3) {
    const GridRow& r2dp = result.rows[i];
    const GridRow& laplace = result.rows[i + 1];
    const GridRow& staircase = result.rows[i + 2];
    EXPECT_EQ(r2dp.mechanism, "r2dp");
    EXPECT_EQ(laplace.mechanism, "laplace");
    EXPECT_EQ(staircase.mechanism, "staircase");
    EXPECT_EQ(r2dp.epsilon_target, laplace.epsilon_target);
    EXPECT_EQ(r2dp.metric_param, staircase.metric_param);
    EXPECT_GE(r2dp.utility_analytic, laplace.utility_analytic - 1e-9);
    EXPECT_NE(r2dp.combo, "");
    EXPECT_NO_THROW(ParseCombo(r2dp.combo));
    for (const GridRow* row : {&r2dp, &laplace, &staircase}) {
      EXPECT_NEAR(row->utility_empirical, row->utility_analytic,
                  5 * row->utility_stderr + 1e-12);
    }
  }
  EXPECT_EQ(result.rows[0].epsilon_target, 0.5);
  EXPECT_EQ(result.rows[3].metric_param, 0.9);
  EXPECT_EQ(result.rows[6].epsilon_target, 2);
}

TEST(GridTest, CsvIsDeterministic) {
  const ExperimentGrid grid = SmallGrid();
  std::ostringstream a, b, records;
  const GridResult first = RunGrid(grid, FastSearch(), {1.0});
  WriteGridCsv(first, a);
  WriteGridCsv(RunGrid(grid, FastSearch(), {1.0}), b);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')), kGridCsvHeader);
  WriteGridRecords(first, records);
  const std::string text = records.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "epsilon_target,sensitivity,metric_param,combo");
  // Header plus one line per r2dp row.
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 4);
}

TEST(GridTest, StaircaseBeatsLaplaceL2InLowPrivacyRegime) {
  ExperimentGrid grid;
  grid.epsilons = {4, 6, 8};
  grid.sensitivities = {1};
  grid.goal.metric = Metric::kL2;
  grid.mechanisms = {"laplace", "staircase"};
  grid.trials = 1000;
  const GridResult result = RunGrid(grid, FastSearch(), {1.0});
  ASSERT_EQ(result.rows.size(), 6u);
  for (std::size_t i = 0; i < result.rows.size(); i += 2) {
    EXPECT_LT(result.rows[i + 1].utility_analytic, result.rows[i].utility_analytic);
  }
}

TEST(GridTest, FailingCellIsRecorded) {
  ExperimentGrid grid = SmallGrid();
  // A Mallows goal without a prior cannot be evaluated.
  grid.goal.metric = Metric::kMallows;
  grid.metric_params = {1};
  grid.mechanisms = {"laplace", "r2dp"};
  grid.trials = 100;
  const GridResult result = RunGrid(grid, FastSearch(), {1.0});
  ASSERT_EQ(result.rows.size(), 4u);
  EXPECT_EQ(result.failed_rows, 4);
  for (const GridRow& row : result.rows) EXPECT_NE(row.error, "");
}

TEST(GridTest, Validation) {
  ExperimentGrid grid = SmallGrid();
  EXPECT_NO_THROW(grid.Validate());
  grid.mechanisms = {"laplace", "exponential"};
  EXPECT_THROW(grid.Validate(), InvalidArgument);
  grid = SmallGrid();
  grid.epsilons = {};
  EXPECT_THROW(grid.Validate(), InvalidArgument);
  grid = SmallGrid();
  grid.trials = 0;
  EXPECT_THROW(grid.Validate(), InvalidArgument);
  grid = SmallGrid();
  grid.query.kind = QueryKind::kMovingAverage;
  grid.query.window = 10;
  grid.query.scale = 20;
  EXPECT_THROW(grid.Validate(), InvalidArgument);
  grid.sensitivities = {2, 4};
  EXPECT_NO_THROW(grid.Validate());
}

constexpr const char* kConfig = R"(
[data]
kind = constant
n = 40
value = 3

[query]
kind = moving_average
window = 20
scale = 10

[grid]
epsilons = 0.5, 1
sensitivities = 0.5
metric = l1
mechanisms = laplace, r2dp
trials = 500
seed = 12

[search]
families = gamma, uniform
restarts = 3
max_evals = 300

[box.gamma]
k = 2, 30
)";

TEST(ConfigTest, Parses) {
  std::istringstream in(kConfig);
  const BenchConfig config = LoadBenchConfig(in);
  EXPECT_EQ(config.dataset, std::vector<double>(40, 3.0));
  EXPECT_EQ(config.grid.query.kind, QueryKind::kMovingAverage);
  EXPECT_EQ(config.grid.query.window, 20);
  EXPECT_EQ(config.grid.epsilons, (std::vector<double>{0.5, 1}));
  EXPECT_EQ(config.grid.goal.metric, Metric::kL1);
  EXPECT_EQ(config.grid.mechanisms, (std::vector<std::string>{"laplace", "r2dp"}));
  EXPECT_EQ(config.grid.trials, 500);
  EXPECT_EQ(config.grid.seed, 12u);
  ASSERT_EQ(config.search.slots.size(), 2u);
  EXPECT_EQ(config.search.slots[0].family, Family::kGamma);
  EXPECT_EQ(config.search.slots[0].boxes[0].lower, 2);
  EXPECT_EQ(config.search.slots[0].boxes[0].upper, 30);
  EXPECT_EQ(config.search.restarts, 3);
  EXPECT_EQ(config.search.max_evals, 300);
}

void ExpectConfigError(const std::string& from, const std::string& to) {
  std::string text = kConfig;
  text.replace(text.find(from), from.size(), to);
  std::istringstream in(text);
  EXPECT_ANY_THROW(LoadBenchConfig(in)) << to;
}

TEST(ConfigTest, Errors) {
  ExpectConfigError("kind = constant", "kind = parquet");
  ExpectConfigError("epsilons = 0.5, 1", "epsilons = 0.5, x");
  ExpectConfigError("epsilons = 0.5, 1", "epsilon = 1");
  ExpectConfigError("metric = l1", "metric = l3");
  ExpectConfigError("k = 2, 30", "theta = 2, 30");
  ExpectConfigError("k = 2, 30", "k = 2");
  ExpectConfigError("sensitivities = 0.5", "sensitivities = 0.25");
  ExpectConfigError("metric = l1", "metric = kl");
  ExpectConfigError("[data]", "[data\n");
}

TEST(ConfigTest, RelativeCsvPath) {
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / ("r2dp_bench_test_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "data.csv") << "count\n2\n4\n";
  std::ofstream(dir / "grid.ini") << "[data]\nkind = csv\npath = data.csv\n"
                                  << "[grid]\nepsilons = 1\nsensitivities = 1\nparams = 1\n";
  const BenchConfig config = LoadBenchConfigFile((dir / "grid.ini").string());
  EXPECT_EQ(config.dataset, (std::vector<double>{2, 4}));
  std::filesystem::remove_all(dir);
}

TEST(ConfigTest, ShippedConfigLoads) {
  const BenchConfig config = LoadBenchConfigFile(R2DP_SOURCE_DIR "/configs/usefulness_grid.ini");
  EXPECT_EQ(config.grid.mechanisms.size(), 3u);
  EXPECT_EQ(config.grid.query.kind, QueryKind::kMovingAverage);
  EXPECT_EQ(config.dataset.size(), 1000u);
}

TEST(ParseFamiliesTest, Names) {
  const std::vector<FamilySlot> slots = ParseFamilies(" gamma,trunc_gaussian ");
  ASSERT_EQ(slots.size(), 2u);
  EXPECT_EQ(slots[1].family, Family::kTruncGaussian);
  EXPECT_THROW(ParseFamilies("gamma, weibull"), ParseError);
}

// The command-line tool: exit codes and reproducible output.
int RunCli(const std::string& args) {
  const int status = std::system((std::string(R2DP_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(CliTest, ExitCodes) {
  EXPECT_EQ(RunCli("optimize --epsilon 1 --sensitivity 1 --restarts 1 --max-evals 50"), 0);
  EXPECT_EQ(RunCli("optimize --epsilon -1 --sensitivity 1"), 1);
  EXPECT_EQ(RunCli("optimize --epsilon 1 --sensitivity 1 --metric l1 --families gamma "
                   "--restarts 1 --max-evals 20 --seed 3"),
            0);
  EXPECT_EQ(RunCli("frobnicate"), 1);
  EXPECT_EQ(RunCli("rdp --mechanism 'laplace(b=1)' --alpha 2,5"), 0);
  EXPECT_EQ(RunCli("rdp --mechanism 'staircase(epsilon=1, sensitivity=1)'"), 1);
  EXPECT_EQ(RunCli("verify --mechanism 'laplace(b=1)' --sensitivity 1"), 0);
  EXPECT_EQ(RunCli("sample --mechanism 'gaussian(sigma=1)' --count 5 --seed 1"), 0);
  EXPECT_EQ(RunCli("bench --config /nonexistent.ini"), 1);
}

}  // namespace
}  // namespace r2dp
