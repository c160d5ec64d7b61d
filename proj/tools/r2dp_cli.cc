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

// r2dp: calibrate, sample, verify and benchmark randomized-parameter noise.
//
// Exit codes: 0 success, 1 configuration or input error, 2 infeasible
// optimization (or a failed verification), 3 partial grid failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fmt/format.h"
#include "fmt/ostream.h"
#include "r2dp/bench.h"
#include "r2dp/errors.h"
#include "r2dp/mechanisms.h"
#include "r2dp/optimizer.h"
#include "r2dp/privacy_analysis.h"
#include "r2dp/serialization.h"

namespace {

using namespace r2dp;

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kInfeasible = 2;
constexpr int kPartialFailure = 3;

// Writes to `path`, or stdout when it is empty.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw ParseError(fmt::format("cannot write '{}'", path));
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

CalibratedMechanism LoadRecord(const std::string& record) {
  std::ifstream in(record);
  if (!in) throw ParseError(fmt::format("cannot open record '{}'", record));
  return ReadCalibratedRecord(in);
}

NoiseMechanism LoadMechanism(const std::string& spec, const std::string& record) {
  if (!record.empty()) return R2dpMechanism{LoadRecord(record).combo};
  if (spec.empty()) throw ParseError("give --mechanism or --record");
  NoiseMechanism mechanism = ParseMechanism(spec);
  ValidateMechanism(mechanism);
  return mechanism;
}

struct OptimizeArgs {
  double epsilon = 1.0;
  double sensitivity = 1.0;
  std::string metric = "usefulness";
  double gamma = 1.0;
  double p = 1.0;
  double alpha = 2.0;
  std::string prior;
  double records = 2e6;
  std::string families;
  bool extended = false;
  int restarts = 8;
  int max_evals = 1500;
  uint64_t seed = 1;
  std::string out;
};

int RunOptimize(const OptimizeArgs& args) {
  const PrivacySpec privacy{args.epsilon, args.sensitivity};
  privacy.Validate();
  UtilityGoal goal;
  goal.metric = MetricFromName(args.metric);
  goal.gamma = args.gamma;
  goal.p = args.p;
  goal.alpha = args.alpha;
  goal.records = args.records;
  if (goal.metric == Metric::kMallows) {
    if (args.prior.empty()) throw ParseError("mallows needs --prior <dataset.csv>");
    goal.prior_vector = ReadDatasetCsvFile(args.prior);
  } else if (goal.PriorDependent()) {
    if (args.prior.empty()) throw ParseError("kl and renyi need --prior <histogram>");
    goal.prior_histogram = ReadHistogramFile(args.prior);
  }
  goal.Validate();
  SearchSpaceSpec spec = SearchSpaceSpec::Default(args.extended);
  if (!args.families.empty()) spec.slots = ParseFamilies(args.families);
  spec.restarts = args.restarts;
  spec.max_evals = args.max_evals;
  spec.Validate();

  const CalibratedMechanism result = Optimize(spec, privacy, goal, args.seed);
  Output out(args.out);
  WriteCalibratedRecord(result, out.stream());
  return kOk;
}

int RunSample(const std::string& mechanism_spec, const std::string& record, long long count,
              uint64_t seed, double value) {
  if (count < 0) throw InvalidArgument("--count must be >= 0");
  const NoiseMechanism mechanism = LoadMechanism(mechanism_spec, record);
  Rng rng = DeriveStream(seed, 0);
  std::string buffer;
  for (long long i = 0; i < count; ++i) {
    buffer += FormatNumber(Perturb(mechanism, value, rng));
    buffer += '\n';
    if (buffer.size() > (1 << 16)) {
      std::cout << buffer;
      buffer.clear();
    }
  }
  std::cout << buffer;
  return kOk;
}

int RunVerify(const std::string& mechanism_spec, const std::string& record, double sensitivity,
              double step) {
  const NoiseMechanism mechanism = LoadMechanism(mechanism_spec, record);
  OutputGrid grid;
  grid.step = step;
  double claimed = 0.0;
  double measured = 0.0;
  if (const auto* staircase = std::get_if<StaircaseMechanism>(&mechanism)) {
    const Staircase dist(staircase->epsilon, staircase->sensitivity, staircase->gamma_s);
    claimed = staircase->epsilon;
    sensitivity = staircase->sensitivity;
    // Beyond a few hundred steps the ratio pattern just repeats.
    const double radius = sensitivity * std::max(50.0, 200.0 / claimed);
    measured = GridSupLogRatio([&dist](double x) { return dist.LogDensity(x); }, sensitivity,
                               BuildOutputGrid(sensitivity, radius, grid));
  } else {
    std::optional<LinearCombo> found;
    if (const auto* laplace = std::get_if<LaplaceMechanism>(&mechanism)) {
      found = LinearCombo::Singleton(MgfDist::Degenerate(1.0 / laplace->b));
    } else if (const auto* r2dp = std::get_if<R2dpMechanism>(&mechanism)) {
      found = r2dp->combo;
    } else {
      throw UnsupportedFamily(fmt::format("verify does not handle {} mechanisms",
                                          MechanismName(mechanism)));
    }
    const LinearCombo& combo = *found;
    claimed = EpsilonOfCombo(combo, sensitivity);
    measured = VerifyEpsilonEmpirically(combo, sensitivity, grid);
  }
  const bool ok = measured <= claimed + 1e-6;
  fmt::print("closed_form_epsilon = {}\ngrid_epsilon = {}\nstatus = {}\n", FormatNumber(claimed),
             FormatNumber(measured), ok ? "ok" : "violation");
  return ok ? kOk : kInfeasible;
}

int RunRdp(const std::string& mechanism_spec, const std::string& record,
           const std::vector<double>& alphas, double sensitivity) {
  const NoiseMechanism mechanism = LoadMechanism(mechanism_spec, record);
  fmt::print("alpha,epsilon_rdp\n");
  for (double alpha : alphas) {
    const RdpPoint point = RdpOf(mechanism, alpha, sensitivity);
    fmt::print("{},{}\n", FormatNumber(point.alpha), FormatNumber(point.epsilon_rdp));
  }
  return kOk;
}

int RunSynth(const std::string& kind, std::size_t n, uint64_t seed, double rate, double value,
             const std::string& shape, const std::string& out_path) {
  SyntheticSpec spec;
  spec.rate = rate;
  spec.value = value;
  spec.shape = shape;
  if (kind == "constant") {
    spec.kind = SyntheticKind::kConstantStream;
  } else if (kind == "poisson") {
    spec.kind = SyntheticKind::kPoissonCounts;
  } else if (kind == "histogram50") {
    spec.kind = SyntheticKind::kHistogram50;
  } else {
    throw ParseError(fmt::format("unknown synthetic kind '{}'", kind));
  }
  const std::vector<double> data = GenerateSynthetic(spec, n, seed);
  Output out(out_path);
  if (spec.kind == SyntheticKind::kHistogram50) {
    WriteHistogram(UnitBinHistogram(data), out.stream());
  } else {
    out.stream() << "value\n";
    for (double x : data) out.stream() << FormatNumber(x) << '\n';
  }
  return kOk;
}

int RunBench(const std::string& config_path, const std::string& out_path,
             const std::string& records_path, bool timing) {
  const BenchConfig config = LoadBenchConfigFile(config_path);
  const GridResult result = RunGrid(config.grid, config.search, config.dataset, timing);
  {
    Output out(out_path);
    WriteGridCsv(result, out.stream());
  }
  if (!records_path.empty()) {
    Output records(records_path);
    WriteGridRecords(result, records.stream());
  }
  fmt::print(stderr, "{} rows, {} failed, {} mechanism draws\n", result.rows.size(),
             result.failed_rows, result.mechanism_draws);
  return result.failed_rows > 0 ? kPartialFailure : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomized-parameter noise: calibration, sampling and benchmarks"};
  app.require_subcommand(1);

  OptimizeArgs opt;
  auto* optimize = app.add_subcommand("optimize", "Calibrate a mechanism for a utility goal");
  optimize->add_option("--epsilon", opt.epsilon, "Target epsilon")->required();
  optimize->add_option("--sensitivity", opt.sensitivity, "Query sensitivity")->required();
  optimize->add_option("--metric", opt.metric, "usefulness, l1, l2, mallows, kl or renyi");
  optimize->add_option("--gamma", opt.gamma, "Usefulness error bound");
  optimize->add_option("--p", opt.p, "Mallows exponent");
  optimize->add_option("--alpha", opt.alpha, "Renyi order");
  optimize->add_option("--prior", opt.prior, "Dataset CSV (mallows) or histogram (kl, renyi)");
  optimize->add_option("--records", opt.records, "Record count behind a histogram prior");
  optimize->add_option("--families", opt.families, "Comma-separated family list");
  optimize->add_flag("--extended", opt.extended, "Add noncentral chi-squared and Rayleigh");
  optimize->add_option("--restarts", opt.restarts, "Random restarts");
  optimize->add_option("--max-evals", opt.max_evals, "Evaluations per restart");
  optimize->add_option("--seed", opt.seed, "Search seed");
  optimize->add_option("--out", opt.out, "Record file (default stdout)");

  std::string mechanism_spec;
  std::string record;
  long long count = 10;
  uint64_t seed = 1;
  double value = 0.0;
  auto* sample = app.add_subcommand("sample", "Draw noisy values");
  sample->add_option("--mechanism", mechanism_spec, "Mechanism, e.g. 'laplace(b=1)'");
  sample->add_option("--record", record, "Calibration record from 'optimize'");
  sample->add_option("--count", count, "Number of draws");
  sample->add_option("--seed", seed, "Seed");
  sample->add_option("--value", value, "True value to perturb");

  double sensitivity = 1.0;
  double step = 1e-3;
  auto* verify = app.add_subcommand("verify", "Check epsilon on a density grid");
  verify->add_option("--mechanism", mechanism_spec, "Mechanism spec");
  verify->add_option("--record", record, "Calibration record");
  verify->add_option("--sensitivity", sensitivity, "Query sensitivity (default: the record's, else 1)");
  verify->add_option("--step", step, "Central grid spacing");

  std::vector<double> alphas = {1, 2, 5, 10};
  auto* rdp = app.add_subcommand("rdp", "Renyi DP curve");
  rdp->add_option("--mechanism", mechanism_spec, "Mechanism spec");
  rdp->add_option("--record", record, "Calibration record");
  rdp->add_option("--alpha", alphas, "Orders")->delimiter(',');
  rdp->add_option("--sensitivity", sensitivity, "Query sensitivity (default: the record's, else 1)");

  std::string kind = "poisson";
  std::size_t n = 1000;
  double rate = 5.0;
  double constant = 1.0;
  std::string shape = "gaussian";
  std::string out_path;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth->add_option("--kind", kind, "constant, poisson or histogram50");
  synth->add_option("--n", n, "Values (or records for histogram50)");
  synth->add_option("--seed", seed, "Seed");
  synth->add_option("--rate", rate, "Poisson rate");
  synth->add_option("--value", constant, "Constant value");
  synth->add_option("--shape", shape, "histogram50 shape: uniform, gaussian, exponential");
  synth->add_option("--out", out_path, "Output file (default stdout)");

  std::string config_path;
  std::string records_path;
  bool timing = false;
  auto* bench = app.add_subcommand("bench", "Run an experiment grid");
  bench->add_option("--config", config_path, "Grid config (INI)")->required();
  bench->add_option("--out", out_path, "CSV output (default stdout)");
  bench->add_option("--records", records_path, "Also write calibrated combinations here");
  bench->add_flag("--timing", timing, "Fill wall_ms (makes output run-dependent)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    // A record carries its own sensitivity; an explicit flag still wins.
    if (!record.empty() && (*verify || *rdp)) {
      const CLI::App* sub = *verify ? verify : rdp;
      if (sub->get_option("--sensitivity")->count() == 0) {
        sensitivity = LoadRecord(record).sensitivity;
      }
    }
    if (*optimize) return RunOptimize(opt);
    if (*sample) return RunSample(mechanism_spec, record, count, seed, value);
    if (*verify) return RunVerify(mechanism_spec, record, sensitivity, step);
    if (*rdp) return RunRdp(mechanism_spec, record, alphas, sensitivity);
    if (*synth) return RunSynth(kind, n, seed, rate, constant, shape, out_path);
    if (*bench) return RunBench(config_path, out_path, records_path, timing);
  } catch (const InfeasibleSpec& e) {
    fmt::print(stderr, "infeasible: {}\n", e.what());
    return kInfeasible;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kConfigError;
  }
  return kConfigError;
}
