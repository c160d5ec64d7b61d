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

#include "r2dp/utility_metrics.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <boost/accumulators/accumulators.hpp>
#include <boost/accumulators/statistics/mean.hpp>
#include <boost/accumulators/statistics/stats.hpp>
#include <boost/accumulators/statistics/variance.hpp>

#include "fmt/format.h"
#include "r2dp/errors.h"
#include "r2dp/quadrature.h"
#include "r2dp/special_functions.h"

namespace r2dp {
namespace {

namespace acc = boost::accumulators;
using MeanVariance = acc::accumulator_set<double, acc::stats<acc::tag::mean, acc::tag::variance>>;

MonteCarloEstimate Summarize(const MeanVariance& stats, long long trials) {
  MonteCarloEstimate estimate;
  estimate.trials = trials;
  estimate.mean = acc::mean(stats);
  // The accumulator reports the population variance.
  estimate.std_error =
      trials > 1 ? std::sqrt(acc::variance(stats) / static_cast<double>(trials - 1)) : 0.0;
  return estimate;
}

void CheckTrials(long long trials) {
  if (trials < 1) throw InvalidArgument("Monte-Carlo estimates need at least one trial");
}

void CheckSameBins(const Histogram& p, const Histogram& q) {
  p.Validate();
  q.Validate();
  if (p.bin_edges != q.bin_edges) throw BinMismatch("histograms have different bin edges");
}

QuadratureOptions OptionsFor(const LinearCombo& combo) {
  QuadratureOptions options;
  options.initial_panel = 1.0 / combo.Mean();
  return options;
}

}  // namespace

std::string_view MetricName(Metric metric) {
  switch (metric) {
    case Metric::kUsefulness: return "usefulness";
    case Metric::kL1: return "l1";
    case Metric::kL2: return "l2";
    case Metric::kMallows: return "mallows";
    case Metric::kKlDivergence: return "kl";
    case Metric::kRenyiDivergence: return "renyi";
  }
  return "unknown";
}

Metric MetricFromName(std::string_view name) {
  for (Metric m : {Metric::kUsefulness, Metric::kL1, Metric::kL2, Metric::kMallows,
                   Metric::kKlDivergence, Metric::kRenyiDivergence}) {
    if (MetricName(m) == name) return m;
  }
  throw ParseError(fmt::format("unknown metric '{}'", name));
}

void Histogram::Validate() const {
  if (masses.empty()) throw InvalidArgument("histogram needs at least one bin");
  if (bin_edges.size() != masses.size() + 1) {
    throw InvalidArgument("histogram needs exactly one more edge than masses");
  }
  for (std::size_t i = 0; i + 1 < bin_edges.size(); ++i) {
    if (!(bin_edges[i] < bin_edges[i + 1])) {
      throw InvalidArgument("histogram edges must be strictly increasing");
    }
  }
  double total = 0.0;
  for (double m : masses) {
    if (!(m >= 0.0) || !std::isfinite(m)) {
      throw InvalidArgument("histogram masses must be finite and >= 0");
    }
    total += m;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvalidArgument(fmt::format("histogram masses sum to {}, not 1", total));
  }
}

Histogram ReadHistogram(std::istream& in) {
  Histogram histogram;
  std::string line;
  std::vector<std::pair<double, double>> rows;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    double edge = 0.0;
    double mass = 0.0;
    if (!(fields >> edge >> mass)) {
      throw ParseError(fmt::format("histogram line {}: expected 'edge mass'", line_number));
    }
    rows.emplace_back(edge, mass);
  }
  if (rows.size() < 2) throw ParseError("histogram needs at least two rows");
  if (rows.back().second != 0.0) throw ParseError("last histogram row must carry mass 0");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    histogram.bin_edges.push_back(rows[i].first);
    if (i + 1 < rows.size()) histogram.masses.push_back(rows[i].second);
  }
  histogram.Validate();
  return histogram;
}

Histogram ReadHistogramFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open histogram file '{}'", path));
  return ReadHistogram(in);
}

void WriteHistogram(const Histogram& histogram, std::ostream& out) {
  histogram.Validate();
  for (std::size_t i = 0; i < histogram.masses.size(); ++i) {
    out << fmt::format("{} {}\n", histogram.bin_edges[i], histogram.masses[i]);
  }
  out << fmt::format("{} 0\n", histogram.bin_edges.back());
}

bool UtilityGoal::PriorDependent() const {
  return metric == Metric::kMallows || metric == Metric::kKlDivergence ||
         metric == Metric::kRenyiDivergence;
}

double UtilityGoal::Parameter() const {
  switch (metric) {
    case Metric::kUsefulness: return gamma;
    case Metric::kMallows: return p;
    case Metric::kRenyiDivergence: return alpha;
    default: return 0.0;
  }
}

void UtilityGoal::Validate() const {
  switch (metric) {
    case Metric::kUsefulness:
      if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw InvalidArgument("usefulness gamma must be > 0");
      }
      break;
    case Metric::kL1:
    case Metric::kL2:
      break;
    case Metric::kMallows:
      if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidArgument("Mallows p must be >= 1");
      if (prior_vector.empty()) throw InvalidArgument("Mallows needs a prior vector");
      break;
    case Metric::kRenyiDivergence:
      if (!(alpha > 0.0) || alpha == 1.0 || !std::isfinite(alpha)) {
        throw InvalidArgument("Renyi alpha must be > 0 and != 1");
      }
      [[fallthrough]];
    case Metric::kKlDivergence:
      if (!prior_histogram) throw InvalidArgument("divergence metrics need a prior histogram");
      prior_histogram->Validate();
      if (!(records > 0.0) || !std::isfinite(records)) {
        throw InvalidArgument("record count must be > 0");
      }
      break;
  }
}

double UsefulnessBound(const LinearCombo& combo, double gamma) {
  if (!(gamma > 0.0)) throw InvalidArgument("usefulness gamma must be > 0");
  return -std::expm1(combo.LogMgf(-gamma));
}

double L1Bound(const LinearCombo& combo) {
  const auto integrand = [&combo](double x) { return std::exp(combo.LogMgf(-x)); };
  try {
    return IntegrateHalfLine(integrand, combo.SmallBallExponent(), OptionsFor(combo)).value;
  } catch (const DivergentIntegral& e) {
    throw DivergentIntegral(fmt::format("l1 error is infinite: {}", e.what()));
  }
}

double L2Bound(const LinearCombo& combo) {
  const auto integrand = [&combo](double u) {
    return u == 0.0 ? 0.0 : std::exp(std::log(u) + combo.LogMgf(-u));
  };
  try {
    const double inner =
        IntegrateHalfLine(integrand, combo.SmallBallExponent() - 1.0, OptionsFor(combo)).value;
    return std::sqrt(2.0 * inner);
  } catch (const DivergentIntegral& e) {
    throw DivergentIntegral(fmt::format("l2 error is infinite: {}", e.what()));
  }
}

double AnalyticUtility(const LinearCombo& combo, const UtilityGoal& goal) {
  switch (goal.metric) {
    case Metric::kUsefulness: return UsefulnessBound(combo, goal.gamma);
    case Metric::kL1: return L1Bound(combo);
    case Metric::kL2: return L2Bound(combo);
    default:
      throw InvalidArgument(fmt::format("metric '{}' has no analytic value",
                                        MetricName(goal.metric)));
  }
}

double MallowsDistance(const std::vector<double>& x, const std::vector<double>& y, double p) {
  if (x.size() != y.size()) {
    throw LengthMismatch(fmt::format("Mallows inputs differ in length ({} vs {})", x.size(),
                                     y.size()));
  }
  if (x.empty()) throw LengthMismatch("Mallows distance needs non-empty inputs");
  if (!(p >= 1.0)) throw InvalidArgument("Mallows p must be >= 1");
  // Scale by the largest gap so that large p does not overflow.
  double scale = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) scale = std::max(scale, std::abs(x[i] - y[i]));
  if (scale == 0.0) return 0.0;
  if (!std::isfinite(scale)) return kInf;
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += std::pow(std::abs(x[i] - y[i]) / scale, p);
  return scale * std::pow(sum / static_cast<double>(x.size()), 1.0 / p);
}

double KlDivergence(const Histogram& p, const Histogram& q) {
  CheckSameBins(p, q);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.masses.size(); ++i) {
    const double pi = p.masses[i];
    if (pi == 0.0) continue;
    if (q.masses[i] == 0.0) return kInf;
    sum += pi * std::log(pi / q.masses[i]);
  }
  return std::max(0.0, sum);
}

double RenyiDivergence(const Histogram& p, const Histogram& q, double alpha) {
  if (!(alpha > 0.0) || alpha == 1.0 || !std::isfinite(alpha)) {
    throw InvalidArgument("Renyi alpha must be > 0 and != 1");
  }
  CheckSameBins(p, q);
  double log_sum = -kInf;
  for (std::size_t i = 0; i < p.masses.size(); ++i) {
    const double pi = p.masses[i];
    const double qi = q.masses[i];
    if (pi == 0.0) continue;
    if (qi == 0.0) {
      if (alpha > 1.0) return kInf;
      continue;
    }
    log_sum = LogAddExp(log_sum, alpha * std::log(pi) + (1.0 - alpha) * std::log(qi));
  }
  if (log_sum == -kInf) return kInf;
  return std::max(0.0, log_sum / (alpha - 1.0));
}

MonteCarloEstimate ExpectedMetricEmpirical(const NoiseSampler& noise, const UtilityGoal& goal,
                                           long long trials, Rng& rng) {
  CheckTrials(trials);
  goal.Validate();
  MeanVariance stats;
  std::vector<double> noisy;
  Histogram noisy_histogram;
  if (goal.prior_histogram) noisy_histogram = *goal.prior_histogram;
  for (long long t = 0; t < trials; ++t) {
    double value = 0.0;
    switch (goal.metric) {
      case Metric::kUsefulness:
        value = std::abs(noise(rng)) <= goal.gamma ? 1.0 : 0.0;
        break;
      case Metric::kL1:
        value = std::abs(noise(rng));
        break;
      case Metric::kL2: {
        const double x = noise(rng);
        value = x * x;
        break;
      }
      case Metric::kMallows:
        noisy = goal.prior_vector;
        for (double& v : noisy) v += noise(rng);
        value = MallowsDistance(goal.prior_vector, noisy, goal.p);
        break;
      case Metric::kKlDivergence:
      case Metric::kRenyiDivergence: {
        const std::vector<double>& prior = goal.prior_histogram->masses;
        double total = 0.0;
        for (std::size_t i = 0; i < prior.size(); ++i) {
          const double count = std::max(0.0, prior[i] * goal.records + noise(rng));
          noisy_histogram.masses[i] = count;
          total += count;
        }
        if (!(total > 0.0)) throw NonFinite("noisy histogram lost all of its mass");
        for (double& m : noisy_histogram.masses) m /= total;
        value = goal.metric == Metric::kKlDivergence
                    ? KlDivergence(noisy_histogram, *goal.prior_histogram)
                    : RenyiDivergence(noisy_histogram, *goal.prior_histogram, goal.alpha);
        break;
      }
    }
    stats(value);
  }
  MonteCarloEstimate estimate = Summarize(stats, trials);
  if (goal.metric == Metric::kL2) {
    const double root = std::sqrt(estimate.mean);
    estimate.std_error = root > 0.0 ? estimate.std_error / (2.0 * root) : 0.0;
    estimate.mean = root;
  }
  return estimate;
}

MonteCarloEstimate ExpectedMetricEmpirical(const LinearCombo& combo, const UtilityGoal& goal,
                                           long long trials, Rng& rng) {
  return ExpectedMetricEmpirical(
      [&combo](Rng& r) { return SampleCompoundLaplace(combo, r); }, goal, trials, rng);
}

MonteCarloEstimate TransformErrorBound(const std::function<double(double)>& base_bound,
                                       const LinearCombo& combo, long long trials, Rng& rng) {
  CheckTrials(trials);
  MeanVariance stats;
  for (long long t = 0; t < trials; ++t) {
    double inverse_scale = combo.Sample(rng);
    while (!(inverse_scale >= 1e-300)) inverse_scale = combo.Sample(rng);
    stats(base_bound(1.0 / inverse_scale));
  }
  MonteCarloEstimate estimate = Summarize(stats, trials);
  if (!std::isfinite(estimate.mean) || !std::isfinite(estimate.std_error)) {
    throw NonFinite("transformed error bound diverged");
  }
  return estimate;
}

}  // namespace r2dp
