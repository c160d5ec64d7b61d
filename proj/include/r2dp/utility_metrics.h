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

// Utility metrics and their values under two-fold Laplace noise. The
// prior-independent metrics (usefulness, l1, l2) have MGF expressions; the
// prior-dependent ones (Mallows, KL, Renyi) are estimated by Monte Carlo.

#ifndef R2DP_UTILITY_METRICS_H_
#define R2DP_UTILITY_METRICS_H_

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "r2dp/linear_combo.h"
#include "r2dp/random.h"

namespace r2dp {

enum class Metric {
  kUsefulness,
  kL1,
  kL2,
  kMallows,
  kKlDivergence,
  kRenyiDivergence,
};

// "usefulness", "l1", "l2", "mallows", "kl", "renyi".
std::string_view MetricName(Metric metric);
Metric MetricFromName(std::string_view name);  // throws ParseError

struct Histogram {
  std::vector<double> bin_edges;
  std::vector<double> masses;

  // Sorted edges, one more edge than masses, masses >= 0 summing to 1.
  void Validate() const;
};

// Two-column text: "edge mass" per bin, then a final row holding the right
// edge with mass 0. Blank lines and lines starting with '#' are skipped.
Histogram ReadHistogram(std::istream& in);
Histogram ReadHistogramFile(const std::string& path);
void WriteHistogram(const Histogram& histogram, std::ostream& out);

struct UtilityGoal {
  Metric metric = Metric::kUsefulness;
  double gamma = 1.0;   // usefulness radius
  double p = 1.0;       // Mallows order
  double alpha = 2.0;   // Renyi order
  std::vector<double> prior_vector;        // Mallows
  std::optional<Histogram> prior_histogram;  // KL and Renyi
  // Record count behind the prior histogram; noise is added to counts.
  double records = 2e6;

  bool HigherIsBetter() const { return metric == Metric::kUsefulness; }
  bool PriorDependent() const;
  // The metric's scalar parameter (gamma, p or alpha), 0 when it has none.
  double Parameter() const;
  void Validate() const;
};

// 1 - M_Y(-gamma) = P(|noise| <= gamma).
double UsefulnessBound(const LinearCombo& combo, double gamma);

// E|noise| = int_0^inf M_Y(-x) dx. DivergentIntegral when infinite.
double L1Bound(const LinearCombo& combo);

// sqrt(E[noise^2]) = sqrt(2 int_0^inf int_x^inf M_Y(-u) du dx)
//                  = sqrt(2 int_0^inf u M_Y(-u) du).
double L2Bound(const LinearCombo& combo);

// Analytic value of a prior-independent goal. InvalidArgument otherwise.
double AnalyticUtility(const LinearCombo& combo, const UtilityGoal& goal);

double MallowsDistance(const std::vector<double>& x, const std::vector<double>& y, double p);

// D(p || q) and the order-alpha Renyi divergence. +inf when q lacks mass
// where p has some.
double KlDivergence(const Histogram& p, const Histogram& q);
double RenyiDivergence(const Histogram& p, const Histogram& q, double alpha);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long long trials = 0;
};

// Draws one additive noise value.
using NoiseSampler = std::function<double(Rng&)>;

// Monte-Carlo expectation of the goal's metric when each true value (a
// single 0 for prior-independent metrics, each prior entry or bin count
// otherwise) receives independent noise. For l2 the estimate is
// sqrt(mean square) with a delta-method standard error. Noisy histograms are
// clamped at zero and renormalized; the divergence is D(noisy || prior),
// which stays finite whenever the prior has full support.
MonteCarloEstimate ExpectedMetricEmpirical(const NoiseSampler& noise, const UtilityGoal& goal,
                                           long long trials, Rng& rng);
MonteCarloEstimate ExpectedMetricEmpirical(const LinearCombo& combo, const UtilityGoal& goal,
                                           long long trials, Rng& rng);

// E[base_bound(b)] with 1/b ~ combo, by Monte Carlo. NonFinite when the
// estimate diverges.
MonteCarloEstimate TransformErrorBound(const std::function<double(double)>& base_bound,
                                       const LinearCombo& combo, long long trials, Rng& rng);

}  // namespace r2dp

#endif  // R2DP_UTILITY_METRICS_H_
