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

// Searches non-negative combinations of second-fold families for the one
// with the best utility at a fixed epsilon.
//
// Every candidate shape is first projected onto the privacy constraint:
// scaling Y by c > 0 gives eps(cY, d) = eps(Y, c d), which is strictly
// increasing in c, so a one-dimensional root find pins epsilon exactly.
// A bounded Nelder-Mead search then moves over the remaining shape
// parameters from several starts. The Laplace-equivalent point mass is
// always evaluated first, so the result never trails the Laplace mechanism.

#ifndef R2DP_OPTIMIZER_H_
#define R2DP_OPTIMIZER_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "r2dp/linear_combo.h"
#include "r2dp/mgf_distribution.h"
#include "r2dp/privacy_analysis.h"
#include "r2dp/random.h"
#include "r2dp/utility_metrics.h"

namespace r2dp {

enum class ParameterScale { kLinear, kLog, kLogit };

// Search range of one free shape parameter, in natural units.
struct ParameterBox {
  std::string name;
  double lower;
  double upper;
  ParameterScale scale;
};

// One family in the combination. The family's scale parameter is pinned
// (the slot weight and the epsilon projection set the scale), so only the
// shape parameters are searched:
//   degenerate: none           bernoulli: p, ratio = x1 / x0
//   gamma: k                   uniform: offset = a / (b - a)
//   trunc_gaussian: mu, a, width = b - a   (sigma = 1)
//   noncentral_chi2: k, lambda rayleigh: none
struct FamilySlot {
  Family family;
  std::vector<ParameterBox> boxes;
};

FamilySlot DefaultSlot(Family family);

struct SearchSpaceSpec {
  std::vector<FamilySlot> slots;
  // Box for the relative slot weights.
  double coefficient_min = 1e-6;
  double coefficient_max = 1.0;
  // Nelder-Mead searches besides the Laplace seed, and evaluations per search.
  int restarts = 8;
  int max_evals = 1500;
  double constraint_tol = 1e-3;
  // Monte-Carlo settings for prior-dependent metrics (common random numbers).
  uint64_t eval_seed = 20260101;
  long long eval_trials = 200;

  // Gamma, uniform and truncated Gaussian; `extended` adds the noncentral
  // chi-squared and Rayleigh families.
  static SearchSpaceSpec Default(bool extended = false);
  void Validate() const;
};

struct CandidateEvaluation {
  double utility = 0.0;
  double epsilon = 0.0;
  double residual = 0.0;
  bool passes_filter = false;
  bool feasible = false;
};

struct EvaluationOptions {
  double constraint_tol = 1e-3;
  uint64_t eval_seed = 20260101;
  long long eval_trials = 200;
};

// Utility, epsilon and feasibility of a fixed combination. Feasible means the
// epsilon residual is within tolerance and the necessary condition holds; a
// combination of point masses (a Laplace mechanism) skips the condition.
// DomainError and infinite errors make a candidate infeasible.
CandidateEvaluation EvaluateCandidate(const LinearCombo& combo, const PrivacySpec& privacy,
                                      const UtilityGoal& goal,
                                      const EvaluationOptions& options = {});

// Degenerate(eps / d): the Laplace mechanism with b = d / eps.
LinearCombo LaplaceSeed(const PrivacySpec& privacy);

// c > 0 with eps(c Y) = target; throws NonFinite when the root find fails.
double ProjectScale(const LinearCombo& combo, const PrivacySpec& privacy);

struct SolverDiagnostics {
  long long evaluations = 0;
  double constraint_residual = 0.0;
  int winning_restart = 0;
  bool hit_box_boundary = false;
  bool budget_exhausted = false;
  long long filtered_candidates = 0;
  long long failed_candidates = 0;
};

struct CalibratedMechanism {
  LinearCombo combo;
  double achieved_epsilon;
  double target_epsilon;
  double sensitivity;
  Metric metric;
  double metric_parameter;
  double predicted_utility;
  double baseline_laplace_utility;
  std::optional<double> staircase_utility;
  SolverDiagnostics diagnostics;
};

CalibratedMechanism Optimize(const SearchSpaceSpec& spec, const PrivacySpec& privacy,
                             const UtilityGoal& goal, uint64_t seed);
CalibratedMechanism Optimize(const SearchSpaceSpec& spec, const PrivacySpec& privacy,
                             const UtilityGoal& goal, Rng& rng);

// Utility of the staircase mechanism at the same epsilon: analytic for
// usefulness, l1 and l2; Monte Carlo with the evaluation seed otherwise.
double StaircaseUtility(const PrivacySpec& privacy, const UtilityGoal& goal,
                        const EvaluationOptions& options = {});

}  // namespace r2dp

#endif  // R2DP_OPTIMIZER_H_
