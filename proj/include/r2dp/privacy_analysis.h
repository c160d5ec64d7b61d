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

// Pure-DP and Renyi-DP guarantees of two-fold Laplace noise.
//
// With 1/b ~ Y the output density around the true answer is
// p(x) = M'_Y(-|x|) / 2, and the worst-case log ratio under a shift of d is
// attained at the true answer, giving eps = log(E[Y] / M'_Y(-d)).

#ifndef R2DP_PRIVACY_ANALYSIS_H_
#define R2DP_PRIVACY_ANALYSIS_H_

#include <functional>
#include <vector>

#include "r2dp/linear_combo.h"
#include "r2dp/mechanisms.h"
#include "r2dp/mgf_distribution.h"

namespace r2dp {

struct PrivacySpec {
  double epsilon;
  double sensitivity;

  // Throws InvalidArgument unless both are positive and finite.
  void Validate() const;
};

// log(E[Y] / M'_Y(-sensitivity)).
double EpsilonOfCombo(const LinearCombo& combo, double sensitivity);

// Per-family closed forms for degenerate, Bernoulli, Gamma, uniform and
// truncated Gaussian laws. Throws UnsupportedFamily otherwise.
double EpsilonClosedForm(const MgfDist& dist, double sensitivity);

// log(p e^(d x0) + (1 - p) e^(d x1)) for a Bernoulli law: an upper bound on
// its exact epsilon, tight only when x0 == x1.
double BernoulliMixtureBound(const MgfDist& dist, double sensitivity);

struct NecessaryCondition {
  bool passes = false;
  // M_Y(+sensitivity) does not exist; `passes` is then false.
  bool mgf_diverged = false;
  double epsilon = 0.0;
  double log_mgf = 0.0;
};

// eps < log M_Y(sensitivity). Combos failing this cannot beat the Laplace
// mechanism with the same epsilon.
NecessaryCondition CheckNecessaryCondition(const LinearCombo& combo, double sensitivity);
bool PassesNecessaryCondition(const LinearCombo& combo, double sensitivity);

struct RdpPoint {
  double alpha;
  double epsilon_rdp;
};

// Renyi DP of order alpha >= 1 at the given sensitivity. Supported kinds:
// Laplace, randomized response (sensitivity ignored), R2DP and Gaussian.
// R2DP throws DomainError when M_Y(sensitivity (alpha - 1)) does not exist.
RdpPoint RdpOf(const NoiseMechanism& mechanism, double alpha, double sensitivity = 1.0);

// Evaluation grid for density-ratio checks.
struct OutputGrid {
  // Spacing of the uniform central part.
  double step = 1e-3;
  // Outside this mass the grid is allowed to stop.
  double coverage = 1e-9;
  // Half-width of the covered region; 0 picks the smallest radius meeting
  // `coverage`.
  double radius = 0.0;
  // Growth factor of the spacing beyond the central part.
  double growth = 1.01;
};

// Points covering [-radius, shift + radius]: uniform with `step` on the
// central part, then geometrically widening. Always contains 0 and `shift`.
std::vector<double> BuildOutputGrid(double shift, double radius, const OutputGrid& grid);

// sup over `points` of log_density(x) - log_density(x - shift).
double GridSupLogRatio(const std::function<double(double)>& log_density, double shift,
                       const std::vector<double>& points);

// Density-grid estimate of epsilon from the analytic output density. Throws
// GridError when the grid radius leaves more than `grid.coverage` mass out.
double VerifyEpsilonEmpirically(const LinearCombo& combo, double sensitivity,
                                const OutputGrid& grid = {});

}  // namespace r2dp

#endif  // R2DP_PRIVACY_ANALYSIS_H_
