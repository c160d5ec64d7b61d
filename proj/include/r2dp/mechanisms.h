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

// Executable noise mechanisms: the two-fold R2DP sampler and the Laplace,
// staircase, Gaussian and randomized-response baselines.

#ifndef R2DP_MECHANISMS_H_
#define R2DP_MECHANISMS_H_

#include <string_view>
#include <variant>
#include <vector>

#include "r2dp/linear_combo.h"
#include "r2dp/random.h"

namespace r2dp {

// Laplace noise whose reciprocal scale is drawn from `combo`.
struct R2dpMechanism {
  LinearCombo combo;
};

struct LaplaceMechanism {
  double b;
};

// gamma_s < 0 selects the l1-optimal default 1 / (1 + e^(eps/2)).
struct StaircaseMechanism {
  double epsilon;
  double sensitivity;
  double gamma_s = -1.0;
};

struct GaussianMechanism {
  double sigma;
};

// Reports the true bit with probability p and the flipped bit otherwise.
struct RandomizedResponseMechanism {
  double p;
};

using NoiseMechanism =
    std::variant<R2dpMechanism, LaplaceMechanism, StaircaseMechanism,
                 GaussianMechanism, RandomizedResponseMechanism>;

// "r2dp", "laplace", "staircase", "gaussian", "randomized_response".
std::string_view MechanismName(const NoiseMechanism& mechanism);

// Throws InvalidArgument on out-of-range parameters.
void ValidateMechanism(const NoiseMechanism& mechanism);

// true_value plus one noise draw. Randomized response needs a 0/1 input
// (InputDomain otherwise) and returns the privatized bit. R2DP combo draws
// that underflow are redrawn and counted in `redraws`.
double Perturb(const NoiseMechanism& mechanism, double true_value, Rng& rng,
               long long* redraws = nullptr);

double StaircaseDefaultGamma(double epsilon);

// Symmetric staircase density. On [k d, (k + g) d) it equals a e^(-k eps)
// and on [(k + g) d, (k + 1) d) it equals a e^(-(k+1) eps), mirrored for
// negative x.
class Staircase {
 public:
  Staircase(double epsilon, double sensitivity, double gamma_s = -1.0);

  double epsilon() const { return epsilon_; }
  double sensitivity() const { return sensitivity_; }
  double gamma_s() const { return gamma_s_; }

  double Sample(Rng& rng) const;
  double LogDensity(double x) const;

  // P(|X| <= gamma), E|X| and sqrt(E[X^2]).
  double Usefulness(double gamma) const;
  double L1() const;
  double L2() const;

 private:
  double epsilon_;
  double sensitivity_;
  double gamma_s_;
  double log_a_;  // log of the density on [0, g d)
};

double StaircaseSample(double epsilon, double sensitivity, double gamma_s, Rng& rng);

// Smallest sigma with sigma >= (d / 2 eps) (K + sqrt(K^2 + 2 eps)),
// K = Q^-1(delta).
double GaussianSigma(double epsilon, double delta, double sensitivity);

// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double KolmogorovSmirnovStatistic(std::vector<double> a, std::vector<double> b);

// Asymptotic two-sample critical value at significance `level`.
double KolmogorovSmirnovCritical(std::size_t n, std::size_t m, double level);

}  // namespace r2dp

#endif  // R2DP_MECHANISMS_H_
