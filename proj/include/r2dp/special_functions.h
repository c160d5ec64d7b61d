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

// Normal-distribution helpers that stay accurate far into the tails. Every
// routine here works in log space or with scaled functions so that truncated
// Gaussian MGFs can be evaluated at large tilts without underflow.

#ifndef R2DP_SPECIAL_FUNCTIONS_H_
#define R2DP_SPECIAL_FUNCTIONS_H_

#include <initializer_list>

namespace r2dp {

inline constexpr double kInf = __builtin_huge_val();

// Standard normal density.
double NormalPdf(double x);

// Standard normal CDF and upper tail Q(x) = 1 - Phi(x).
double NormalCdf(double x);
double NormalSf(double x);

// log Q(x), accurate for all finite x and returning -inf at +inf.
double LogNormalSf(double x);

// exp(x^2) * erfc(x).
double Erfcx(double x);

// log(Phi(upper) - Phi(lower)) for lower < upper (either may be infinite).
double LogNormalMass(double lower, double upper);

// E[Z | lower < Z < upper] for standard normal Z.
double TruncatedStdNormalMean(double lower, double upper);

// E[Z | lower < Z < upper] - lower, for lower >= 0. Avoids the cancellation
// that the plain mean suffers deep in the upper tail.
double TruncatedStdNormalExcess(double lower, double upper);

// Q^{-1}(p) for p in (0, 1), by safeguarded Newton iteration to 1e-12.
double InverseNormalSf(double p);

// log(exp(a) + exp(b)) without overflow; -inf operands are allowed.
double LogAddExp(double a, double b);
double LogSumExp(std::initializer_list<double> values);

// log(expm1(s) / s), continuous at s = 0.
double LogExpm1OverX(double s);

}  // namespace r2dp

#endif  // R2DP_SPECIAL_FUNCTIONS_H_
