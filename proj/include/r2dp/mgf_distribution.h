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

// Second-fold distributions: the law of the reciprocal Laplace scale 1/b.
//
// Every family has non-negative support, so the MGF and its derivative exist
// for all t <= 0. Values are computed in log space (LogMgf, LogMgfDeriv) and
// exponentiated on demand, which keeps products of many MGFs and the ratio
// E[X] / M'(-dq) finite even when the individual factors under- or overflow.

#ifndef R2DP_MGF_DISTRIBUTION_H_
#define R2DP_MGF_DISTRIBUTION_H_

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "r2dp/random.h"

namespace r2dp {

enum class Family {
  kDegenerate,
  kBernoulli,
  kGamma,
  kUniform,
  kTruncGaussian,
  kNoncentralChiSq,
  kRayleigh,
};

// Canonical lower-case names: "degenerate", "bernoulli", "gamma", "uniform",
// "trunc_gaussian", "noncentral_chi2", "rayleigh".
std::string_view FamilyName(Family family);
Family FamilyFromName(std::string_view name);  // throws ParseError

// Names of the family's parameters, in the order stored by MgfDist.
std::vector<std::string_view> FamilyParameterNames(Family family);

class MgfDist {
 public:
  // Point mass at k0 > 0.
  static MgfDist Degenerate(double k0);
  // x0 with probability p, x1 with probability 1 - p; x0, x1 > 0.
  static MgfDist Bernoulli(double p, double x0, double x1);
  // Shape k > 0, scale theta > 0.
  static MgfDist Gamma(double k, double theta);
  // Uniform on [a, b], 0 <= a < b.
  static MgfDist Uniform(double a, double b);
  // N(mu, sigma^2) conditioned on [a, b], 0 <= a < b <= +inf.
  static MgfDist TruncGaussian(double mu, double sigma, double a,
                               double b = __builtin_huge_val());
  // Degrees of freedom k > 0, noncentrality lambda >= 0.
  static MgfDist NoncentralChiSq(double k, double lambda);
  static MgfDist Rayleigh(double sigma);

  // Builds from FamilyParameterNames order; validates.
  static MgfDist FromParameters(Family family, const std::vector<double>& params);

  Family family() const { return family_; }
  std::vector<double> parameters() const;

  // Supremum of the MGF's existence domain (t must be strictly below it).
  double MgfDomainUpper() const;
  bool InMgfDomain(double t) const { return t < MgfDomainUpper(); }

  // log E[exp(tX)] and log E[X exp(tX)]. Throw DomainError outside the
  // domain. LogMgfDeriv is finite since X > 0 with positive probability.
  double LogMgf(double t) const;
  double LogMgfDeriv(double t) const;

  double Mgf(double t) const;
  double MgfDeriv(double t) const;

  double Mean() const;

  double Sample(Rng& rng) const;

  // p such that M(-x) decays like x^-p as x -> inf (the density of X near
  // zero behaves like y^(p-1)); +inf when X is bounded away from zero.
  double SmallBallExponent() const;

  bool operator==(const MgfDist& other) const = default;

 private:
  MgfDist(Family family, std::array<double, 4> params)
      : family_(family), params_(params) {}

  void CheckDomain(double t) const;

  Family family_;
  std::array<double, 4> params_;
};

}  // namespace r2dp

#endif  // R2DP_MGF_DISTRIBUTION_H_
