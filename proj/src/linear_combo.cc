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

#include "r2dp/linear_combo.h"

#include <algorithm>
#include <cmath>

#include "r2dp/errors.h"
#include "r2dp/special_functions.h"

namespace r2dp {

LinearCombo::LinearCombo(std::vector<ComboTerm> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) throw InvalidArgument("linear combination needs at least one term");
  bool any_positive = false;
  for (const ComboTerm& term : terms_) {
    if (!std::isfinite(term.coefficient) || term.coefficient < 0.0) {
      throw InvalidArgument("combination coefficients must be finite and >= 0");
    }
    any_positive |= term.coefficient > 0.0;
  }
  if (!any_positive) {
    throw InvalidArgument("linear combination needs a positive coefficient");
  }
}

LinearCombo LinearCombo::Scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw InvalidArgument("scale factor must be positive and finite");
  }
  std::vector<ComboTerm> scaled = terms_;
  for (ComboTerm& term : scaled) term.coefficient *= factor;
  return LinearCombo(std::move(scaled));
}

double LinearCombo::LogMgf(double t) const {
  double sum = 0.0;
  for (const ComboTerm& term : terms_) {
    if (term.coefficient == 0.0) continue;
    sum += term.dist.LogMgf(term.coefficient * t);
  }
  return sum;
}

double LinearCombo::LogMgfDeriv(double t) const {
  // Product rule in log space: log M'_Y = log M_Y + log sum_j a_j M'_j / M_j.
  double log_mgf_total = 0.0;
  std::vector<double> log_ratio;
  log_ratio.reserve(terms_.size());
  for (const ComboTerm& term : terms_) {
    if (term.coefficient == 0.0) continue;
    const double u = term.coefficient * t;
    const double log_m = term.dist.LogMgf(u);
    log_mgf_total += log_m;
    log_ratio.push_back(std::log(term.coefficient) + term.dist.LogMgfDeriv(u) - log_m);
  }
  double acc = -kInf;
  for (double v : log_ratio) acc = LogAddExp(acc, v);
  return log_mgf_total + acc;
}

double LinearCombo::Mgf(double t) const { return std::exp(LogMgf(t)); }

double LinearCombo::MgfDeriv(double t) const { return std::exp(LogMgfDeriv(t)); }

double LinearCombo::Mean() const {
  double mean = 0.0;
  for (const ComboTerm& term : terms_) mean += term.coefficient * term.dist.Mean();
  return mean;
}

double LinearCombo::MgfDomainUpper() const {
  double upper = kInf;
  for (const ComboTerm& term : terms_) {
    if (term.coefficient == 0.0) continue;
    upper = std::min(upper, term.dist.MgfDomainUpper() / term.coefficient);
  }
  return upper;
}

double LinearCombo::SmallBallExponent() const {
  double exponent = 0.0;
  for (const ComboTerm& term : terms_) {
    if (term.coefficient == 0.0) continue;
    exponent += term.dist.SmallBallExponent();
  }
  return exponent;
}

double LinearCombo::Sample(Rng& rng) const {
  double sum = 0.0;
  for (const ComboTerm& term : terms_) {
    if (term.coefficient == 0.0) continue;
    sum += term.coefficient * term.dist.Sample(rng);
  }
  return sum;
}

double SampleLaplace(double scale, Rng& rng) {
  const double u = OpenUniform(rng) - 0.5;
  return u < 0.0 ? scale * std::log1p(2.0 * u) : -scale * std::log1p(-2.0 * u);
}

double SampleCompoundLaplace(const LinearCombo& combo, Rng& rng, long long* redraws) {
  double inverse_scale = combo.Sample(rng);
  while (!(inverse_scale >= 1e-300)) {
    if (redraws != nullptr) ++*redraws;
    inverse_scale = combo.Sample(rng);
  }
  return SampleLaplace(1.0 / inverse_scale, rng);
}

}  // namespace r2dp
