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

#ifndef R2DP_LINEAR_COMBO_H_
#define R2DP_LINEAR_COMBO_H_

#include <vector>

#include "r2dp/mgf_distribution.h"
#include "r2dp/random.h"

namespace r2dp {

struct ComboTerm {
  double coefficient;
  MgfDist dist;

  bool operator==(const ComboTerm& other) const = default;
};

// Y = sum_i a_i X_i over independent X_i with a_i >= 0. Y plays the role of
// the reciprocal Laplace scale 1/b, so at least one coefficient must be
// positive.
class LinearCombo {
 public:
  explicit LinearCombo(std::vector<ComboTerm> terms);

  static LinearCombo Singleton(const MgfDist& dist, double coefficient = 1.0) {
    return LinearCombo({{coefficient, dist}});
  }

  const std::vector<ComboTerm>& terms() const { return terms_; }

  // Every coefficient multiplied by `factor` > 0.
  LinearCombo Scaled(double factor) const;

  // log prod_i M_i(a_i t).
  double LogMgf(double t) const;
  // log sum_j a_j M'_j(a_j t) prod_{i != j} M_i(a_i t).
  double LogMgfDeriv(double t) const;

  double Mgf(double t) const;
  double MgfDeriv(double t) const;
  double Mean() const;

  // Largest t for which every term's MGF exists at a_i t (exclusive).
  double MgfDomainUpper() const;

  // Sum of the active terms' small-ball exponents: M_Y(-x) ~ x^-p.
  double SmallBallExponent() const;

  double Sample(Rng& rng) const;

  bool operator==(const LinearCombo& other) const = default;

 private:
  std::vector<ComboTerm> terms_;
};

// One draw of the two-fold noise: 1/b ~ Y, then Laplace(0, b). Draws of Y
// below 1e-300 are redrawn; the count of redraws is added to `redraws` when
// provided.
double SampleCompoundLaplace(const LinearCombo& combo, Rng& rng,
                             long long* redraws = nullptr);

// Laplace(0, scale) by inversion.
double SampleLaplace(double scale, Rng& rng);

}  // namespace r2dp

#endif  // R2DP_LINEAR_COMBO_H_
