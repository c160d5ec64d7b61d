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

#ifndef R2DP_QUADRATURE_H_
#define R2DP_QUADRATURE_H_

#include <functional>

namespace r2dp {

struct QuadratureOptions {
  double relative_tolerance = 1e-11;
  // Width of the first panel; later panels double in width.
  double initial_panel = 1.0;
  int max_panels = 2000;
  // Bisection limit per panel; bounds the cost when roundoff keeps a panel
  // from meeting its tolerance.
  int max_depth = 20;
};

struct QuadratureResult {
  double value = 0.0;
  double tail_correction = 0.0;
  int panels = 0;
};

// Integral over [0, inf) of a non-negative integrand that decays like x^-p
// (p = `tail_exponent`, +inf for faster-than-polynomial decay).
//
// The half line is cut into doubling panels, each integrated by adaptive
// Gauss-Kronrod. Panels stop once the remaining tail is negligible; for a
// polynomial tail the remainder beyond X is added analytically as
// f(X) X / (p - 1). Throws DivergentIntegral for p <= 1 or when the tail
// cannot be brought below the tolerance.
QuadratureResult IntegrateHalfLine(const std::function<double(double)>& integrand,
                                   double tail_exponent,
                                   const QuadratureOptions& options = {});

}  // namespace r2dp

#endif  // R2DP_QUADRATURE_H_
