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

#include "r2dp/quadrature.h"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fmt/format.h"
#include "r2dp/errors.h"

namespace r2dp {

QuadratureResult IntegrateHalfLine(const std::function<double(double)>& integrand,
                                   double tail_exponent,
                                   const QuadratureOptions& options) {
  if (!(tail_exponent > 1.0)) {
    throw DivergentIntegral(fmt::format(
        "integrand decays like x^-{}; the integral over [0, inf) diverges", tail_exponent));
  }
  if (!(options.initial_panel > 0.0) || !std::isfinite(options.initial_panel)) {
    throw InvalidArgument("initial panel width must be positive and finite");
  }
  using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;
  const double panel_tolerance = 0.1 * options.relative_tolerance;

  QuadratureResult result;
  double lo = 0.0;
  double hi = options.initial_panel;
  double f_lo = integrand(0.0);
  for (int panel = 0; panel < options.max_panels; ++panel) {
    // Accuracy is wanted relative to the whole integral, not to each panel.
    // Far-tail panels carry roundoff near their own size, and demanding
    // relative accuracy there recurses to the depth limit everywhere.
    const double rough = std::abs(Rule::integrate(integrand, lo, hi, 0, 0.0));
    double tolerance = panel_tolerance;
    if (result.value > 0.0 && rough > 0.0) {
      tolerance = std::max(tolerance, panel_tolerance * result.value / rough);
    }
    const double value = Rule::integrate(integrand, lo, hi, options.max_depth, tolerance);
    if (!std::isfinite(value)) {
      throw NonFinite(fmt::format("non-finite integrand on panel [{}, {}]", lo, hi));
    }
    result.value += value;
    result.panels = panel + 1;

    const double f_hi = integrand(hi);
    if (f_hi == 0.0) return result;
    const double budget = options.relative_tolerance * result.value;
    if (panel > 0 && f_lo > 0.0) {
      // Local decay exponent over [hi / 2, hi].
      const double local = std::log(f_lo / f_hi) / std::log(hi / lo);
      const double assumed = std::isfinite(tail_exponent) ? tail_exponent : local;
      if (assumed > 1.0 && local > 1.0) {
        const double tail_assumed = f_hi * hi / (assumed - 1.0);
        const double tail_local = f_hi * hi / (local - 1.0);
        const bool negligible = std::max(tail_assumed, tail_local) <= budget &&
                                value <= 10.0 * std::max(tail_assumed, tail_local) + budget;
        // Inside the asymptotic regime the analytic tail is accurate to about
        // its own size times the relative exponent mismatch.
        const bool asymptotic = std::isfinite(tail_exponent) &&
                                tail_assumed * std::abs(local - tail_exponent) /
                                        (tail_exponent - 1.0) <=
                                    budget;
        if (negligible || asymptotic) {
          if (std::isfinite(tail_exponent)) {
            result.tail_correction = tail_assumed;
            result.value += tail_assumed;
          }
          return result;
        }
      }
    }
    lo = hi;
    f_lo = f_hi;
    hi = 2.0 * hi;
    if (!std::isfinite(hi) || hi > 1e300) break;
  }
  throw DivergentIntegral(
      "tail truncation could not reach the requested tolerance");
}

}  // namespace r2dp
