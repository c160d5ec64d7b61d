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

#ifndef R2DP_NELDER_MEAD_H_
#define R2DP_NELDER_MEAD_H_

#include <functional>
#include <vector>

namespace r2dp {

struct NelderMeadOptions {
  int max_evals = 1000;
  // Converged when the spread of simplex values and the simplex diameter
  // both fall below these.
  double f_tolerance = 1e-12;
  double x_tolerance = 1e-9;
  // Rebuild the simplex around the best vertex after convergence while the
  // budget lasts and the rebuild keeps improving.
  bool restart_on_convergence = true;
};

struct NelderMeadResult {
  std::vector<double> x;
  double f = 0.0;
  int evaluations = 0;
  bool converged = false;
};

// Derivative-free minimization inside the box [lower, upper], using the
// dimension-adaptive coefficients of Gao and Han. Trial points are clamped
// into the box. `step` gives the initial simplex edge per coordinate.
NelderMeadResult MinimizeNelderMead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> x0, const std::vector<double>& step,
                                    const std::vector<double>& lower,
                                    const std::vector<double>& upper,
                                    const NelderMeadOptions& options = {});

}  // namespace r2dp

#endif  // R2DP_NELDER_MEAD_H_
