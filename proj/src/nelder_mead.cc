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

#include "r2dp/nelder_mead.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "r2dp/errors.h"

namespace r2dp {
namespace {

struct Vertex {
  std::vector<double> x;
  double f;
};

}  // namespace

NelderMeadResult MinimizeNelderMead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> x0, const std::vector<double>& step,
                                    const std::vector<double>& lower,
                                    const std::vector<double>& upper,
                                    const NelderMeadOptions& options) {
  const std::size_t n = x0.size();
  if (step.size() != n || lower.size() != n || upper.size() != n) {
    throw InvalidArgument("Nelder-Mead vectors must share one dimension");
  }
  if (options.max_evals < 1) throw InvalidArgument("Nelder-Mead needs at least one evaluation");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(lower[i] <= upper[i])) throw InvalidArgument("Nelder-Mead box is empty");
  }

  NelderMeadResult result;
  const auto clamp = [&](std::vector<double>& x) {
    for (std::size_t i = 0; i < n; ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
  };
  const auto evaluate = [&](const std::vector<double>& x) {
    ++result.evaluations;
    const double value = f(x);
    return std::isnan(value) ? std::numeric_limits<double>::infinity() : value;
  };
  const auto has_budget = [&](int needed) {
    return result.evaluations + needed <= options.max_evals;
  };

  clamp(x0);
  std::vector<Vertex> simplex;
  simplex.push_back({x0, evaluate(x0)});
  const double dim = static_cast<double>(std::max<std::size_t>(n, 1));
  const double kReflect = 1.0;
  const double kExpand = 1.0 + 2.0 / dim;
  const double kContract = 0.75 - 0.5 / dim;
  const double kShrink = 1.0 - 1.0 / dim;

  const auto build_simplex = [&](double scale) {
    const Vertex best = simplex.front();
    simplex.assign(1, best);
    for (std::size_t i = 0; i < n && has_budget(1); ++i) {
      std::vector<double> x = best.x;
      const double h = scale * step[i];
      x[i] = (x[i] + h <= upper[i]) ? x[i] + h : x[i] - h;
      clamp(x);
      simplex.push_back({x, evaluate(x)});
    }
  };
  const auto by_value = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };

  if (n > 0) build_simplex(1.0);
  double restart_reference = std::numeric_limits<double>::infinity();
  bool converged = false;
  while (n > 0 && simplex.size() == n + 1) {
    std::sort(simplex.begin(), simplex.end(), by_value);
    double diameter = 0.0;
    for (std::size_t v = 1; v <= n; ++v) {
      for (std::size_t i = 0; i < n; ++i) {
        diameter = std::max(diameter, std::abs(simplex[v].x[i] - simplex[0].x[i]));
      }
    }
    const double spread = simplex[n].f - simplex[0].f;
    if (diameter <= options.x_tolerance ||
        (spread <= options.f_tolerance * std::max(1.0, std::abs(simplex[0].f)) &&
         diameter <= 1e3 * options.x_tolerance)) {
      converged = true;
      const bool improved = simplex[0].f < restart_reference - options.f_tolerance;
      if (!options.restart_on_convergence || !improved || !has_budget(static_cast<int>(n) + 1)) {
        break;
      }
      restart_reference = simplex[0].f;
      build_simplex(0.5);
      continue;
    }
    if (!has_budget(1)) break;
    converged = false;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[v].x[i] / dim;
    }
    const auto along = [&](double t, const std::vector<double>& toward) {
      std::vector<double> x(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = centroid[i] + t * (toward[i] - centroid[i]);
      clamp(x);
      return x;
    };
    const Vertex& worst = simplex[n];
    std::vector<double> xr = along(-kReflect, worst.x);
    const double fr = evaluate(xr);
    if (fr < simplex[0].f) {
      if (has_budget(1)) {
        std::vector<double> xe = along(kExpand, xr);
        const double fe = evaluate(xe);
        simplex[n] = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
      } else {
        simplex[n] = {xr, fr};
      }
      continue;
    }
    if (fr < simplex[n - 1].f) {
      simplex[n] = {xr, fr};
      continue;
    }
    if (!has_budget(1)) {
      if (fr < worst.f) simplex[n] = {xr, fr};
      break;
    }
    const bool outside = fr < worst.f;
    std::vector<double> xc = outside ? along(kContract, xr) : along(kContract, worst.x);
    const double fc = evaluate(xc);
    if ((outside && fc <= fr) || (!outside && fc < worst.f)) {
      simplex[n] = {xc, fc};
      continue;
    }
    if (outside) simplex[n] = {xr, fr};
    // Shrink toward the best vertex.
    for (std::size_t v = 1; v <= n && has_budget(1); ++v) {
      for (std::size_t i = 0; i < n; ++i) {
        simplex[v].x[i] = simplex[0].x[i] + kShrink * (simplex[v].x[i] - simplex[0].x[i]);
      }
      simplex[v].f = evaluate(simplex[v].x);
    }
  }
  const auto best = std::min_element(simplex.begin(), simplex.end(), by_value);
  result.x = best->x;
  result.f = best->f;
  result.converged = converged || n == 0;
  return result;
}

}  // namespace r2dp
