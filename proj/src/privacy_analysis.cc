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

#include "r2dp/privacy_analysis.h"

#include <algorithm>
#include <cmath>

#include "fmt/format.h"
#include "r2dp/errors.h"
#include "r2dp/special_functions.h"

namespace r2dp {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void CheckSensitivity(double sensitivity) {
  if (!(sensitivity > 0.0) || !std::isfinite(sensitivity)) {
    throw InvalidArgument(fmt::format("sensitivity must be positive and finite, got {}",
                                      sensitivity));
  }
}

// E[X] for X ~ N(mu, sigma^2) on [a, b], phrased as the lower edge plus a
// non-negative excess when the window sits right of the mode.
double TruncatedNormalMean(double mu, double sigma, double a, double b) {
  const double alpha = (a - mu) / sigma;
  const double beta = (b - mu) / sigma;
  if (alpha >= 0.0) return a + sigma * TruncatedStdNormalExcess(alpha, beta);
  if (beta <= 0.0) return b - sigma * TruncatedStdNormalExcess(-beta, -alpha);
  return mu + sigma * TruncatedStdNormalMean(alpha, beta);
}

// Renyi divergence of order alpha > 1 between Laplace densities whose centres
// differ by r scale units, and the same for a compound law through its MGF.
double CompoundRdp(const std::function<double(double)>& log_mgf, double mean_term,
                   double shift, double alpha) {
  if (alpha == 1.0) return shift * mean_term + std::exp(log_mgf(-shift)) - 1.0;
  const double log_sum = LogAddExp(std::log(alpha) + log_mgf(shift * (alpha - 1.0)),
                                   std::log(alpha - 1.0) + log_mgf(-shift * alpha));
  return (log_sum - std::log(2.0 * alpha - 1.0)) / (alpha - 1.0);
}

}  // namespace

void PrivacySpec::Validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidArgument(fmt::format("epsilon must be positive and finite, got {}", epsilon));
  }
  CheckSensitivity(sensitivity);
}

double EpsilonOfCombo(const LinearCombo& combo, double sensitivity) {
  CheckSensitivity(sensitivity);
  return std::log(combo.Mean()) - combo.LogMgfDeriv(-sensitivity);
}

double EpsilonClosedForm(const MgfDist& dist, double sensitivity) {
  CheckSensitivity(sensitivity);
  const std::vector<double> p = dist.parameters();
  const double d = sensitivity;
  switch (dist.family()) {
    case Family::kDegenerate:
      return d * p[0];
    case Family::kBernoulli: {
      // Two atoms: eps = log[(p x0 + q x1) / (p x0 e^{-d x0} + q x1 e^{-d x1})].
      const double log_p = std::log(p[0]);
      const double log_q = std::log1p(-p[0]);
      const double log_mean =
          LogAddExp(log_p + std::log(p[1]), log_q + std::log(p[2]));
      const double log_deriv = LogAddExp(log_p + std::log(p[1]) - d * p[1],
                                         log_q + std::log(p[2]) - d * p[2]);
      return log_mean - log_deriv;
    }
    case Family::kGamma:
      return (p[0] + 1.0) * std::log1p(d * p[1]);
    case Family::kUniform: {
      // eps = log[(beta^2 - alpha^2) / (2 ((1 + alpha) e^-alpha - (1 + beta) e^-beta))]
      // with alpha = a d, beta = b d. The denominator is rewritten around
      // e^-alpha so that narrow intervals keep their digits.
      const double alpha = p[0] * d;
      const double beta = p[1] * d;
      const double w = beta - alpha;
      const double bracket = -(1.0 + alpha) * std::expm1(-w) - w * std::exp(-w);
      return std::log(w) + std::log(alpha + beta) - std::log(2.0) + alpha -
             std::log(bracket);
    }
    case Family::kTruncGaussian: {
      // Tilting N(mu, sigma^2) by e^{-d x} shifts the mean to mu - sigma^2 d
      // and keeps the truncation, so M'(-d) = M(-d) * (tilted mean).
      const double mu = p[0], sigma = p[1], a = p[2], b = p[3];
      const double alpha = (a - mu) / sigma;
      const double beta = (b - mu) / sigma;
      const double log_m = -mu * d + 0.5 * sigma * sigma * d * d +
                           LogNormalMass(alpha + sigma * d, beta + sigma * d) -
                           LogNormalMass(alpha, beta);
      const double tilted = TruncatedNormalMean(mu - sigma * sigma * d, sigma, a, b);
      return std::log(TruncatedNormalMean(mu, sigma, a, b)) - log_m - std::log(tilted);
    }
    case Family::kNoncentralChiSq:
    case Family::kRayleigh:
      break;
  }
  throw UnsupportedFamily(fmt::format("no closed-form epsilon for the {} family",
                                      FamilyName(dist.family())));
}

double BernoulliMixtureBound(const MgfDist& dist, double sensitivity) {
  CheckSensitivity(sensitivity);
  if (dist.family() != Family::kBernoulli) {
    throw UnsupportedFamily("the mixture bound applies to Bernoulli laws only");
  }
  const std::vector<double> p = dist.parameters();
  return LogAddExp(std::log(p[0]) + sensitivity * p[1],
                   std::log1p(-p[0]) + sensitivity * p[2]);
}

NecessaryCondition CheckNecessaryCondition(const LinearCombo& combo, double sensitivity) {
  NecessaryCondition result;
  result.epsilon = EpsilonOfCombo(combo, sensitivity);
  if (!(sensitivity < combo.MgfDomainUpper())) {
    result.mgf_diverged = true;
    result.log_mgf = kInf;
    return result;
  }
  result.log_mgf = combo.LogMgf(sensitivity);
  if (!std::isfinite(result.log_mgf)) {
    result.mgf_diverged = true;
    return result;
  }
  result.passes = result.epsilon < result.log_mgf;
  return result;
}

bool PassesNecessaryCondition(const LinearCombo& combo, double sensitivity) {
  return CheckNecessaryCondition(combo, sensitivity).passes;
}

RdpPoint RdpOf(const NoiseMechanism& mechanism, double alpha, double sensitivity) {
  if (!(alpha >= 1.0) || !std::isfinite(alpha)) {
    throw InvalidArgument(fmt::format("Renyi order must be >= 1 and finite, got {}", alpha));
  }
  CheckSensitivity(sensitivity);
  ValidateMechanism(mechanism);
  const double value = std::visit(
      Overloaded{
          [&](const LaplaceMechanism& m) {
            // Point mass at 1/b: log M(t) = t / b.
            const double inv_b = 1.0 / m.b;
            return CompoundRdp([inv_b](double t) { return t * inv_b; }, inv_b,
                               sensitivity, alpha);
          },
          [&](const R2dpMechanism& m) {
            return CompoundRdp([&m](double t) { return m.combo.LogMgf(t); },
                               m.combo.Mean(), sensitivity, alpha);
          },
          [&](const RandomizedResponseMechanism& m) {
            const double log_p = std::log(m.p);
            const double log_q = std::log1p(-m.p);
            if (alpha == 1.0) return (2.0 * m.p - 1.0) * (log_p - log_q);
            return LogAddExp(alpha * log_p + (1.0 - alpha) * log_q,
                             (1.0 - alpha) * log_p + alpha * log_q) /
                   (alpha - 1.0);
          },
          [&](const GaussianMechanism& m) {
            return alpha * sensitivity * sensitivity / (2.0 * m.sigma * m.sigma);
          },
          [&](const StaircaseMechanism&) -> double {
            throw UnsupportedFamily("no Renyi DP row for the staircase mechanism");
          },
      },
      mechanism);
  return {alpha, value};
}

std::vector<double> BuildOutputGrid(double shift, double radius, const OutputGrid& grid) {
  if (!(grid.step > 0.0) || !(grid.growth > 1.0)) {
    throw GridError("grid step must be > 0 and growth > 1");
  }
  if (!(radius > 0.0) || !std::isfinite(radius)) throw GridError("grid radius must be > 0");
  const double h = grid.step;
  const double central = std::min(radius, std::max(10.0 * shift, 10.0 * h));
  const auto lo_index = static_cast<long long>(std::ceil(central / h));
  const auto hi_index = static_cast<long long>(std::ceil((shift + central) / h));
  if (lo_index + hi_index > 50'000'000) throw GridError("grid step too fine for the shift");
  std::vector<double> points;
  points.reserve(static_cast<std::size_t>(lo_index + hi_index + 10000));
  for (long long i = -lo_index; i <= hi_index; ++i) points.push_back(static_cast<double>(i) * h);
  points.push_back(shift);
  double increment = h;
  for (double x = static_cast<double>(hi_index) * h; x < shift + radius;) {
    increment *= grid.growth;
    x = std::min(x + increment, shift + radius);
    points.push_back(x);
  }
  increment = h;
  for (double x = -static_cast<double>(lo_index) * h; x > -radius;) {
    increment *= grid.growth;
    x = std::max(x - increment, -radius);
    points.push_back(x);
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

double GridSupLogRatio(const std::function<double(double)>& log_density, double shift,
                       const std::vector<double>& points) {
  double sup = -kInf;
  for (double x : points) {
    const double ratio = log_density(x) - log_density(x - shift);
    if (std::isnan(ratio)) throw NonFinite(fmt::format("density ratio undefined at {}", x));
    sup = std::max(sup, ratio);
  }
  return sup;
}

double VerifyEpsilonEmpirically(const LinearCombo& combo, double sensitivity,
                                const OutputGrid& grid) {
  CheckSensitivity(sensitivity);
  if (!(grid.coverage > 0.0 && grid.coverage < 1.0)) {
    throw GridError("grid coverage must lie in (0, 1)");
  }
  // Mass of the output density beyond distance R from its centre is M(-R).
  const double log_coverage = std::log(grid.coverage);
  double radius = grid.radius;
  if (radius > 0.0) {
    if (!(combo.LogMgf(-radius) <= log_coverage)) {
      throw GridError(fmt::format("grid radius {} leaves mass {} uncovered (limit {})", radius,
                                  combo.Mgf(-radius), grid.coverage));
    }
  } else {
    radius = 1.0 / combo.Mean();
    while (combo.LogMgf(-radius) > log_coverage) {
      radius *= 2.0;
      if (radius > 1e300) {
        throw GridError("output density tails too heavy to cover with a finite grid");
      }
    }
  }
  const std::vector<double> points = BuildOutputGrid(sensitivity, radius, grid);
  const auto log_density = [&combo](double x) {
    return combo.LogMgfDeriv(-std::abs(x)) - std::log(2.0);
  };
  return GridSupLogRatio(log_density, sensitivity, points);
}

}  // namespace r2dp
