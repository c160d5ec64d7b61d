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

#include "r2dp/mgf_distribution.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "fmt/format.h"
#include "r2dp/errors.h"
#include "r2dp/special_functions.h"

namespace r2dp {
namespace {

constexpr double kSqrtHalfPi = 1.2533141373155002512;  // sqrt(pi / 2)

bool IsPositiveFinite(double x) { return std::isfinite(x) && x > 0.0; }

void Require(bool condition, std::string_view message) {
  if (!condition) throw InvalidArgument(std::string(message));
}

// log E[V exp(sV)] for V ~ U(0, 1), i.e. log((e^s (s - 1) + 1) / s^2).
double LogUniformFirstMoment(double s) {
  if (std::abs(s) < 0.5) {
    // sum_n s^n / (n! (n + 2))
    double term = 1.0;
    double sum = 0.5;
    for (int n = 1; n < 30; ++n) {
      term *= s / n;
      sum += term / (n + 2);
    }
    return std::log(sum);
  }
  if (s > 0.0) return s + std::log((s - 1.0) + std::exp(-s)) - 2.0 * std::log(s);
  return std::log1p(-std::exp(s) * (1.0 - s)) - 2.0 * std::log(-s);
}

// Mean of N(mean, sigma^2) truncated to [a, b], evaluated without the
// catastrophic cancellation that the textbook formula hits deep in the tails.
double TruncGaussianMean(double mean, double sigma, double a, double b) {
  const double lower = (a - mean) / sigma;
  const double upper = (b - mean) / sigma;
  double m;
  if (lower >= 0.0) {
    m = a + sigma * TruncatedStdNormalExcess(lower, upper);
  } else if (upper <= 0.0) {
    m = b - sigma * TruncatedStdNormalExcess(-upper, -lower);
  } else {
    m = mean + sigma * TruncatedStdNormalMean(lower, upper);
  }
  return std::clamp(m, a, b);
}

// Draws Z ~ N(0, 1) restricted to [lower, upper] with lower >= 0 and returns
// Z - lower. Exponential proposal in the tail, uniform proposal on short
// intervals, plain rejection near the mode.
double SampleStdNormalExcess(double lower, double upper, Rng& rng) {
  const double width = upper - lower;
  if (lower < 0.3 && width > 2.0) {
    std::normal_distribution<double> normal;
    for (;;) {
      const double z = normal(rng);
      if (z >= lower && z <= upper) return z - lower;
    }
  }
  const double rate = 0.5 * (lower + std::sqrt(lower * lower + 4.0));
  const double uniform_cutoff =
      2.0 * std::sqrt(std::numbers::e) / (lower + std::sqrt(lower * lower + 4.0)) *
      std::exp(0.25 * (lower * lower - lower * std::sqrt(lower * lower + 4.0)));
  if (width > uniform_cutoff) {
    std::exponential_distribution<double> exponential(rate);
    for (;;) {
      const double excess = exponential(rng);
      if (excess > width) continue;
      const double z = lower + excess;
      if (OpenUniform(rng) <= std::exp(-0.5 * (z - rate) * (z - rate))) return excess;
    }
  }
  for (;;) {
    const double excess = width * OpenUniform(rng);
    // exp((lower^2 - z^2) / 2) with z = lower + excess
    const double log_accept = -excess * (lower + 0.5 * excess);
    if (std::log(OpenUniform(rng)) <= log_accept) return excess;
  }
}

}  // namespace

std::string_view FamilyName(Family family) {
  switch (family) {
    case Family::kDegenerate:
      return "degenerate";
    case Family::kBernoulli:
      return "bernoulli";
    case Family::kGamma:
      return "gamma";
    case Family::kUniform:
      return "uniform";
    case Family::kTruncGaussian:
      return "trunc_gaussian";
    case Family::kNoncentralChiSq:
      return "noncentral_chi2";
    case Family::kRayleigh:
      return "rayleigh";
  }
  return "unknown";
}

Family FamilyFromName(std::string_view name) {
  for (Family f : {Family::kDegenerate, Family::kBernoulli, Family::kGamma,
                   Family::kUniform, Family::kTruncGaussian,
                   Family::kNoncentralChiSq, Family::kRayleigh}) {
    if (FamilyName(f) == name) return f;
  }
  throw ParseError(fmt::format("unknown distribution family '{}'", name));
}

std::vector<std::string_view> FamilyParameterNames(Family family) {
  switch (family) {
    case Family::kDegenerate:
      return {"k0"};
    case Family::kBernoulli:
      return {"p", "x0", "x1"};
    case Family::kGamma:
      return {"k", "theta"};
    case Family::kUniform:
      return {"a", "b"};
    case Family::kTruncGaussian:
      return {"mu", "sigma", "a", "b"};
    case Family::kNoncentralChiSq:
      return {"k", "lambda"};
    case Family::kRayleigh:
      return {"sigma"};
  }
  return {};
}

MgfDist MgfDist::Degenerate(double k0) {
  Require(IsPositiveFinite(k0), "degenerate: k0 must be positive and finite");
  return MgfDist(Family::kDegenerate, {k0, 0, 0, 0});
}

MgfDist MgfDist::Bernoulli(double p, double x0, double x1) {
  Require(p >= 0.0 && p <= 1.0, "bernoulli: p must lie in [0, 1]");
  Require(IsPositiveFinite(x0) && IsPositiveFinite(x1),
          "bernoulli: outcomes must be positive and finite");
  return MgfDist(Family::kBernoulli, {p, x0, x1, 0});
}

MgfDist MgfDist::Gamma(double k, double theta) {
  Require(IsPositiveFinite(k), "gamma: shape must be positive and finite");
  Require(IsPositiveFinite(theta), "gamma: scale must be positive and finite");
  return MgfDist(Family::kGamma, {k, theta, 0, 0});
}

MgfDist MgfDist::Uniform(double a, double b) {
  Require(std::isfinite(a) && std::isfinite(b), "uniform: bounds must be finite");
  Require(a >= 0.0 && a < b, "uniform: requires 0 <= a < b");
  return MgfDist(Family::kUniform, {a, b, 0, 0});
}

MgfDist MgfDist::TruncGaussian(double mu, double sigma, double a, double b) {
  Require(std::isfinite(mu), "trunc_gaussian: mu must be finite");
  Require(IsPositiveFinite(sigma), "trunc_gaussian: sigma must be positive and finite");
  Require(std::isfinite(a) && a >= 0.0, "trunc_gaussian: requires finite a >= 0");
  Require(a < b, "trunc_gaussian: requires a < b");
  Require(std::isfinite(LogNormalMass((a - mu) / sigma, (b - mu) / sigma)),
          "trunc_gaussian: truncation interval has no representable mass");
  return MgfDist(Family::kTruncGaussian, {mu, sigma, a, b});
}

MgfDist MgfDist::NoncentralChiSq(double k, double lambda) {
  Require(IsPositiveFinite(k), "noncentral_chi2: k must be positive and finite");
  Require(std::isfinite(lambda) && lambda >= 0.0,
          "noncentral_chi2: lambda must be finite and >= 0");
  return MgfDist(Family::kNoncentralChiSq, {k, lambda, 0, 0});
}

MgfDist MgfDist::Rayleigh(double sigma) {
  Require(IsPositiveFinite(sigma), "rayleigh: sigma must be positive and finite");
  return MgfDist(Family::kRayleigh, {sigma, 0, 0, 0});
}

MgfDist MgfDist::FromParameters(Family family, const std::vector<double>& p) {
  const size_t expected = FamilyParameterNames(family).size();
  if (p.size() != expected) {
    throw InvalidArgument(fmt::format("{}: expected {} parameters, got {}",
                                      FamilyName(family), expected, p.size()));
  }
  switch (family) {
    case Family::kDegenerate:
      return Degenerate(p[0]);
    case Family::kBernoulli:
      return Bernoulli(p[0], p[1], p[2]);
    case Family::kGamma:
      return Gamma(p[0], p[1]);
    case Family::kUniform:
      return Uniform(p[0], p[1]);
    case Family::kTruncGaussian:
      return TruncGaussian(p[0], p[1], p[2], p[3]);
    case Family::kNoncentralChiSq:
      return NoncentralChiSq(p[0], p[1]);
    case Family::kRayleigh:
      return Rayleigh(p[0]);
  }
  throw InvalidArgument("unknown family");
}

std::vector<double> MgfDist::parameters() const {
  const size_t n = FamilyParameterNames(family_).size();
  return std::vector<double>(params_.begin(), params_.begin() + n);
}

double MgfDist::MgfDomainUpper() const {
  switch (family_) {
    case Family::kGamma:
      return 1.0 / params_[1];
    case Family::kNoncentralChiSq:
      return 0.5;
    default:
      return kInf;
  }
}

void MgfDist::CheckDomain(double t) const {
  if (std::isnan(t) || !(t < MgfDomainUpper())) {
    throw DomainError(fmt::format("{} MGF does not exist at t = {} (domain t < {})",
                                  FamilyName(family_), t, MgfDomainUpper()));
  }
}

namespace {

// log of the integral of e^(-x v - v^2/2) over [0, width]. Only used where
// the exponent varies by a few units, so a fixed Gauss rule is exact to
// rounding and smooth in x.
double LogSliceIntegral(double x, double width) {
  using Rule = boost::math::quadrature::gauss<double, 20>;
  return std::log(Rule::integrate([x](double v) { return std::exp(-v * (x + 0.5 * v)); }, 0.0,
                                  width));
}

// log(e^(x^2/2) (erfc(x/sqrt2) - erfc((x+width)/sqrt2))) for x >= 0, without
// forming the Gaussian factor. Narrow slices integrate the density directly;
// the erfc difference would cancel.
double LogScaledNormalMass(double x, double width) {
  if (width * (x + 0.5 * width) <= 2.0) {
    return 0.5 * std::log(2.0 / std::numbers::pi) + LogSliceIntegral(x, width);
  }
  const double log_erfcx = std::log(Erfcx(x / std::numbers::sqrt2));
  if (width == kInf) return log_erfcx;
  const double upper = x + width;
  const double log_ratio = -0.5 * width * (upper + x) +
                           std::log(Erfcx(upper / std::numbers::sqrt2)) - log_erfcx;
  return log_erfcx + std::log1p(-std::exp(log_ratio));
}

// log P(Z in [l, u]) = rest - edge^2 / 2, where edge is l when l >= 0, u when
// u <= 0, and the term is absent when the interval straddles 0.
struct NormalMassParts {
  enum Side { kLower, kUpper, kStraddle };
  Side side;
  double rest;
};

// `width` is u - l computed before any shift, since recomputing it from
// shifted endpoints loses digits for narrow intervals.
NormalMassParts SplitNormalMass(double l, double u, double width) {
  if (l == kInf || u == -kInf) return {NormalMassParts::kStraddle, -kInf};
  if (l >= 0.0) return {NormalMassParts::kLower, std::log(0.5) + LogScaledNormalMass(l, width)};
  if (u <= 0.0) return {NormalMassParts::kUpper, std::log(0.5) + LogScaledNormalMass(-u, width)};
  if (width <= 2.0) {
    const double log_pdf = -0.5 * l * l - 0.5 * std::log(2.0 * std::numbers::pi);
    return {NormalMassParts::kStraddle, log_pdf + LogSliceIntegral(l, width)};
  }
  return {NormalMassParts::kStraddle, LogNormalMass(l, u)};
}

}  // namespace

double MgfDist::LogMgf(double t) const {
  CheckDomain(t);
  if (t == 0.0) return 0.0;
  const auto& p = params_;
  switch (family_) {
    case Family::kDegenerate:
      return t * p[0];
    case Family::kBernoulli:
      return LogAddExp(std::log(p[0]) + t * p[1], std::log1p(-p[0]) + t * p[2]);
    case Family::kGamma:
      return -p[0] * std::log1p(-p[1] * t);
    case Family::kUniform:
      return t * p[0] + LogExpm1OverX(t * (p[1] - p[0]));
    case Family::kTruncGaussian: {
      // M(t) = e^(mu t + s^2/2) P(Z in [lower - s, upper - s]) / P(Z in
      // [lower, upper]) with s = sigma t. A one-sided interval keeps the
      // Gaussian factor of its nearer endpoint apart, so when numerator and
      // denominator sit on the same side the quadratic terms cancel exactly.
      const double mu = p[0], sigma = p[1];
      const double lower = (p[2] - mu) / sigma;
      const double upper = (p[3] - mu) / sigma;
      const double s = sigma * t;
      const double width = (p[3] - p[2]) / sigma;
      const NormalMassParts num = SplitNormalMass(lower - s, upper - s, width);
      const NormalMassParts den = SplitNormalMass(lower, upper, width);
      if (num.rest == -kInf) return -kInf;
      double quadratic;
      if (num.side == den.side && num.side == NormalMassParts::kLower) {
        quadratic = t * p[2];
      } else if (num.side == den.side && num.side == NormalMassParts::kUpper) {
        quadratic = t * p[3];
      } else {
        quadratic = num.side == NormalMassParts::kLower   ? t * p[2] - 0.5 * lower * lower
                    : num.side == NormalMassParts::kUpper ? t * p[3] - 0.5 * upper * upper
                                                          : mu * t + 0.5 * s * s;
        if (den.side == NormalMassParts::kLower) quadratic += 0.5 * lower * lower;
        if (den.side == NormalMassParts::kUpper) quadratic += 0.5 * upper * upper;
      }
      return quadratic + num.rest - den.rest;
    }
    case Family::kNoncentralChiSq:
      return p[1] * t / (1.0 - 2.0 * t) - 0.5 * p[0] * std::log1p(-2.0 * t);
    case Family::kRayleigh: {
      const double s = p[0] * t;
      if (s > 30.0) {
        const double log_e = 0.5 * s * s + std::log(2.0 - std::exp(-0.5 * s * s) *
                                                             Erfcx(s / std::numbers::sqrt2));
        const double log_lead = std::log(s * kSqrtHalfPi) + log_e;
        return log_lead + std::log1p(std::exp(-log_lead));
      }
      if (s >= -15.0) {
        return std::log(1.0 + s * kSqrtHalfPi * Erfcx(-s / std::numbers::sqrt2));
      }
      // M(t) = sum_{n>=1} (-1)^(n+1) (2n-1)!! / r^(2n), r = -s.
      const double inv_r2 = 1.0 / (s * s);
      double term = inv_r2;
      double sum = term;
      for (int n = 2; n <= 15; ++n) {
        term *= -(2.0 * n - 1.0) * inv_r2;
        sum += term;
      }
      return std::log(sum);
    }
  }
  return 0.0;
}

double MgfDist::LogMgfDeriv(double t) const {
  CheckDomain(t);
  const auto& p = params_;
  switch (family_) {
    case Family::kDegenerate:
      return std::log(p[0]) + t * p[0];
    case Family::kBernoulli:
      return LogAddExp(std::log(p[0]) + std::log(p[1]) + t * p[1],
                       std::log1p(-p[0]) + std::log(p[2]) + t * p[2]);
    case Family::kGamma:
      return std::log(p[0] * p[1]) - (p[0] + 1.0) * std::log1p(-p[1] * t);
    case Family::kUniform: {
      // X = a + w V with V ~ U(0, 1): E[X e^{tX}] = e^{ta} (a g0(s) + w g1(s)).
      const double a = p[0], w = p[1] - p[0], s = t * w;
      const double log_second = std::log(w) + LogUniformFirstMoment(s);
      if (a == 0.0) return log_second;
      return t * a + LogAddExp(std::log(a) + LogExpm1OverX(s), log_second);
    }
    case Family::kTruncGaussian: {
      // Exponential tilting keeps the family: the tilted law is the same
      // truncation of N(mu + sigma^2 t, sigma^2).
      const double tilted_mean = p[0] + p[1] * p[1] * t;
      return LogMgf(t) + std::log(TruncGaussianMean(tilted_mean, p[1], p[2], p[3]));
    }
    case Family::kNoncentralChiSq: {
      const double d = 1.0 - 2.0 * t;
      return LogMgf(t) + std::log(p[1] / (d * d) + p[0] / d);
    }
    case Family::kRayleigh: {
      const double sigma = p[0];
      const double s = sigma * t;
      if (s > 30.0) {
        const double log_e = 0.5 * s * s + std::log(2.0 - std::exp(-0.5 * s * s) *
                                                             Erfcx(s / std::numbers::sqrt2));
        const double lead = kSqrtHalfPi * (1.0 + s * s);
        return std::log(sigma * lead) + log_e + std::log1p(s / lead * std::exp(-log_e));
      }
      if (s >= -15.0) {
        return std::log(sigma * kSqrtHalfPi * (1.0 + s * s) *
                            Erfcx(-s / std::numbers::sqrt2) +
                        sigma * s);
      }
      // M'(t) = sigma * sum_{n>=1} (-1)^(n+1) 2n (2n-1)!! / r^(2n+1), r = -s.
      const double r = -s;
      const double inv_r2 = 1.0 / (r * r);
      double dfact = 1.0;  // (2n-1)!!
      double power = inv_r2 / r;
      double sum = 0.0;
      double sign = 1.0;
      for (int n = 1; n <= 15; ++n) {
        dfact *= (2.0 * n - 1.0);
        sum += sign * 2.0 * n * dfact * power;
        power *= inv_r2;
        sign = -sign;
      }
      return std::log(sigma * sum);
    }
  }
  return 0.0;
}

double MgfDist::Mgf(double t) const { return std::exp(LogMgf(t)); }

double MgfDist::MgfDeriv(double t) const { return std::exp(LogMgfDeriv(t)); }

double MgfDist::Mean() const {
  const auto& p = params_;
  switch (family_) {
    case Family::kDegenerate:
      return p[0];
    case Family::kBernoulli:
      return p[0] * p[1] + (1.0 - p[0]) * p[2];
    case Family::kGamma:
      return p[0] * p[1];
    case Family::kUniform:
      return 0.5 * (p[0] + p[1]);
    case Family::kTruncGaussian:
      return TruncGaussianMean(p[0], p[1], p[2], p[3]);
    case Family::kNoncentralChiSq:
      return p[0] + p[1];
    case Family::kRayleigh:
      return p[0] * kSqrtHalfPi;
  }
  return 0.0;
}

double MgfDist::Sample(Rng& rng) const {
  const auto& p = params_;
  switch (family_) {
    case Family::kDegenerate:
      return p[0];
    case Family::kBernoulli:
      return OpenUniform(rng) < p[0] ? p[1] : p[2];
    case Family::kGamma:
      return std::gamma_distribution<double>(p[0], p[1])(rng);
    case Family::kUniform:
      return p[0] + (p[1] - p[0]) * OpenUniform(rng);
    case Family::kTruncGaussian: {
      const double mu = p[0], sigma = p[1], a = p[2], b = p[3];
      const double lower = (a - mu) / sigma;
      const double upper = (b - mu) / sigma;
      double x;
      if (lower >= 0.0) {
        x = a + sigma * SampleStdNormalExcess(lower, upper, rng);
      } else if (upper <= 0.0) {
        x = b - sigma * SampleStdNormalExcess(-upper, -lower, rng);
      } else if (upper - lower > 1.0) {
        std::normal_distribution<double> normal;
        double z;
        do {
          z = normal(rng);
        } while (z < lower || z > upper);
        x = mu + sigma * z;
      } else {
        double z;
        do {
          z = lower + (upper - lower) * OpenUniform(rng);
        } while (OpenUniform(rng) > std::exp(-0.5 * z * z));
        x = mu + sigma * z;
      }
      return std::clamp(x, a, b);
    }
    case Family::kNoncentralChiSq: {
      double dof = p[0];
      if (p[1] > 0.0) {
        dof += 2.0 * std::poisson_distribution<long long>(0.5 * p[1])(rng);
      }
      return std::gamma_distribution<double>(0.5 * dof, 2.0)(rng);
    }
    case Family::kRayleigh:
      return p[0] * std::sqrt(-2.0 * std::log(OpenUniform(rng)));
  }
  return 0.0;
}

double MgfDist::SmallBallExponent() const {
  const auto& p = params_;
  switch (family_) {
    case Family::kDegenerate:
    case Family::kBernoulli:
      return kInf;
    case Family::kGamma:
      return p[0];
    case Family::kUniform:
      return p[0] > 0.0 ? kInf : 1.0;
    case Family::kTruncGaussian:
      return p[2] > 0.0 ? kInf : 1.0;
    case Family::kNoncentralChiSq:
      return 0.5 * p[0];
    case Family::kRayleigh:
      return 2.0;
  }
  return kInf;
}

}  // namespace r2dp
