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

#include "r2dp/special_functions.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "r2dp/errors.h"

namespace r2dp {
namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double LogNormalPdf(double x) { return -0.5 * x * x - kLogSqrt2Pi; }

// Asymptotic series for erfcx at large x; the terms shrink until n ~ x^2.
double ErfcxAsymptotic(double x) {
  const double inv_2x2 = 1.0 / (2.0 * x * x);
  double term = 1.0;
  double sum = 1.0;
  for (int n = 1; n <= 12; ++n) {
    term *= -(2.0 * n - 1.0) * inv_2x2;
    sum += term;
  }
  return sum / (x * std::sqrt(std::numbers::pi));
}

// Inverse Mills ratio minus its argument, phi(x)/Q(x) - x, for x >= 5, as
// the continued fraction 1 / (x + 2 / (x + 3 / (x + ...))).
double MillsExcessContinuedFraction(double x) {
  double t = x;
  for (int n = 80; n >= 2; --n) t = x + n / t;
  return 1.0 / t;
}

// e^(x^2) without the relative error x^2 * eps from rounding x^2.
double ExpSquare(double x) {
  const double square = x * x;
  const double rounding = std::fma(x, x, -square);
  return std::exp(square) * (1.0 + rounding);
}

}  // namespace

double NormalPdf(double x) { return std::exp(LogNormalPdf(x)); }

double NormalCdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double NormalSf(double x) { return 0.5 * std::erfc(x / kSqrt2); }

double LogNormalSf(double x) {
  if (x == kInf) return -kInf;
  if (x == -kInf) return 0.0;
  if (x < -5.0) return std::log1p(-NormalSf(-x));
  if (x < 25.0) return std::log(NormalSf(x));
  return std::log(0.5) - 0.5 * x * x + std::log(Erfcx(x / kSqrt2));
}

double Erfcx(double x) {
  if (x < 0.0) return 2.0 * ExpSquare(x) - Erfcx(-x);
  if (x < 20.0) return ExpSquare(x) * std::erfc(x);
  return ErfcxAsymptotic(x);
}

double LogNormalMass(double lower, double upper) {
  if (!(lower < upper)) return -kInf;
  if (lower >= 0.0) {
    const double a = LogNormalSf(lower);
    const double b = LogNormalSf(upper);
    return a + std::log1p(-std::exp(b - a));
  }
  if (upper <= 0.0) return LogNormalMass(-upper, -lower);
  return std::log1p(-(NormalSf(upper) + NormalSf(-lower)));
}

double TruncatedStdNormalExcess(double lower, double upper) {
  if (lower < 0.0) {
    throw InvalidArgument("TruncatedStdNormalExcess requires lower >= 0");
  }
  if (upper == kInf) {
    if (lower < 5.0) {
      return std::exp(LogNormalPdf(lower) - LogNormalSf(lower)) - lower;
    }
    return MillsExcessContinuedFraction(lower);
  }
  const double width = upper - lower;
  if (width <= 0.0) return 0.0;
  // Nearly flat exponential slice.
  if (width * (lower + width) < 1e-6) {
    return 0.5 * width - lower * width * width / 12.0;
  }
  const double log_q_lower = LogNormalSf(lower);
  const double log_q_upper = LogNormalSf(upper);
  const double one_minus_r = -std::expm1(log_q_upper - log_q_lower);
  const double one_minus_e = -std::expm1(-0.5 * width * (upper + lower));
  const double inv_mills_excess = TruncatedStdNormalExcess(lower, kInf);
  const double ratio = one_minus_e / one_minus_r;
  const double excess =
      inv_mills_excess * ratio + lower * (ratio - 1.0);
  return std::clamp(excess, 0.0, width);
}

double TruncatedStdNormalMean(double lower, double upper) {
  if (lower >= 0.0) return lower + TruncatedStdNormalExcess(lower, upper);
  if (upper <= 0.0) return upper - TruncatedStdNormalExcess(-upper, -lower);
  const double mean =
      (NormalPdf(lower) - NormalPdf(upper)) / std::exp(LogNormalMass(lower, upper));
  return std::clamp(mean, lower, upper);
}

double InverseNormalSf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw InvalidArgument("InverseNormalSf requires p in (0, 1)");
  }
  const double target = std::log(p);
  double lo = -40.0;
  double hi = 40.0;
  double x = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double log_q = LogNormalSf(x);
    const double g = log_q - target;  // decreasing in x
    if (g > 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double slope = -std::exp(LogNormalPdf(x) - log_q);
    double next = x - g / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - x);
    x = next;
    if (step < 1e-14 * (1.0 + std::abs(x))) break;
  }
  return x;
}

double LogAddExp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

double LogSumExp(std::initializer_list<double> values) {
  double acc = -kInf;
  for (double v : values) acc = LogAddExp(acc, v);
  return acc;
}

double LogExpm1OverX(double s) {
  if (std::abs(s) < 1e-3) {
    return std::log1p(s * (0.5 + s * (1.0 / 6.0 + s * (1.0 / 24.0 + s / 120.0))));
  }
  if (s > 0.0) return s + std::log(-std::expm1(-s)) - std::log(s);
  return std::log(-std::expm1(s)) - std::log(-s);
}

}  // namespace r2dp
