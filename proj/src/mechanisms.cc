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

#include "r2dp/mechanisms.h"

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

bool PositiveFinite(double x) { return x > 0.0 && std::isfinite(x); }

}  // namespace

std::string_view MechanismName(const NoiseMechanism& mechanism) {
  return std::visit(
      Overloaded{
          [](const R2dpMechanism&) { return std::string_view("r2dp"); },
          [](const LaplaceMechanism&) { return std::string_view("laplace"); },
          [](const StaircaseMechanism&) { return std::string_view("staircase"); },
          [](const GaussianMechanism&) { return std::string_view("gaussian"); },
          [](const RandomizedResponseMechanism&) {
            return std::string_view("randomized_response");
          },
      },
      mechanism);
}

void ValidateMechanism(const NoiseMechanism& mechanism) {
  std::visit(
      Overloaded{
          [](const R2dpMechanism& m) {
            if (!(m.combo.Mean() > 0.0)) {
              throw InvalidArgument("r2dp combination must have a positive mean");
            }
          },
          [](const LaplaceMechanism& m) {
            if (!PositiveFinite(m.b)) throw InvalidArgument("laplace scale must be > 0");
          },
          [](const StaircaseMechanism& m) { Staircase(m.epsilon, m.sensitivity, m.gamma_s); },
          [](const GaussianMechanism& m) {
            if (!PositiveFinite(m.sigma)) throw InvalidArgument("gaussian sigma must be > 0");
          },
          [](const RandomizedResponseMechanism& m) {
            if (!(m.p > 0.0 && m.p < 1.0)) {
              throw InvalidArgument("randomized response p must lie in (0, 1)");
            }
          },
      },
      mechanism);
}

double Perturb(const NoiseMechanism& mechanism, double true_value, Rng& rng,
               long long* redraws) {
  ValidateMechanism(mechanism);
  return std::visit(
      Overloaded{
          [&](const R2dpMechanism& m) {
            return true_value + SampleCompoundLaplace(m.combo, rng, redraws);
          },
          [&](const LaplaceMechanism& m) { return true_value + SampleLaplace(m.b, rng); },
          [&](const StaircaseMechanism& m) {
            return true_value + StaircaseSample(m.epsilon, m.sensitivity, m.gamma_s, rng);
          },
          [&](const GaussianMechanism& m) {
            std::normal_distribution<double> normal(0.0, m.sigma);
            return true_value + normal(rng);
          },
          [&](const RandomizedResponseMechanism& m) {
            if (true_value != 0.0 && true_value != 1.0) {
              throw InputDomain(fmt::format(
                  "randomized response needs a 0/1 input, got {}", true_value));
            }
            std::bernoulli_distribution keep(m.p);
            return keep(rng) ? true_value : 1.0 - true_value;
          },
      },
      mechanism);
}

double StaircaseDefaultGamma(double epsilon) { return 1.0 / (1.0 + std::exp(0.5 * epsilon)); }

Staircase::Staircase(double epsilon, double sensitivity, double gamma_s)
    : epsilon_(epsilon), sensitivity_(sensitivity), gamma_s_(gamma_s) {
  if (!PositiveFinite(epsilon)) throw InvalidArgument("staircase epsilon must be > 0");
  if (!PositiveFinite(sensitivity)) throw InvalidArgument("staircase sensitivity must be > 0");
  if (gamma_s_ < 0.0) gamma_s_ = StaircaseDefaultGamma(epsilon);
  if (!(gamma_s_ >= 0.0 && gamma_s_ <= 1.0)) {
    throw InvalidArgument("staircase gamma_s must lie in [0, 1]");
  }
  // a = (1 - q) / (2 d (g + q (1 - g))), q = e^-eps.
  const double q = std::exp(-epsilon_);
  log_a_ = std::log(-std::expm1(-epsilon_)) -
           std::log(2.0 * sensitivity_ * (gamma_s_ + q * (1.0 - gamma_s_)));
}

double Staircase::Sample(Rng& rng) const {
  const double q = std::exp(-epsilon_);
  std::geometric_distribution<long long> band(-std::expm1(-epsilon_));
  const long long k = band(rng);
  const double lower_weight = gamma_s_ / (gamma_s_ + q * (1.0 - gamma_s_));
  const double u = OpenUniform(rng);
  const double offset = OpenUniform(rng) < lower_weight
                            ? u * gamma_s_
                            : gamma_s_ + u * (1.0 - gamma_s_);
  const double magnitude = (static_cast<double>(k) + offset) * sensitivity_;
  return OpenUniform(rng) < 0.5 ? -magnitude : magnitude;
}

double Staircase::LogDensity(double x) const {
  const double y = std::abs(x) / sensitivity_;
  const double k = std::floor(y);
  const double steps = (y - k < gamma_s_) ? k : k + 1.0;
  return log_a_ - steps * epsilon_;
}

double Staircase::Usefulness(double gamma) const {
  if (!(gamma >= 0.0)) throw InvalidArgument("usefulness radius must be >= 0");
  if (std::isinf(gamma)) return 1.0;
  const double y = gamma / sensitivity_;
  const double k = std::floor(y);
  const double r = y - k;
  const double q = std::exp(-epsilon_);
  // Whole bands carry 1 - q^k; the partial band adds 2 a d q^k (...).
  const double full = -std::expm1(-k * epsilon_);
  const double partial = 2.0 * std::exp(log_a_ - k * epsilon_) * sensitivity_ *
                         (std::min(r, gamma_s_) + q * std::max(0.0, r - gamma_s_));
  return std::min(1.0, full + partial);
}

double Staircase::L1() const {
  const double q = std::exp(-epsilon_);
  const double g = gamma_s_;
  const double one_minus_q = -std::expm1(-epsilon_);
  const double s0 = 1.0 / one_minus_q;
  const double s1 = q / (one_minus_q * one_minus_q);
  const double bracket =
      (2.0 * g * s1 + g * g * s0) + q * (2.0 * (1.0 - g) * s1 + (1.0 - g * g) * s0);
  return std::exp(log_a_) * sensitivity_ * sensitivity_ * bracket;
}

double Staircase::L2() const {
  const double q = std::exp(-epsilon_);
  const double g = gamma_s_;
  const double one_minus_q = -std::expm1(-epsilon_);
  const double s0 = 1.0 / one_minus_q;
  const double s1 = q / (one_minus_q * one_minus_q);
  const double s2 = q * (1.0 + q) / (one_minus_q * one_minus_q * one_minus_q);
  const double bracket = 3.0 * g * s2 + 3.0 * g * g * s1 + g * g * g * s0 +
                         q * (3.0 * (1.0 - g) * s2 + 3.0 * (1.0 - g * g) * s1 +
                              (1.0 - g * g * g) * s0);
  const double second_moment =
      2.0 * std::exp(log_a_) * std::pow(sensitivity_, 3) * bracket / 3.0;
  return std::sqrt(second_moment);
}

double StaircaseSample(double epsilon, double sensitivity, double gamma_s, Rng& rng) {
  return Staircase(epsilon, sensitivity, gamma_s).Sample(rng);
}

double GaussianSigma(double epsilon, double delta, double sensitivity) {
  if (!PositiveFinite(epsilon)) throw InvalidArgument("epsilon must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
  if (!PositiveFinite(sensitivity)) throw InvalidArgument("sensitivity must be > 0");
  const double k = InverseNormalSf(delta);
  return sensitivity / (2.0 * epsilon) * (k + std::sqrt(k * k + 2.0 * epsilon));
}

double KolmogorovSmirnovStatistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("KS statistic needs non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double KolmogorovSmirnovCritical(std::size_t n, std::size_t m, double level) {
  if (n == 0 || m == 0) throw InvalidArgument("KS critical value needs non-empty samples");
  if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("level must lie in (0, 1)");
  const double c = std::sqrt(-0.5 * std::log(0.5 * level));
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  return c * std::sqrt((dn + dm) / (dn * dm));
}

}  // namespace r2dp
