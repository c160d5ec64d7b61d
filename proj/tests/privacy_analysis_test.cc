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

#include <cmath>
#include <limits>
#include <vector>

#include "gtest/gtest.h"
#include "r2dp/errors.h"
#include "r2dp/mechanisms.h"
#include "r2dp/privacy_analysis.h"
#include "test_support.h"

namespace r2dp {
namespace {

const double kLn2 = std::log(2.0);

// ln(E[X] / E[X e^{-dq X}]) straight from the density.
double OracleEpsilon(const MgfDist& dist, double dq) {
  const double mean = testing::OracleExpectation(dist, [](double x) { return x; });
  const double deriv =
      testing::OracleExpectation(dist, [dq](double x) { return x * std::exp(-dq * x); });
  return std::log(mean / deriv);
}

// Renyi divergence of order alpha between the output densities at 0 and at
// dq, integrated over the real line. log_density is the noise log density.
double OracleRenyi(const std::function<double(double)>& log_density, double dq, double alpha) {
  const auto integrand = [&](double x) {
    const double lp = log_density(x), lq = log_density(x - dq);
    if (alpha == 1.0) return std::exp(lp) * (lp - lq);
    return std::exp(alpha * lp + (1 - alpha) * lq);
  };
  const double total =
      testing::OracleHalfLine([&](double y) { return integrand(-y); }) +
      testing::OracleInterval(integrand, 0, dq) +
      testing::OracleHalfLine([&](double y) { return integrand(dq + y); });
  return alpha == 1.0 ? total : std::log(total) / (alpha - 1);
}

TEST(EpsilonOfComboTest, Examples) {
  EXPECT_NEAR(EpsilonOfCombo(LinearCombo::Singleton(MgfDist::Degenerate(0.5)), 1), 0.5, 1e-15);
  EXPECT_NEAR(EpsilonOfCombo(LinearCombo::Singleton(MgfDist::Gamma(1, 1)), 1), 2 * kLn2, 1e-14);
  // Two-point distribution: the exact value and the quoted mixture bound.
  const MgfDist bern = MgfDist::Bernoulli(0.5, 1, 2);
  const double exact =
      std::log((0.5 * 1 + 0.5 * 2) / (0.5 * 1 * std::exp(-1.0) + 0.5 * 2 * std::exp(-2.0)));
  EXPECT_NEAR(EpsilonOfCombo(LinearCombo::Singleton(bern), 1), exact, 1e-14);
  EXPECT_NEAR(BernoulliMixtureBound(bern, 1),
              std::log(0.5 * std::exp(1.0) + 0.5 * std::exp(2.0)), 1e-14);
}

TEST(EpsilonOfComboTest, BernoulliQuotedValue) {
  // The quoted value ln(0.5e + 0.5e^2) for Bernoulli(0.5, 1, 2) at dq = 1.
  EXPECT_NEAR(EpsilonOfCombo(LinearCombo::Singleton(MgfDist::Bernoulli(0.5, 1, 2)), 1),
              std::log(0.5 * std::exp(1.0) + 0.5 * std::exp(2.0)), 1e-4);
}

TEST(EpsilonOfComboTest, MatchesDensityOracle) {
  Rng rng(3);
  for (Family family : testing::AllFamilies()) {
    for (int i = 0; i < 20; ++i) {
      const MgfDist d = testing::RandomDist(family, rng);
      const double dq = testing::LogUniform(rng, 0.05, 5);
      const double oracle = OracleEpsilon(d, dq);
      EXPECT_NEAR(EpsilonOfCombo(LinearCombo::Singleton(d), dq), oracle, 1e-8 * (1 + oracle))
          << FamilyName(family);
    }
  }
}

TEST(EpsilonOfComboTest, AlwaysPositiveAndIncreasingInSensitivity) {
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    const LinearCombo combo = testing::RandomWellBehavedCombo(rng);
    double previous = 0;
    for (double dq : {0.01, 0.1, 0.5, 1.0, 2.0, 5.0}) {
      const double eps = EpsilonOfCombo(combo, dq);
      ASSERT_GT(eps, previous);
      previous = eps;
    }
  }
}

TEST(EpsilonClosedFormTest, Examples) {
  EXPECT_NEAR(EpsilonClosedForm(MgfDist::Gamma(2, 0.5), 2), 3 * kLn2, 1e-14);
  Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    const double eps = testing::LogUniform(rng, 0.01, 20);
    const double dq = testing::LogUniform(rng, 0.01, 20);
    EXPECT_NEAR(EpsilonClosedForm(MgfDist::Degenerate(eps / dq), dq), eps, 1e-14 * (1 + eps));
    EXPECT_NEAR(EpsilonOfCombo(LinearCombo::Singleton(MgfDist::Degenerate(eps / dq)), dq), eps,
                1e-14 * (1 + eps));
  }
  const MgfDist u = MgfDist::Uniform(0.5, 9);
  EXPECT_NEAR(EpsilonClosedForm(u, 1.2), OracleEpsilon(u, 1.2), 1e-10);
  EXPECT_NEAR(EpsilonClosedForm(u, 1.2), EpsilonOfCombo(LinearCombo::Singleton(u), 1.2), 1e-12);
}

TEST(EpsilonClosedFormTest, AgreesWithGeneralFormula) {
  Rng rng(11);
  for (Family family : {Family::kDegenerate, Family::kBernoulli, Family::kGamma,
                        Family::kUniform, Family::kTruncGaussian}) {
    for (int i = 0; i < 500; ++i) {
      const MgfDist d = testing::RandomDist(family, rng);
      const double dq = testing::LogUniform(rng, 0.01, 10);
      const double general = EpsilonOfCombo(LinearCombo::Singleton(d), dq);
      ASSERT_NEAR(EpsilonClosedForm(d, dq), general, 1e-9 * (1 + general))
          << FamilyName(family) << " dq=" << dq;
    }
  }
}

TEST(EpsilonClosedFormTest, UnsupportedFamilies) {
  EXPECT_THROW(EpsilonClosedForm(MgfDist::NoncentralChiSq(2, 1), 1), UnsupportedFamily);
  EXPECT_THROW(EpsilonClosedForm(MgfDist::Rayleigh(1), 1), UnsupportedFamily);
}

TEST(NecessaryConditionTest, GammaWitness) {
  for (double dq : {0.1, 0.5, 1.0, 3.0}) {
    EXPECT_TRUE(PassesNecessaryCondition(LinearCombo::Singleton(MgfDist::Gamma(2, 0.5 / dq)), dq));
    EXPECT_FALSE(PassesNecessaryCondition(LinearCombo::Singleton(MgfDist::Gamma(1, 0.5 / dq)), dq));
  }
}

TEST(NecessaryConditionTest, GammaThreshold) {
  // k ln 2 > (k + 1) ln 1.5 exactly when k > ln 1.5 / ln(4/3).
  const double threshold = std::log(1.5) / std::log(4.0 / 3.0);
  double lo = 1, hi = 2;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (PassesNecessaryCondition(LinearCombo::Singleton(MgfDist::Gamma(mid, 0.5)), 1) ? hi : lo) =
        mid;
  }
  EXPECT_NEAR(hi, threshold, 1e-9);
  EXPECT_NEAR(hi, 1.4094, 1e-3);
}

TEST(NecessaryConditionTest, UniformAndTruncatedGaussianWitnesses) {
  EXPECT_TRUE(PassesNecessaryCondition(LinearCombo::Singleton(MgfDist::Uniform(0.5, 9)), 1.2));
  const LinearCombo tg = LinearCombo::Singleton(MgfDist::TruncGaussian(0.5223, 1.5454, 0.5223));
  const NecessaryCondition c = CheckNecessaryCondition(tg, 0.6);
  EXPECT_TRUE(c.passes);
  EXPECT_NEAR(c.log_mgf, 1.2417, 1e-3);
  EXPECT_LT(c.epsilon, c.log_mgf);
}

TEST(NecessaryConditionTest, DivergentMgfReportedNotThrown) {
  const NecessaryCondition c =
      CheckNecessaryCondition(LinearCombo::Singleton(MgfDist::Gamma(3, 2)), 1);
  EXPECT_FALSE(c.passes);
  EXPECT_TRUE(c.mgf_diverged);
}

TEST(RdpTest, TableValues) {
  EXPECT_NEAR(RdpOf(LaplaceMechanism{1}, 1).epsilon_rdp, std::exp(-1.0), 1e-12);
  for (double alpha : {1.5, 2.0, 7.0}) {
    for (double sigma : {0.5, 1.0, 3.0}) {
      EXPECT_DOUBLE_EQ(RdpOf(GaussianMechanism{sigma}, alpha).epsilon_rdp,
                       alpha / (2 * sigma * sigma));
    }
  }
  EXPECT_DOUBLE_EQ(RdpOf(GaussianMechanism{1}, 2).epsilon_rdp, 1.0);
  EXPECT_NEAR(RdpOf(LaplaceMechanism{1}, 1e6).epsilon_rdp, 1.0, 1e-3);
}

TEST(RdpTest, RandomizedResponse) {
  for (double p : {0.55, 0.75, 0.9}) {
    for (double alpha : {1.5, 2.0, 10.0}) {
      const double direct =
          std::log(std::pow(p, alpha) * std::pow(1 - p, 1 - alpha) +
                   std::pow(1 - p, alpha) * std::pow(p, 1 - alpha)) /
          (alpha - 1);
      EXPECT_NEAR(RdpOf(RandomizedResponseMechanism{p}, alpha).epsilon_rdp, direct, 1e-12);
    }
    EXPECT_NEAR(RdpOf(RandomizedResponseMechanism{p}, 1).epsilon_rdp,
                (2 * p - 1) * std::log(p / (1 - p)), 1e-12);
  }
}

TEST(RdpTest, DegenerateComboEqualsLaplace) {
  Rng rng(13);
  for (int i = 0; i < 50; ++i) {
    const double eps = testing::LogUniform(rng, 0.05, 10);
    const double dq = testing::LogUniform(rng, 0.1, 10);
    const R2dpMechanism r2dp{LinearCombo::Singleton(MgfDist::Degenerate(eps / dq))};
    for (double alpha : {1.0, 2.0, 5.0, 10.0}) {
      const double laplace = RdpOf(LaplaceMechanism{dq / eps}, alpha, dq).epsilon_rdp;
      EXPECT_NEAR(RdpOf(r2dp, alpha, dq).epsilon_rdp, laplace, 1e-12 * (1 + laplace));
    }
  }
}

TEST(RdpTest, MatchesDensityOracle) {
  const double b = 1.3;
  const auto laplace = [b](double x) { return -std::log(2 * b) - std::abs(x) / b; };
  for (double alpha : {1.0, 2.0, 5.0}) {
    EXPECT_NEAR(RdpOf(LaplaceMechanism{b}, alpha).epsilon_rdp, OracleRenyi(laplace, 1, alpha),
                1e-9);
  }
  // For a genuine mixture the formula averages the Laplace divergence over
  // 1/b, which by joint convexity bounds the divergence of the mixed output
  // densities from above. Gamma(k, theta): M'(-u) = k theta (1 + theta u)^{-k-1}.
  const double k = 3, theta = 0.2;
  const auto compound = [&](double x) {
    return std::log(0.5 * k * theta) - (k + 1) * std::log1p(theta * std::abs(x));
  };
  const R2dpMechanism mech{LinearCombo::Singleton(MgfDist::Gamma(k, theta))};
  for (double alpha : {1.0, 2.0, 4.0}) {
    for (double dq : {1.0, 0.5}) {
      const double exact = OracleRenyi(compound, dq, alpha);
      const double reported = RdpOf(mech, alpha, dq).epsilon_rdp;
      EXPECT_GE(reported, exact - 1e-9) << alpha << " " << dq;
      // Same order of magnitude; the bound is not vacuous.
      EXPECT_LE(reported, 2 * exact) << alpha << " " << dq;
    }
  }
}

TEST(RdpTest, Errors) {
  // M(alpha - 1) does not exist once theta (alpha - 1) >= 1.
  const R2dpMechanism heavy{LinearCombo::Singleton(MgfDist::Gamma(2, 1))};
  EXPECT_THROW(RdpOf(heavy, 2.5), DomainError);
  EXPECT_THROW(RdpOf(StaircaseMechanism{1, 1}, 2), UnsupportedFamily);
  EXPECT_THROW(RdpOf(LaplaceMechanism{1}, 0.5), InvalidArgument);
}

TEST(VerifyEpsilonTest, Examples) {
  OutputGrid grid;
  grid.step = 1e-3;
  EXPECT_NEAR(VerifyEpsilonEmpirically(LinearCombo::Singleton(MgfDist::Degenerate(1)), 1, grid),
              1.0, 1e-3);
  EXPECT_NEAR(VerifyEpsilonEmpirically(LinearCombo::Singleton(MgfDist::Gamma(1, 1)), 1, grid),
              2 * kLn2, 2e-3);
  const LinearCombo bern = LinearCombo::Singleton(MgfDist::Bernoulli(0.5, 1, 2));
  EXPECT_NEAR(VerifyEpsilonEmpirically(bern, 1, grid), EpsilonOfCombo(bern, 1), 2e-3);
}

TEST(VerifyEpsilonTest, NeverExceedsClosedForm) {
  Rng rng(17);
  for (int i = 0; i < 30; ++i) {
    const LinearCombo combo = testing::RandomWellBehavedCombo(rng);
    const double dq = testing::LogUniform(rng, 0.1, 3);
    const double eps = EpsilonOfCombo(combo, dq);
    const double grid = VerifyEpsilonEmpirically(combo, dq);
    EXPECT_LE(grid, eps + 1e-6);
    EXPECT_GE(grid, eps - 2e-3 * (1 + eps));
  }
}

TEST(VerifyEpsilonTest, HeavyTailsRejected) {
  EXPECT_THROW(VerifyEpsilonEmpirically(LinearCombo::Singleton(MgfDist::Gamma(0.01, 1)), 1),
               GridError);
  // Slow but finite decay is still covered.
  EXPECT_LE(VerifyEpsilonEmpirically(LinearCombo::Singleton(MgfDist::Gamma(0.05, 1)), 1),
            EpsilonOfCombo(LinearCombo::Singleton(MgfDist::Gamma(0.05, 1)), 1) + 1e-6);
}

TEST(OutputGridTest, ContainsAnchorsAndIsSorted) {
  const std::vector<double> points = BuildOutputGrid(0.7, 5, OutputGrid{});
  EXPECT_TRUE(std::is_sorted(points.begin(), points.end()));
  EXPECT_TRUE(std::binary_search(points.begin(), points.end(), 0.0));
  EXPECT_TRUE(std::binary_search(points.begin(), points.end(), 0.7));
  EXPECT_LE(points.front(), -5.0);
  EXPECT_GE(points.back(), 5.7);
}

TEST(PrivacySpecTest, Validation) {
  EXPECT_NO_THROW((PrivacySpec{1, 1}.Validate()));
  EXPECT_THROW((PrivacySpec{0, 1}.Validate()), InvalidArgument);
  EXPECT_THROW((PrivacySpec{1, -1}.Validate()), InvalidArgument);
  EXPECT_THROW((PrivacySpec{std::numeric_limits<double>::infinity(), 1}.Validate()),
               InvalidArgument);
}

}  // namespace
}  // namespace r2dp
