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
#include <sstream>
#include <string>

#include "gtest/gtest.h"
#include "r2dp/errors.h"
#include "r2dp/serialization.h"
#include "test_support.h"

namespace r2dp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(NumberTest, ShortestRoundTrip) {
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) {
    const double x = testing::LogUniform(rng, 1e-300, 1e300) * (i % 2 ? -1 : 1);
    EXPECT_EQ(ParseNumber(FormatNumber(x)), x);
  }
  EXPECT_EQ(FormatNumber(0.1), "0.1");
  EXPECT_EQ(FormatNumber(2), "2");
  EXPECT_EQ(ParseNumber("inf"), kInf);
}

TEST(NumberTest, RejectsGarbageAndNan) {
  EXPECT_THROW(ParseNumber("abc"), ParseError);
  EXPECT_THROW(ParseNumber("1.5x"), ParseError);
  EXPECT_THROW(ParseNumber(""), ParseError);
  EXPECT_THROW(ParseNumber("nan"), ParseError);
}

TEST(DistTest, RoundTripEveryFamily) {
  Rng rng(8);
  for (Family family : testing::AllFamilies()) {
    for (int i = 0; i < 100; ++i) {
      const MgfDist dist = testing::RandomDist(family, rng);
      EXPECT_EQ(ParseDist(FormatDist(dist)), dist) << FormatDist(dist);
    }
  }
}

TEST(DistTest, ExamplesAndInfiniteBound) {
  EXPECT_EQ(FormatDist(MgfDist::Gamma(2, 1)), "gamma(k=2, theta=1)");
  const MgfDist half = ParseDist("trunc_gaussian(mu=0, sigma=1, a=0, b=inf)");
  EXPECT_EQ(half, MgfDist::TruncGaussian(0, 1, 0, kInf));
  EXPECT_EQ(ParseDist("  gamma( k = 2 , theta=1 ) "), MgfDist::Gamma(2, 1));
}

TEST(DistTest, ParseErrors) {
  EXPECT_THROW(ParseDist("weibull(k=1)"), ParseError);
  EXPECT_THROW(ParseDist("gamma(k=2)"), ParseError);
  EXPECT_THROW(ParseDist("gamma(k=2, theta=1"), ParseError);
  EXPECT_THROW(ParseDist("gamma(k=2, theta=nan)"), ParseError);
  EXPECT_THROW(ParseDist("gamma(k=2, beta=1)"), ParseError);
  // Well-formed but invalid parameters keep their own error type.
  EXPECT_THROW(ParseDist("gamma(k=-2, theta=1)"), InvalidArgument);
}

TEST(ComboTest, RoundTrip) {
  Rng rng(9);
  for (int i = 0; i < 300; ++i) {
    const LinearCombo combo = testing::RandomWellBehavedCombo(rng).Scaled(
        testing::LogUniform(rng, 1e-3, 1e3));
    EXPECT_EQ(ParseCombo(FormatCombo(combo)), combo) << FormatCombo(combo);
  }
  const std::string text = "0.5*gamma(k=2, theta=1) + 0.5*uniform(a=0, b=2)";
  EXPECT_EQ(FormatCombo(ParseCombo(text)), text);
  EXPECT_THROW(ParseCombo(""), ParseError);
  EXPECT_THROW(ParseCombo("0.5*gamma(k=2, theta=1) +"), ParseError);
}

TEST(MechanismTest, RoundTrip) {
  const std::vector<NoiseMechanism> mechanisms = {
      LaplaceMechanism{1.5},
      StaircaseMechanism{1, 0.5, 0.3},
      GaussianMechanism{2},
      RandomizedResponseMechanism{0.75},
      R2dpMechanism{ParseCombo("0.5*gamma(k=2, theta=1) + 0.5*uniform(a=0, b=2)")},
  };
  for (const NoiseMechanism& m : mechanisms) {
    const std::string text = FormatMechanism(m);
    EXPECT_EQ(FormatMechanism(ParseMechanism(text)), text);
    EXPECT_EQ(ParseMechanism(text).index(), m.index()) << text;
  }
  EXPECT_EQ(FormatMechanism(LaplaceMechanism{1}), "laplace(b=1)");
  EXPECT_THROW(ParseMechanism("laplace(b=-1)"), InvalidArgument);
  EXPECT_THROW(ParseMechanism("exponential(rate=1)"), ParseError);
}

CalibratedMechanism SampleRecord() {
  CalibratedMechanism r{
      .combo = ParseCombo("0.7*gamma(k=3.25, theta=0.1) + 0.3*degenerate(k0=2)"),
      .achieved_epsilon = 1.0000001,
      .target_epsilon = 1,
      .sensitivity = 0.5,
      .metric = Metric::kUsefulness,
      .metric_parameter = 0.4,
      .predicted_utility = 0.6,
      .baseline_laplace_utility = 0.55,
      .staircase_utility = 0.58,
      .diagnostics = {}};
  r.diagnostics.evaluations = 1234;
  r.diagnostics.constraint_residual = 1e-7;
  r.diagnostics.winning_restart = 3;
  r.diagnostics.hit_box_boundary = true;
  r.diagnostics.filtered_candidates = 17;
  return r;
}

void ExpectSame(const CalibratedMechanism& a, const CalibratedMechanism& b) {
  EXPECT_EQ(a.combo, b.combo);
  EXPECT_EQ(a.achieved_epsilon, b.achieved_epsilon);
  EXPECT_EQ(a.target_epsilon, b.target_epsilon);
  EXPECT_EQ(a.sensitivity, b.sensitivity);
  EXPECT_EQ(a.metric, b.metric);
  EXPECT_EQ(a.metric_parameter, b.metric_parameter);
  EXPECT_EQ(a.predicted_utility, b.predicted_utility);
  EXPECT_EQ(a.baseline_laplace_utility, b.baseline_laplace_utility);
  EXPECT_EQ(a.staircase_utility, b.staircase_utility);
  EXPECT_EQ(a.diagnostics.evaluations, b.diagnostics.evaluations);
  EXPECT_EQ(a.diagnostics.constraint_residual, b.diagnostics.constraint_residual);
  EXPECT_EQ(a.diagnostics.winning_restart, b.diagnostics.winning_restart);
  EXPECT_EQ(a.diagnostics.hit_box_boundary, b.diagnostics.hit_box_boundary);
  EXPECT_EQ(a.diagnostics.budget_exhausted, b.diagnostics.budget_exhausted);
  EXPECT_EQ(a.diagnostics.filtered_candidates, b.diagnostics.filtered_candidates);
  EXPECT_EQ(a.diagnostics.failed_candidates, b.diagnostics.failed_candidates);
}

TEST(RecordTest, RoundTrip) {
  CalibratedMechanism r = SampleRecord();
  std::stringstream s;
  WriteCalibratedRecord(r, s);
  EXPECT_NE(s.str().find("[mechanism]"), std::string::npos);
  EXPECT_NE(s.str().find("[diagnostics]"), std::string::npos);
  ExpectSame(ReadCalibratedRecord(s), r);

  r.staircase_utility.reset();
  std::stringstream t;
  WriteCalibratedRecord(r, t);
  ExpectSame(ReadCalibratedRecord(t), r);
}

TEST(RecordTest, MalformedInput) {
  std::stringstream empty;
  EXPECT_THROW(ReadCalibratedRecord(empty), ParseError);
  std::stringstream s;
  WriteCalibratedRecord(SampleRecord(), s);
  std::string text = s.str();
  text.replace(text.find("gamma(k=3.25"), 11, "gamma(k=oops");
  std::stringstream broken(text);
  EXPECT_THROW(ReadCalibratedRecord(broken), ParseError);
}

}  // namespace
}  // namespace r2dp
