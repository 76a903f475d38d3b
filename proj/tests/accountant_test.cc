// Copyright 2026 The AdaDP Authors
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

#include "adadp/accountant.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "adadp/errors.h"

namespace adadp {
namespace {

// Reference values from tools/oracles/accountant_oracle.py (mpmath, 300
// digits).
struct EpsilonCase {
  double q;
  double sigma;
  std::int64_t steps;
  double epsilon;
  int alpha;
};

constexpr EpsilonCase kEpsilonGrid[] = {
    {0.001, 0.8, 100, 1.6500429478089295, 8},
    {0.001, 0.8, 2000, 1.7514898369736838, 8},
    {0.001, 2.0, 100, 0.21794207256449087, 55},
    {0.001, 2.0, 2000, 0.28028711654511546, 54},
    {0.01, 0.7, 100, 5.0255782593962281, 4},
    {0.01, 0.7, 2000, 14.589314133697561, 2},
    {0.01, 0.9, 100, 2.6488067145695765, 6},
    {0.01, 0.9, 2000, 7.2640525448468865, 4},
    {0.01, 1.5, 100, 0.88964492139898216, 20},
    {0.01, 1.5, 2000, 3.5469858877450705, 8},
    {0.01, 3.0, 100, 0.351339343529341, 64},
    {0.01, 3.0, 2000, 1.5452502626222954, 16},
    {0.01, 8.0, 100, 0.20373955587582311, 64},
    {0.01, 8.0, 2000, 0.55273756629693124, 43},
    {0.05, 1.0, 100, 8.1479677716483333, 4},
    {0.05, 1.0, 2000, 38.512674263348579, 2},
    {0.05, 2.0, 100, 2.899362012173359, 9},
    {0.05, 2.0, 2000, 14.464964183625673, 3},
    {0.05, 4.0, 100, 1.3098611567899907, 19},
    {0.05, 4.0, 2000, 6.1759992710095156, 5},
};

TEST(RdpGaussianTest, ClosedForm) {
  EXPECT_DOUBLE_EQ(RdpGaussian(2, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(RdpGaussian(10, 2.0), 10.0 / 8.0);
  EXPECT_THROW(RdpGaussian(1, 1.0), DomainError);
  EXPECT_THROW(RdpGaussian(2, 0.0), DomainError);
}

TEST(BFunctionTest, LowOrderIdentities) {
  for (double sigma : {0.5, 0.9, 3.0, 8.0}) {
    EXPECT_NEAR(static_cast<double>(BFunction(0, sigma)), 1.0, 1e-12);
    EXPECT_NEAR(static_cast<double>(BFunction(1, sigma)), 0.0, 1e-12);
    const double b2 = std::expm1(1.0 / (sigma * sigma));
    EXPECT_NEAR(static_cast<double>(BFunction(2, sigma)) / b2, 1.0, 1e-9);
  }
}

TEST(BFunctionTest, MatchesHighPrecision) {
  struct Case {
    int l;
    double sigma;
    double value;
  };
  const Case cases[] = {
      {3, 0.5, -162592.99696890448809},
      {8, 0.5, 4.3750394472371404549e+48},
      {5, 0.9, -222099.08620692594853},
      {8, 0.9, 1028102149868076.0759},
      {3, 3.0, -0.043055218860498582762},
      {6, 3.0, 0.13464753059143587618},
      {8, 3.0, 0.55826537293515568865},
  };
  for (const Case& c : cases) {
    const double got = static_cast<double>(BFunction(c.l, c.sigma));
    EXPECT_NEAR(got / c.value, 1.0, 1e-12) << "l=" << c.l << " s=" << c.sigma;
  }
}

TEST(BFunctionTest, OverflowIsReported) {
  EXPECT_THROW(BFunction(128, 0.5), OverflowError);
  // The log table carries the same value without overflowing.
  const auto table = LogAbsBTable(128, 0.5);
  EXPECT_TRUE(std::isfinite(static_cast<double>(table[128])));
  EXPECT_TRUE(std::isinf(static_cast<double>(table[1])));
}

TEST(BFunctionTest, EvenOrdersArePositive) {
  for (double sigma : {0.3, 0.9, 3.0, 50.0}) {
    const auto table = LogAbsBTable(64, sigma);
    for (int l = 2; l <= 64; l += 2) {
      EXPECT_TRUE(std::isfinite(static_cast<double>(table[l])))
          << "l=" << l << " s=" << sigma;
    }
  }
}

TEST(SubsampledRdpTest, SingleStepMatchesOracle) {
  EXPECT_NEAR(SubsampledRdpEpsilon(2, 0.01, 0.9) / 0.00068714248802394508332,
              1.0, 1e-10);
  EXPECT_NEAR(SubsampledRdpEpsilon(6, 0.01, 0.9) / 0.0034622162157553079999,
              1.0, 1e-10);
  EXPECT_NEAR(SubsampledRdpEpsilon(32, 0.05, 2.0) / 0.96198273380111883766,
              1.0, 1e-10);
  EXPECT_NEAR(SubsampledRdpEpsilon(64, 0.001, 0.8) / 43.004602484226393189,
              1.0, 1e-10);
}

TEST(SubsampledRdpTest, ZeroSamplingCostsNothing) {
  for (int a : {2, 10, 64}) EXPECT_EQ(SubsampledRdpEpsilon(a, 0.0, 1.0), 0.0);
  const EpsilonResult r = TotalDpEpsilon({1.0, 0.0, 1000}, 1e-5);
  EXPECT_EQ(r.alpha, 64);
  EXPECT_NEAR(r.epsilon, std::log(1e5) / 63.0, 1e-15);
}

TEST(SubsampledRdpTest, OrderTwoClosedForm) {
  // Only the second-order term survives at alpha = 2.
  const AccountantOptions alt{SecondOrderTerm::kAlternative};
  for (double sigma : {0.7, 1.0, 3.0}) {
    const double x = 1.0 / (sigma * sigma);
    const double q = 0.03;
    const double standard = std::min(4 * std::expm1(x), 2 * std::exp(x));
    const double alternative = std::min(4 * std::exp(x - 1), 2 * std::exp(x));
    EXPECT_NEAR(SubsampledRdpEpsilon(2, q, sigma),
                std::log1p(q * q * standard), 1e-15);
    EXPECT_NEAR(SubsampledRdpEpsilon(2, q, sigma, alt),
                std::log1p(q * q * alternative), 1e-15);
  }
}

TEST(SubsampledRdpTest, RejectsBadArguments) {
  EXPECT_THROW(SubsampledRdpEpsilon(1, 0.01, 1.0), DomainError);
  EXPECT_THROW(SubsampledRdpEpsilon(2, 1.5, 1.0), DomainError);
  EXPECT_THROW(SubsampledRdpEpsilon(2, 0.01, -1.0), DomainError);
}

TEST(TotalDpEpsilonTest, MatchesOracleGrid) {
  for (const EpsilonCase& c : kEpsilonGrid) {
    const EpsilonResult r = TotalDpEpsilon({c.sigma, c.q, c.steps}, 1e-5);
    EXPECT_NEAR(r.epsilon / c.epsilon, 1.0, 1e-6)
        << "q=" << c.q << " sigma=" << c.sigma << " T=" << c.steps;
    EXPECT_EQ(r.alpha, c.alpha)
        << "q=" << c.q << " sigma=" << c.sigma << " T=" << c.steps;
  }
}

TEST(TotalDpEpsilonTest, ReferenceSettingValue) {
  // L=600 of N=60000 at sigma 0.9 for 1800 steps; this bound gives 6.92.
  const EpsilonResult r = TotalDpEpsilon({0.9, 0.01, 1800}, 1e-5);
  EXPECT_NEAR(r.epsilon, 6.92141147252787, 1e-9);
  EXPECT_EQ(r.alpha, 4);
}

TEST(TotalDpEpsilonTest, MonotoneInEachArgument) {
  const double sigmas[] = {0.8, 1.0, 1.5, 2.5, 4.0};
  const double qs[] = {0.001, 0.005, 0.02, 0.05};
  const std::int64_t steps[] = {10, 100, 1000};
  for (double q : qs) {
    for (std::int64_t t : steps) {
      double prev = std::numeric_limits<double>::infinity();
      for (double s : sigmas) {
        const double e = TotalDpEpsilon({s, q, t}, 1e-5).epsilon;
        EXPECT_LE(e, prev);
        prev = e;
      }
    }
  }
  for (double s : sigmas) {
    for (std::int64_t t : steps) {
      double prev = 0.0;
      for (double q : qs) {
        const double e = TotalDpEpsilon({s, q, t}, 1e-5).epsilon;
        EXPECT_GE(e, prev);
        prev = e;
      }
    }
    for (double q : qs) {
      double prev = 0.0;
      for (std::int64_t t : steps) {
        const double e = TotalDpEpsilon({s, q, t}, 1e-5).epsilon;
        EXPECT_GE(e, prev);
        prev = e;
      }
    }
  }
}

TEST(RdpCurveTest, CompositionIsLinear) {
  const RdpCurve one = SubsampledRdpCurve(0.02, 1.3, {});
  const RdpCurve many = one.Compose(250);
  ASSERT_EQ(one.entries.size(), 63u);
  for (std::size_t i = 0; i < one.entries.size(); ++i) {
    EXPECT_EQ(many.entries[i].alpha, one.entries[i].alpha);
    EXPECT_DOUBLE_EQ(many.entries[i].epsilon, 250 * one.entries[i].epsilon);
  }
  const EpsilonResult a = TotalDpEpsilon(one, 250, 1e-5);
  const EpsilonResult b = TotalDpEpsilon({1.3, 0.02, 250}, 1e-5);
  EXPECT_EQ(a.epsilon, b.epsilon);
  EXPECT_EQ(a.alpha, b.alpha);
}

TEST(RdpCurveTest, AlphaRangeIsRespected) {
  const RdpCurve c = SubsampledRdpCurve(0.01, 1.0, {3, 7});
  ASSERT_EQ(c.entries.size(), 5u);
  EXPECT_EQ(c.entries.front().alpha, 3);
  EXPECT_EQ(c.entries.back().alpha, 7);
  EXPECT_THROW(SubsampledRdpCurve(0.01, 1.0, {1, 7}), DomainError);
  EXPECT_THROW(SubsampledRdpCurve(0.01, 1.0, {8, 7}), DomainError);
}

TEST(SmallestDeltaTest, MatchesOracle) {
  struct Case {
    double eps, q, sigma;
    std::int64_t steps;
    double delta;
    int alpha;
  };
  const Case cases[] = {
      {4.0, 0.01, 0.9, 1800, 0.021128575676281504, 3},
      {1.0, 0.01, 3.0, 1000, 6.2330769182702531e-5, 20},
      {2.0, 0.05, 4.0, 300, 0.00014915111014032014, 10},
  };
  for (const Case& c : cases) {
    const DeltaResult r =
        SmallestDeltaForEpsilon(c.eps, {c.sigma, c.q, c.steps});
    EXPECT_NEAR(r.delta / c.delta, 1.0, 1e-6);
    EXPECT_EQ(r.alpha, c.alpha);
    EXPECT_FALSE(r.vacuous);
  }
}

TEST(SmallestDeltaTest, VacuousRegimeIsFlagged) {
  const DeltaResult r = SmallestDeltaForEpsilon(0.1, {0.5, 0.5, 100000});
  EXPECT_TRUE(r.vacuous);
  EXPECT_EQ(r.delta, 1.0);
}

TEST(SmallestDeltaTest, InverseOfEpsilon) {
  const MechanismParams p{1.1, 0.01, 500};
  const EpsilonResult e = TotalDpEpsilon(p, 1e-6);
  const DeltaResult d = SmallestDeltaForEpsilon(e.epsilon, p);
  EXPECT_LE(d.delta, 1e-6 * (1 + 1e-9));
}

TEST(SmallestDeltaTest, NondecreasingInSteps) {
  const RdpCurve curve = SubsampledRdpCurve(0.05, 2.0, {});
  double prev = 0.0;
  for (std::int64_t t = 1; t <= 400; t += 7) {
    const double d = SmallestDeltaForEpsilon(2.0, curve, t).delta;
    EXPECT_GE(d, prev);
    prev = d;
  }
}

TEST(CalibrateSigmaTest, MeetsBudgetTightly) {
  for (double eps : {0.5, 2.0, 8.0}) {
    const PrivacySpec spec{eps, 1e-5};
    const double sigma = CalibrateSigma(spec, 0.01, 1800);
    EXPECT_LE(TotalDpEpsilon({sigma, 0.01, 1800}, 1e-5).epsilon, eps);
    const double looser = sigma * (1 - 2 * kCalibrationRelativeTolerance);
    EXPECT_GT(TotalDpEpsilon({looser, 0.01, 1800}, 1e-5).epsilon, eps);
  }
}

TEST(CalibrateSigmaTest, ImpossibleBudgetThrows) {
  // Even q = 0 cannot get below log(1/delta)/63.
  EXPECT_THROW(CalibrateSigma({0.1, 1e-5}, 0.01, 100), NumericalError);
  EXPECT_THROW(CalibrateSigma({0.0, 1e-5}, 0.01, 100), DomainError);
}

}  // namespace
}  // namespace adadp
