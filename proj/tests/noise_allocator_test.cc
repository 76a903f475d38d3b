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

#include "adadp/noise_allocator.h"

#include <cmath>

#include <gtest/gtest.h>

#include "adadp/errors.h"
#include "adadp/random.h"

namespace adadp {
namespace {

Eigen::VectorXd V(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

TEST(FeasibilityTest, WorkedInstances) {
  EXPECT_TRUE(CheckFeasibility(V({12, 6}), V({17, 8.5}), 1.0));
  EXPECT_TRUE(CheckFeasibility(V({12, 6}), V({13.5, 13.5}), 1.0));
  EXPECT_FALSE(CheckFeasibility(V({1}), V({0.5}), 1.0));
}

TEST(FeasibilityTest, ZeroSensitivityIsIgnored) {
  EXPECT_DOUBLE_EQ(FeasibilitySum(V({0, 1}), V({0, 2})), 0.25);
  EXPECT_TRUE(CheckFeasibility(V({0, 1}), V({0, 1}), 1.0));
  EXPECT_THROW(FeasibilitySum(V({1, 1}), V({0, 1})), DomainError);
  EXPECT_THROW(FeasibilitySum(V({1}), V({1, 1})), DimensionError);
}

TEST(AllocateSigmasTest, HandEvaluated) {
  NoisePlan p = AllocateSigmas(V({1, 1, 1, 1}), {1.0, 1e-6, 4.0}, 1.0);
  EXPECT_EQ(p.mode, ClipMode::kLocal);
  for (int i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(p.sensitivities[i], 1.0);
    EXPECT_DOUBLE_EQ(p.sigmas[i], 2.0);
  }
  EXPECT_NEAR(FeasibilitySum(p.sensitivities, p.sigmas), 1.0, 1e-15);

  p = AllocateSigmas(V({4, 1}), {1.2, 1e-6, 4.0}, 3.0);
  EXPECT_DOUBLE_EQ(p.sensitivities[0], 2.4);
  EXPECT_DOUBLE_EQ(p.sensitivities[1], 1.2);
  EXPECT_NEAR(p.sigmas[0], 1.2 * 3 * std::sqrt(8.0), 1e-14);
  EXPECT_NEAR(p.sigmas[1], 1.2 * 3 * std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(FeasibilitySum(p.sensitivities, p.sigmas), 1.0 / 9.0, 1e-15);
}

TEST(AllocateSigmasTest, ZeroPriorGivesNoNoise) {
  const NoisePlan p = AllocateSigmas(Eigen::VectorXd::Zero(5), {}, 2.0);
  EXPECT_TRUE(p.sensitivities.isZero());
  EXPECT_TRUE(p.sigmas.isZero());
  EXPECT_TRUE(CheckFeasibility(p.sensitivities, p.sigmas, 2.0));
}

TEST(AllocateSigmasTest, RandomPriorsAreFeasibleWithEquality) {
  Rng rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const int m = static_cast<int>(rng.UniformInt(1, 50));
    Eigen::VectorXd prior(m);
    int nonzero = 0;
    for (int i = 0; i < m; ++i) {
      // Mix of zeros and values spanning many orders of magnitude.
      prior[i] = rng.Uniform(0, 1) < 0.2
                     ? 0.0
                     : std::pow(10.0, rng.Uniform(-12, 4));
      nonzero += prior[i] > 0;
    }
    const double sigma_star = std::pow(10.0, rng.Uniform(-1, 2));
    const double beta = rng.Uniform(0.1, 3.0);
    const NoisePlan p = AllocateSigmas(prior, {beta, 1e-6, 4.0}, sigma_star);
    ASSERT_TRUE(CheckFeasibility(p.sensitivities, p.sigmas, sigma_star));
    const double expected =
        static_cast<double>(nonzero) / (m * sigma_star * sigma_star);
    const double sum = FeasibilitySum(p.sensitivities, p.sigmas);
    if (nonzero == 0) {
      EXPECT_EQ(sum, 0.0);
    } else {
      EXPECT_NEAR(sum / expected, 1.0, 1e-9);
    }
  }
}

TEST(GlobalPlanTest, UniformSigma) {
  const NoisePlan p = GlobalPlan(3, {1.2, 1e-6, 4.0}, 2.5);
  EXPECT_EQ(p.mode, ClipMode::kGlobal);
  for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(p.sigmas[i], 10.0);
}

TEST(LocalClipTest, Examples) {
  EXPECT_EQ(LocalClip(V({5, -5}), V({3, 3})), V({3, -3}));
  EXPECT_EQ(LocalClip(V({0.1, -0.2}), V({1, 1})), V({0.1, -0.2}));
  EXPECT_EQ(LocalClip(V({2.4, 0.5}), V({2.4, 0})), V({2.4, 0}));
  EXPECT_THROW(LocalClip(V({1}), V({1, 1})), DimensionError);
}

TEST(LocalClipTest, Idempotent) {
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    Eigen::VectorXd g(6), s(6);
    for (int i = 0; i < 6; ++i) {
      g[i] = rng.Normal(3.0);
      s[i] = std::abs(rng.Normal(1.0));
    }
    const Eigen::VectorXd once = LocalClip(g, s);
    EXPECT_EQ(LocalClip(once, s), once);
    EXPECT_TRUE((once.array().abs() <= s.array()).all());
  }
}

TEST(GlobalClipTest, Examples) {
  const Eigen::VectorXd c = GlobalClip(V({3, 4}), 4.0);
  EXPECT_NEAR(c[0], 2.4, 1e-15);
  EXPECT_NEAR(c[1], 3.2, 1e-15);
  EXPECT_NEAR(c.norm(), 4.0, 1e-15);
  EXPECT_EQ(GlobalClip(V({1, 0}), 4.0), V({1, 0}));
  EXPECT_EQ(GlobalClip(Eigen::VectorXd::Zero(3), 1.0),
            Eigen::VectorXd::Zero(3));
  EXPECT_THROW(GlobalClip(V({1}), 0.0), DomainError);
}

TEST(GlobalClipTest, ShrinksAlongDirection) {
  Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    Eigen::VectorXd g(5);
    for (int i = 0; i < 5; ++i) g[i] = rng.Normal(2.0);
    const double bound = rng.Uniform(0.1, 8.0);
    const Eigen::VectorXd c = GlobalClip(g, bound);
    EXPECT_LE(c.norm(), std::max(bound, 0.0) * (1 + 1e-15));
    EXPECT_LE(c.norm(), g.norm());
    const double lambda = c.dot(g) / g.squaredNorm();
    EXPECT_GT(lambda, 0.0);
    EXPECT_LE(lambda, 1.0 + 1e-15);
    EXPECT_LT((c - lambda * g).norm(), 1e-12);
  }
}

TEST(SelectClipModeTest, Examples) {
  EXPECT_EQ(SelectClipMode(Eigen::VectorXd::Zero(4), 1e-6), ClipMode::kGlobal);
  EXPECT_EQ(SelectClipMode(Eigen::VectorXd::Ones(4), 1e-6), ClipMode::kGlobal);
  EXPECT_EQ(SelectClipMode(V({0, 4}), 1e-6), ClipMode::kLocal);
  // Population variance of sqrt(prior) = (0, 2) is exactly 1.
  EXPECT_EQ(SelectClipMode(V({0, 4}), 1.0), ClipMode::kGlobal);
  EXPECT_EQ(SelectClipMode(V({0, 4}), 0.999), ClipMode::kLocal);
  // Variance of the prior itself is 4.
  EXPECT_EQ(SelectClipMode(V({0, 4}), 3.9, ModeStatistic::kPrior),
            ClipMode::kLocal);
}

TEST(AddNoiseTest, ZeroSigmaPassesThrough) {
  NoisePlan p;
  p.sigmas = Eigen::VectorXd::Zero(3);
  Rng rng(1);
  EXPECT_EQ(AddNoise(V({1, 2, 3}), p, rng), V({1, 2, 3}));
}

TEST(AddNoiseTest, MomentsAndDeterminism) {
  NoisePlan p;
  p.sigmas = Eigen::VectorXd::Ones(2);
  Rng rng(2024);
  const int n = 1000000;
  Eigen::Vector2d sum = Eigen::Vector2d::Zero(), sq = Eigen::Vector2d::Zero();
  for (int t = 0; t < n; ++t) {
    const Eigen::VectorXd z = AddNoise(Eigen::VectorXd::Zero(2), p, rng);
    sum += z;
    sq += z.cwiseAbs2();
  }
  for (int i = 0; i < 2; ++i) {
    const double mean = sum[i] / n;
    EXPECT_LT(std::abs(mean), 4e-3);
    EXPECT_NEAR(sq[i] / n - mean * mean, 1.0, 0.01);
  }
  Rng a(9), b(9);
  p.sigmas = V({0.5, 2.0});
  EXPECT_EQ(AddNoise(V({1, 1}), p, a), AddNoise(V({1, 1}), p, b));
}

TEST(AnalyticDpDeltaTest, MatchesHighPrecision) {
  // tools/oracles/noise_oracle.py
  EXPECT_NEAR(AnalyticDpDelta(1, 1), 0.1269367375066439458, 1e-15);
  EXPECT_NEAR(AnalyticDpDelta(0.25, 0.5), 0.052440323287669661712, 1e-15);
  EXPECT_NEAR(AnalyticDpDelta(4, 2), 0.33189799877682939357, 1e-14);
  EXPECT_NEAR(AnalyticDpDelta(16, 3), 0.83450008185309930927, 1e-14);
  EXPECT_NEAR(AnalyticDpDelta(1e-3, 1), 0.0, 1e-200);
  EXPECT_EQ(AnalyticDpDelta(0.0, 1.0), 0.0);
}

TEST(AnalyticDpDeltaTest, MonotoneInHAndEpsilon) {
  for (int i = 0; i < 100; ++i) {
    const double h1 = 0.05 + 0.1 * i;
    const double h2 = h1 + 0.1;
    EXPECT_LT(AnalyticDpDelta(h1, 1.0), AnalyticDpDelta(h2, 1.0));
    const double e1 = 0.05 + 0.05 * i;
    EXPECT_GT(AnalyticDpDelta(2.0, e1), AnalyticDpDelta(2.0, e1 + 0.05));
  }
}

double EpsilonForDelta(double h, double target) {
  double lo = 0.0, hi = 50.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (AnalyticDpDelta(h, mid) > target ? lo : hi) = mid;
  }
  return hi;
}

TEST(MonteCarloDpCheckTest, AgreesWithAnalytic) {
  Rng rng(77);
  const Eigen::VectorXd s = V({12, 6}), sigma = V({17, 8.5});
  const double h = FeasibilitySum(s, sigma);
  const double eps = EpsilonForDelta(h, 1e-2);
  const MonteCarloEstimate mc = MonteCarloDpCheck(s, sigma, eps, 400000, rng);
  EXPECT_NEAR(mc.estimate, 1e-2, 3 * mc.standard_error);

  const MonteCarloEstimate one =
      MonteCarloDpCheck(V({1}), V({1}), 1.0, 1000000, rng);
  EXPECT_NEAR(one.estimate, AnalyticDpDelta(1, 1), 3 * one.standard_error);
}

TEST(MonteCarloDpCheckTest, EdgeCases) {
  Rng rng(1);
  const MonteCarloEstimate zero =
      MonteCarloDpCheck(V({0, 0}), V({1, 1}), 0.5, kMinMonteCarloTrials, rng);
  EXPECT_EQ(zero.estimate, 0.0);
  EXPECT_THROW(MonteCarloDpCheck(V({1}), V({1}), 1.0, 1000, rng), DomainError);
}

TEST(CosineStudyTest, MatchesSamplingOracle) {
  // 10^7-draw numpy means from tools/oracles/noise_oracle.py.
  struct Case {
    Eigen::VectorXd sigmas;
    double mean;
  };
  const Case cases[] = {{V({17, 8.5}), 0.47052232961800006},
                        {V({13.5, 13.5}), 0.47793373408660694},
                        {V({12.4, 24.8}), 0.39951484995528164}};
  Rng rng(5);
  for (const Case& c : cases) {
    const CosineStudyResult r =
        CosineSimilarityStudy(V({10, 5}), c.sigmas, 200000, rng);
    EXPECT_NEAR(r.mean, c.mean, 4 * r.standard_error + 1e-3);
  }
}

TEST(CosineStudyTest, DeterministicAndValidated) {
  Rng a(8), b(8);
  EXPECT_EQ(CosineSimilarityStudy(V({10, 5}), V({1, 1}), 100, a).mean,
            CosineSimilarityStudy(V({10, 5}), V({1, 1}), 100, b).mean);
  EXPECT_THROW(CosineSimilarityStudy(V({0, 0}), V({1, 1}), 10, a),
               DomainError);
  Rng c(1);
  EXPECT_NEAR(CosineSimilarityStudy(V({3, 4}), V({0, 0}), 10, c).mean, 1.0,
              1e-15);
}

}  // namespace
}  // namespace adadp
