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

#include "adadp/optimizer.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "adadp/errors.h"
#include "adadp/objectives.h"
#include "quadratic.h"

namespace adadp {
namespace {

TrainConfig NoiseFree() {
  TrainConfig c;
  c.eta = 0.05;
  c.lot_size = 1;
  c.dataset_size = 1;
  c.sigma_star = 0.0;
  c.clip.beta = 1e12;
  c.clip.global_bound = 1e12;
  c.steps = 10;
  return c;
}

TEST(SampleLotTest, FullSetAndDeterminism) {
  Rng rng(1);
  const auto all = SampleLot(10, 10, rng);
  ASSERT_EQ(all.size(), 10u);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(all[i], i);
  Rng a(5), b(5);
  EXPECT_EQ(SampleLot(1000, 37, a), SampleLot(1000, 37, b));
  EXPECT_THROW(SampleLot(10, 11, rng), DomainError);
  EXPECT_THROW(SampleLot(10, 0, rng), DomainError);
}

TEST(SampleLotTest, UniformInclusion) {
  const std::int64_t n = 60000, lot = 600, draws = 10000;
  std::vector<int> hits(n, 0);
  Rng rng(2);
  for (int d = 0; d < draws; ++d) {
    const auto idx = SampleLot(n, lot, rng);
    ASSERT_EQ(static_cast<std::int64_t>(idx.size()), lot);
    ASSERT_TRUE(std::adjacent_find(idx.begin(), idx.end(),
                                   std::greater_equal<>()) == idx.end());
    for (std::int64_t i : idx) ++hits[i];
  }
  const double p = 0.01;
  const double se = std::sqrt(p * (1 - p) / draws);
  int outside3 = 0;
  double worst = 0;
  for (int h : hits) {
    const double z = std::abs(h / static_cast<double>(draws) - p) / se;
    outside3 += z > 3;
    worst = std::max(worst, z);
  }
  // About 0.27% of indices fall beyond 3 SE by chance.
  EXPECT_LT(outside3, n / 200);
  EXPECT_LT(worst, 6.0);
}

TEST(AdaDpStepTest, NoiseFreeReducesToRmsProp) {
  TrainConfig c = NoiseFree();
  c.gamma = 1.0;
  const ParameterVector theta = Eigen::Vector3d(1, -2, 0.5);
  const EmaState state = EmaState::Zero(3);
  Eigen::MatrixXd g(1, 3);
  g << 0.3, -4.0, 2.0;
  Rng rng(0);
  const StepOutcome out = AdaDpStep(theta, state, g, c, rng);
  const RmsPropResult ref = RmsPropStep(theta, state, g.row(0).transpose(), c);
  EXPECT_EQ(out.params, ref.params);
  EXPECT_EQ(out.state.lr_ema, ref.state.lr_ema);
  // gamma = 1: the step is eta * g / sqrt(g^2 + eps0), i.e. about eta sign(g).
  EXPECT_NEAR(out.params[1], -2.0 + 0.05, 1e-9);
}

TEST(AdaDpStepTest, ZeroGradientsLeaveParametersAlone) {
  TrainConfig c = NoiseFree();
  c.sigma_star = 2.0;
  c.clip.global_bound = 1.0;
  const ParameterVector theta = Eigen::Vector2d(1, 2);
  Rng rng(0);
  // Zero state keeps global mode, whose noise would move theta; so the
  // claim holds only without noise.
  c.sigma_star = 0.0;
  const StepOutcome out =
      AdaDpStep(theta, EmaState::Zero(2), Eigen::MatrixXd::Zero(4, 2), c, rng);
  EXPECT_EQ(out.params, theta);
  EXPECT_TRUE(out.state.lr_ema.isZero());
  EXPECT_TRUE(out.state.prior_ema.isZero());
  EXPECT_EQ(out.state.step, 1);
}

TEST(AdaDpStepTest, RejectsBadInput) {
  const TrainConfig c = NoiseFree();
  Rng rng(0);
  const ParameterVector theta = Eigen::Vector2d(1, 2);
  Eigen::MatrixXd bad(1, 2);
  bad << 1.0, std::nan("");
  EXPECT_THROW(AdaDpStep(theta, EmaState::Zero(2), bad, c, rng),
               NumericalError);
  EXPECT_THROW(AdaDpStep(theta, EmaState::Zero(2), Eigen::MatrixXd::Ones(1, 3),
                         c, rng),
               DimensionError);
  EXPECT_THROW(AdaDpStep(theta, EmaState::Zero(3), Eigen::MatrixXd::Ones(1, 2),
                         c, rng),
               DimensionError);
}

// Straight-line scalar version of the private step, written independently of
// the library's vector code. f(theta) = 0.5 ||theta||^2 with one example.
struct Scalar2 {
  double theta[2];
  double e[2] = {0, 0};
  double ep[2] = {0, 0};
};

void ScalarPrivateStep(Scalar2& s, const TrainConfig& c, Rng& rng,
                       bool adaptive_noise, bool adaptive_lr) {
  const double g[2] = {s.theta[0], s.theta[1]};
  bool local = false;
  if (adaptive_noise) {
    const double r0 = std::sqrt(s.ep[0]), r1 = std::sqrt(s.ep[1]);
    const double mean = 0.5 * (r0 + r1);
    const double var =
        0.5 * ((r0 - mean) * (r0 - mean) + (r1 - mean) * (r1 - mean));
    local = var > c.clip.threshold;
  }
  double noisy[2];
  if (local) {
    for (int i = 0; i < 2; ++i) {
      const double si = c.clip.beta * std::sqrt(s.ep[i]);
      const double sigma =
          c.clip.beta * c.sigma_star * std::sqrt(2.0 * s.ep[i]);
      const double clipped = std::min(std::max(g[i], -si), si);
      const double z = rng.Normal();
      noisy[i] = sigma != 0.0 ? clipped + sigma * z : clipped;
    }
  } else {
    const double norm = std::sqrt(g[0] * g[0] + g[1] * g[1]);
    const double scale = std::max(1.0, norm / c.clip.global_bound);
    for (int i = 0; i < 2; ++i) {
      const double z = rng.Normal();
      noisy[i] = g[i] / scale + c.clip.global_bound * c.sigma_star * z;
    }
  }
  for (int i = 0; i < 2; ++i) {
    s.e[i] = (1 - c.gamma) * s.e[i] + c.gamma * noisy[i] * noisy[i];
    s.ep[i] = c.gamma_prime * s.ep[i] + (1 - c.gamma_prime) * g[i] * g[i];
    const double delta =
        adaptive_lr ? noisy[i] / std::sqrt(s.e[i] + c.eps0) : noisy[i];
    s.theta[i] -= c.eta * delta;
  }
}

class ScalarOracleTest : public ::testing::TestWithParam<Algorithm> {};

TEST_P(ScalarOracleTest, FiveStepsMatch) {
  const Algorithm algorithm = GetParam();
  const bool adaptive_noise =
      algorithm == Algorithm::kAdaDp || algorithm == Algorithm::kAdaN;
  const bool adaptive_lr =
      algorithm == Algorithm::kAdaDp || algorithm == Algorithm::kAdaL;
  TrainConfig c;
  c.eta = 0.1;
  c.lot_size = 1;
  c.dataset_size = 1;
  c.sigma_star = 0.7;
  c.clip.beta = 1.5;
  c.clip.global_bound = 2.0;
  c.steps = 5;

  const QuadraticObjective f(Eigen::MatrixXd::Zero(1, 2));
  const ParameterVector start = Eigen::Vector2d(3.0, -1.0);
  const std::uint64_t seed = 42;
  const TrainResult run = Train(f, c, algorithm, start, seed);

  Scalar2 s{{3.0, -1.0}};
  Rng noise = Rng(seed).Derive(SeedRole::kNoise);
  bool saw_local = false;
  for (int t = 0; t < 5; ++t) {
    ScalarPrivateStep(s, c, noise, adaptive_noise, adaptive_lr);
    const StepRecord& r = run.records[t];
    saw_local |= r.mode == ClipMode::kLocal;
    EXPECT_NEAR(r.params_after[0], s.theta[0], 1e-12 * (1 + std::abs(s.theta[0])));
    EXPECT_NEAR(r.params_after[1], s.theta[1], 1e-12 * (1 + std::abs(s.theta[1])));
  }
  EXPECT_EQ(saw_local, adaptive_noise);
}

INSTANTIATE_TEST_SUITE_P(Private, ScalarOracleTest,
                         ::testing::Values(Algorithm::kAdaDp,
                                           Algorithm::kDpSgd, Algorithm::kAdaL,
                                           Algorithm::kAdaN),
                         [](const auto& info) {
                           return std::string(AlgorithmName(info.param));
                         });

TEST(DpSgdStepTest, PlainSgdWithoutNoise) {
  TrainConfig c = NoiseFree();
  c.clip.global_bound = 4.0;
  const ParameterVector theta = Eigen::Vector2d(1, 1);
  Eigen::MatrixXd g(1, 2);
  g << 3, 0;
  Rng rng(0);
  StepOutcome out = DpSgdStep(theta, EmaState::Zero(2), g, c, rng);
  EXPECT_EQ(out.params, SgdStep(theta, g.row(0).transpose(), c));
  // Norm 2C is halved.
  g << 8, 0;
  out = DpSgdStep(theta, EmaState::Zero(2), g, c, rng);
  EXPECT_EQ(out.params, Eigen::Vector2d(1 - 0.05 * 4, 1));
}

TEST(DpSgdStepTest, OneNoiseVectorPerLot) {
  TrainConfig c = NoiseFree();
  c.sigma_star = 1.0;
  c.clip.global_bound = 1.0;
  const int lot = 50;
  const Eigen::MatrixXd g = Eigen::MatrixXd::Zero(lot, 1);
  Rng rng(3);
  double sum_sq = 0;
  const int trials = 20000;
  for (int t = 0; t < trials; ++t) {
    const StepOutcome out =
        DpSgdStep(Eigen::VectorXd::Zero(1), EmaState::Zero(1), g, c, rng);
    sum_sq += out.record.noisy_grad[0] * out.record.noisy_grad[0];
  }
  // Var of N(0, C^2 sigma^2) / L.
  EXPECT_NEAR(sum_sq / trials * lot * lot, 1.0, 0.05);
}

TEST(RmsPropStepTest, Examples) {
  TrainConfig c = NoiseFree();
  c.gamma = 1.0;
  c.eps0 = 0.0;
  c.eta = 0.3;
  RmsPropResult r = RmsPropStep(Eigen::VectorXd::Ones(1), EmaState::Zero(1),
                                Eigen::VectorXd::Ones(1), c);
  EXPECT_DOUBLE_EQ(r.params[0], 0.7);

  c.gamma = 0.1;
  EmaState s = EmaState::Zero(1);
  s.lr_ema[0] = 2.0;
  r = RmsPropStep(Eigen::VectorXd::Ones(1), s, Eigen::VectorXd::Zero(1), c);
  EXPECT_EQ(r.params[0], 1.0);
  EXPECT_DOUBLE_EQ(r.state.lr_ema[0], 1.8);
  EXPECT_THROW(RmsPropStep(Eigen::VectorXd::Ones(1), s,
                           Eigen::VectorXd::Constant(1, INFINITY), c),
               NumericalError);
}

TEST(RmsPropStepTest, RandomSequenceMatchesReimplementation) {
  TrainConfig c = NoiseFree();
  c.gamma = 0.1;
  c.eta = 0.01;
  Rng rng(12);
  ParameterVector theta = Eigen::VectorXd::Zero(10);
  EmaState state = EmaState::Zero(10);
  std::vector<double> t(10, 0.0), e(10, 0.0);
  for (int step = 0; step < 50; ++step) {
    Eigen::VectorXd g(10);
    for (int i = 0; i < 10; ++i) g[i] = rng.Normal(1.0 + i);
    const RmsPropResult r = RmsPropStep(theta, state, g, c);
    theta = r.params;
    state = r.state;
    for (int i = 0; i < 10; ++i) {
      e[i] = 0.9 * e[i] + 0.1 * g[i] * g[i];
      t[i] -= 0.01 * g[i] / std::sqrt(e[i] + 1e-8);
      EXPECT_NEAR(theta[i], t[i], 1e-13);
    }
  }
}

TEST(ComponentTest, VariantsDifferInOneComponent) {
  TrainConfig c;
  c.eta = 0.1;
  c.sigma_star = 1.5;
  c.clip.global_bound = 1.0;
  c.lot_size = 3;
  c.dataset_size = 3;
  const ParameterVector theta = Eigen::Vector3d(0.5, -0.5, 2);
  EmaState state = EmaState::Zero(3);
  state.prior_ema << 0.04, 1.0, 0.25;  // local mode
  state.lr_ema << 0.5, 0.1, 2.0;
  Eigen::MatrixXd g(3, 3);
  g << 0.1, -2, 1, 0.3, 0.2, -0.4, -0.2, 1.5, 0.6;

  auto run = [&](auto step) {
    Rng rng(99);
    return step(theta, state, g, c, rng);
  };
  const StepOutcome ada = run(AdaDpStep);
  const StepOutcome adan = run(AdaNStep);
  const StepOutcome adal = run(AdaLStep);
  const StepOutcome dpsgd = run(DpSgdStep);

  EXPECT_EQ(ada.record.mode, ClipMode::kLocal);
  EXPECT_EQ(adal.record.mode, ClipMode::kGlobal);
  // Same noisy gradient within each noise rule.
  EXPECT_EQ(ada.record.noisy_grad, adan.record.noisy_grad);
  EXPECT_EQ(adal.record.noisy_grad, dpsgd.record.noisy_grad);
  // Adaptive denominator only where the learning rate is adaptive.
  const Eigen::VectorXd denom =
      (ada.state.lr_ema.array() + c.eps0).sqrt().matrix();
  EXPECT_TRUE(ada.params.isApprox(
      theta - c.eta * ada.record.noisy_grad.cwiseQuotient(denom)));
  EXPECT_TRUE(adan.params.isApprox(theta - c.eta * adan.record.noisy_grad));
  const Eigen::VectorXd denom_l =
      (adal.state.lr_ema.array() + c.eps0).sqrt().matrix();
  EXPECT_TRUE(adal.params.isApprox(
      theta - c.eta * adal.record.noisy_grad.cwiseQuotient(denom_l)));
  EXPECT_TRUE(dpsgd.params.isApprox(theta - c.eta * dpsgd.record.noisy_grad));
}

TEST(EmaTest, PriorClosedForm) {
  TrainConfig c;
  c.gamma_prime = 0.9;
  c.sigma_star = 1.0;
  c.lot_size = 2;
  c.dataset_size = 2;
  Eigen::MatrixXd g(2, 3);
  g << 0.5, -1.0, 2.0, 0.5, -1.0, 2.0;
  const Eigen::VectorXd g2 = g.row(0).transpose().cwiseAbs2();
  ParameterVector theta = Eigen::VectorXd::Zero(3);
  EmaState state = EmaState::Zero(3);
  Rng rng(1);
  for (int t = 1; t <= 50; ++t) {
    const StepOutcome out = AdaDpStep(theta, state, g, c, rng);
    theta = out.params;
    state = out.state;
    if (t == 1 || t == 5 || t == 50) {
      const Eigen::VectorXd expect = (1 - std::pow(0.9, t)) * g2;
      EXPECT_LT((state.prior_ema - expect).cwiseAbs().maxCoeff(), 1e-12)
          << "t=" << t;
    }
  }
}

TEST(TrainTest, ZeroStepsKeepsInitial) {
  const QuadraticObjective f = QuadraticObjective::Random(5, 3, 1);
  TrainConfig c = NoiseFree();
  c.dataset_size = 5;
  c.steps = 0;
  const ParameterVector init = Eigen::Vector3d(1, 2, 3);
  const TrainResult r = Train(f, c, Algorithm::kAdaDp, init, 0);
  EXPECT_TRUE(r.records.empty());
  EXPECT_EQ(r.final_params, init);
}

TEST(TrainTest, NoiseOffMatchesRmsPropBitForBit) {
  const QuadraticObjective f = QuadraticObjective::Random(50, 10, 7);
  TrainConfig c = NoiseFree();
  c.dataset_size = 50;
  c.lot_size = 10;
  c.steps = 200;
  const ParameterVector init = Eigen::VectorXd::Zero(10);
  const TrainResult a = Train(f, c, Algorithm::kAdaDp, init, 3);
  const TrainResult b = Train(f, c, Algorithm::kRmsProp, init, 3);
  ASSERT_EQ(a.records.size(), 200u);
  for (std::size_t t = 0; t < a.records.size(); ++t) {
    ASSERT_EQ(a.records[t].params_after, b.records[t].params_after) << t;
  }
}

TEST(TrainTest, DeterministicRecords) {
  const QuadraticObjective f = QuadraticObjective::Random(40, 4, 2);
  TrainConfig c;
  c.dataset_size = 40;
  c.lot_size = 8;
  c.steps = 30;
  c.sigma_star = 1.0;
  const ParameterVector init = Eigen::VectorXd::Zero(4);
  const TrainResult a = Train(f, c, Algorithm::kAdaDp, init, 11);
  const TrainResult b = Train(f, c, Algorithm::kAdaDp, init, 11);
  const TrainResult other = Train(f, c, Algorithm::kAdaDp, init, 12);
  for (std::size_t t = 0; t < a.records.size(); ++t) {
    EXPECT_EQ(a.records[t].params_after, b.records[t].params_after);
    EXPECT_EQ(a.records[t].noisy_grad, b.records[t].noisy_grad);
    EXPECT_EQ(a.records[t].loss, b.records[t].loss);
  }
  EXPECT_NE(a.final_params, other.final_params);
}

TEST(TrainTest, PlansRespectPrivacyBookkeeping) {
  const QuadraticObjective f = QuadraticObjective::Random(100, 6, 4);
  TrainConfig c;
  c.dataset_size = 100;
  c.lot_size = 10;
  c.steps = 60;
  c.sigma_star = 2.0;
  c.clip.global_bound = 3.0;
  int local = 0, global = 0;
  Train(f, c, Algorithm::kAdaDp, Eigen::VectorXd::Zero(6), 5,
        [&](const StepOutcome& out) {
          if (out.plan.mode == ClipMode::kLocal) {
            ++local;
            EXPECT_TRUE(CheckFeasibility(out.plan.sensitivities,
                                         out.plan.sigmas, c.sigma_star));
          } else {
            ++global;
            EXPECT_TRUE((out.plan.sigmas.array() == 6.0).all());
          }
        });
  EXPECT_GT(local, 0);
  EXPECT_GT(global, 0);
}

TEST(TrainTest, DivergenceAbortsAfterObserver) {
  // Unbounded-below objective: the loss magnitude grows without limit.
  class Linear : public Objective {
   public:
    Eigen::Index dim() const override { return 1; }
    double Loss(const ParameterVector& t) const override { return t[0]; }
    Eigen::VectorXd Gradient(const ParameterVector&) const override {
      return Eigen::VectorXd::Ones(1);
    }
  } f;
  TrainConfig c = NoiseFree();
  c.eta = 1e5;
  c.steps = 100;
  int seen = 0;
  EXPECT_THROW(Train(f, c, Algorithm::kSgd, Eigen::VectorXd::Zero(1), 0,
                     [&](const StepOutcome&) { ++seen; }),
               DivergenceError);
  // |loss| = 1e5 t first exceeds 1e6 * max(|0|, 1) at t = 11.
  EXPECT_EQ(seen, 11);
}

TEST(TrainConfigTest, ValidationNamesField) {
  TrainConfig c;
  c.gamma = 0.0;
  try {
    c.Validate();
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("gamma"), std::string::npos);
  }
  EXPECT_EQ(ParseAlgorithm("adan"), Algorithm::kAdaN);
  EXPECT_THROW(ParseAlgorithm("adam"), DomainError);
}

}  // namespace
}  // namespace adadp
