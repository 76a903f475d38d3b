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

// AdaDP and its baselines.
//
// One AdaDP step on a lot of L examples:
//   1. pick local or global clipping from the variance of sqrt(E'[g^2]);
//   2. clip every per-example gradient (per coordinate to [-s_i, s_i] with
//      s_i = beta sqrt(E'[g^2]_i), or to l2 norm C);
//   3. sum the clipped rows in index order, add one noise vector drawn from
//      the noise plan, divide by L to get the noisy gradient g~;
//   4. E[g~^2] <- (1 - gamma) E[g~^2] + gamma g~^2 and
//      E'[g^2] <- gamma' E'[g^2] + (1 - gamma') g^2;
//   5. theta <- theta - eta g~ / sqrt(E[g~^2] + eps0).
//
// DpSgd, AdaL and AdaN switch off the adaptive noise, the adaptive learning
// rate, or both.

#ifndef ADADP_OPTIMIZER_H_
#define ADADP_OPTIMIZER_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "adadp/noise_allocator.h"
#include "adadp/objectives.h"
#include "adadp/random.h"

namespace adadp {

struct EmaState {
  Eigen::VectorXd lr_ema;     // E[g~^2], drives the learning-rate denominator
  Eigen::VectorXd prior_ema;  // E'[g^2], predicts per-coordinate sensitivity
  std::int64_t step = 0;

  static EmaState Zero(Eigen::Index dim) {
    return {Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Zero(dim), 0};
  }
};

// Gradient that feeds E'[g^2]: the unclipped lot mean, or the noisy gradient.
enum class PriorSource { kRawGradient, kNoisyGradient };

enum class Algorithm { kAdaDp, kDpSgd, kSgd, kRmsProp, kAdaL, kAdaN };

const char* AlgorithmName(Algorithm algorithm);
// Accepts "adadp", "dpsgd", "sgd", "rmsprop", "adal", "adan".
Algorithm ParseAlgorithm(const std::string& name);
bool IsPrivate(Algorithm algorithm);

struct TrainConfig {
  double eta = 0.002;
  std::int64_t lot_size = 600;
  std::int64_t dataset_size = 60000;
  // 0 disables noise entirely (non-private reference runs).
  double sigma_star = 4.0;
  ClipSettings clip;
  double gamma = 0.1;
  double gamma_prime = 0.9;
  double eps0 = 1e-8;
  std::int64_t steps = 100;
  PriorSource prior_source = PriorSource::kRawGradient;
  ModeStatistic mode_statistic = ModeStatistic::kSqrtPrior;
  // Adds an independent noise vector to every clipped per-example gradient
  // instead of one to the lot sum. The sum then carries L times the noise
  // variance, so the accountant's bound still holds, loosely.
  bool noise_per_example = false;

  double sampling_ratio() const {
    return static_cast<double>(lot_size) / static_cast<double>(dataset_size);
  }

  // Throws DomainError naming the first out-of-range field.
  void Validate() const;
};

struct SigmaSummary {
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
};

struct StepRecord {
  std::int64_t step = 0;  // 1-based index of the completed step
  ClipMode mode = ClipMode::kGlobal;
  ParameterVector params_after;
  Eigen::VectorXd noisy_grad;
  double loss = 0.0;  // loss at params_after; filled in by Train
  SigmaSummary sigma_summary;
};

struct StepOutcome {
  ParameterVector params;
  EmaState state;
  StepRecord record;
  NoisePlan plan;
  Eigen::VectorXd raw_grad;  // unclipped lot-mean gradient
};

// Uniform subset of exactly lot_size distinct indices, sorted ascending.
std::vector<std::int64_t> SampleLot(std::int64_t dataset_size,
                                    std::int64_t lot_size, Rng& rng);

// Rows of per_example_grads are the gradients of the current lot.
StepOutcome AdaDpStep(const ParameterVector& params, const EmaState& state,
                      const Eigen::MatrixXd& per_example_grads,
                      const TrainConfig& config, Rng& rng);
StepOutcome AdaLStep(const ParameterVector& params, const EmaState& state,
                     const Eigen::MatrixXd& per_example_grads,
                     const TrainConfig& config, Rng& rng);
StepOutcome AdaNStep(const ParameterVector& params, const EmaState& state,
                     const Eigen::MatrixXd& per_example_grads,
                     const TrainConfig& config, Rng& rng);
StepOutcome DpSgdStep(const ParameterVector& params, const EmaState& state,
                      const Eigen::MatrixXd& per_example_grads,
                      const TrainConfig& config, Rng& rng);

struct RmsPropResult {
  ParameterVector params;
  EmaState state;
};

// Non-private RMSProp on a single gradient. Only lr_ema is touched.
RmsPropResult RmsPropStep(const ParameterVector& params, const EmaState& state,
                          const Eigen::VectorXd& grad,
                          const TrainConfig& config);

ParameterVector SgdStep(const ParameterVector& params,
                        const Eigen::VectorXd& grad, const TrainConfig& config);

struct TrainResult {
  std::vector<StepRecord> records;
  ParameterVector final_params;
  EmaState final_state;
};

using StepObserver = std::function<void(const StepOutcome&)>;

// Runs config.steps steps of `algorithm`. Lots are drawn from
// Rng(seed + kLotSampling) and noise from Rng(seed + kNoise). Throws
// DivergenceError when the loss turns non-finite or its magnitude exceeds
// 1e6 times the initial one; the observer has seen every completed step.
TrainResult Train(const Objective& objective, const TrainConfig& config,
                  Algorithm algorithm, const ParameterVector& initial,
                  std::uint64_t seed, const StepObserver& observer = {});

}  // namespace adadp

#endif  // ADADP_OPTIMIZER_H_
