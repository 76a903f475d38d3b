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
#include <set>

#include "adadp/errors.h"

namespace adadp {
namespace {

struct Components {
  bool adaptive_noise;
  bool adaptive_lr;
};

void CheckInputs(const ParameterVector& params, const EmaState& state,
                 const Eigen::MatrixXd& grads) {
  if (state.lr_ema.size() != params.size() ||
      state.prior_ema.size() != params.size()) {
    throw DimensionError("EMA state dimension differs from the parameters");
  }
  if (grads.cols() != params.size()) {
    throw DimensionError("gradient dimension differs from the parameters");
  }
  if (grads.rows() < 1) throw DimensionError("empty lot");
  if (!grads.allFinite()) throw NumericalError("non-finite gradient");
}

// Sum of rows in index order.
Eigen::VectorXd SumRows(const Eigen::MatrixXd& rows) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(rows.cols());
  for (Eigen::Index r = 0; r < rows.rows(); ++r) sum += rows.row(r).transpose();
  return sum;
}

SigmaSummary Summarize(const Eigen::VectorXd& sigmas) {
  if (sigmas.size() == 0) return {};
  return {sigmas.minCoeff(), sigmas.mean(), sigmas.maxCoeff()};
}

void UpdateLrEma(Eigen::VectorXd& lr_ema, const Eigen::VectorXd& g,
                 double gamma) {
  lr_ema = (1.0 - gamma) * lr_ema + gamma * g.cwiseAbs2();
}

void UpdatePriorEma(Eigen::VectorXd& prior_ema, const Eigen::VectorXd& g,
                    double gamma_prime) {
  prior_ema = gamma_prime * prior_ema + (1.0 - gamma_prime) * g.cwiseAbs2();
}

Eigen::VectorXd AdaptiveDirection(const Eigen::VectorXd& g,
                                  const Eigen::VectorXd& lr_ema, double eps0) {
  return g.cwiseQuotient((lr_ema.array() + eps0).sqrt().matrix());
}

StepOutcome PrivateStep(const ParameterVector& params, const EmaState& state,
                        const Eigen::MatrixXd& grads, const TrainConfig& config,
                        Rng& rng, Components components) {
  CheckInputs(params, state, grads);
  const Eigen::Index m = params.size();
  const double lot = static_cast<double>(grads.rows());
  const bool noisy = config.sigma_star > 0.0;

  StepOutcome out;
  const ClipMode mode =
      components.adaptive_noise
          ? SelectClipMode(state.prior_ema, config.clip.threshold,
                           config.mode_statistic)
          : ClipMode::kGlobal;
  if (mode == ClipMode::kLocal) {
    if (noisy) {
      out.plan = AllocateSigmas(state.prior_ema, config.clip, config.sigma_star);
    } else {
      out.plan = AllocateSigmas(state.prior_ema, config.clip, 1.0);
      out.plan.sigmas.setZero();
      out.plan.sigma_star = 0.0;
    }
  } else {
    out.plan = GlobalPlan(m, config.clip, config.sigma_star);
  }

  Eigen::MatrixXd clipped(grads.rows(), m);
  for (Eigen::Index r = 0; r < grads.rows(); ++r) {
    clipped.row(r) =
        mode == ClipMode::kLocal
            ? LocalClip(grads.row(r).transpose(), out.plan.sensitivities)
                  .transpose()
            : GlobalClip(grads.row(r).transpose(), config.clip.global_bound)
                  .transpose();
  }

  Eigen::VectorXd noisy_sum;
  if (config.noise_per_example) {
    noisy_sum = Eigen::VectorXd::Zero(m);
    for (Eigen::Index r = 0; r < clipped.rows(); ++r) {
      noisy_sum += AddNoise(clipped.row(r).transpose(), out.plan, rng);
    }
  } else {
    noisy_sum = AddNoise(SumRows(clipped), out.plan, rng);
  }
  const Eigen::VectorXd noisy_grad = noisy_sum / lot;
  out.raw_grad = SumRows(grads) / lot;

  out.state = state;
  UpdateLrEma(out.state.lr_ema, noisy_grad, config.gamma);
  UpdatePriorEma(out.state.prior_ema,
                 config.prior_source == PriorSource::kRawGradient
                     ? out.raw_grad
                     : noisy_grad,
                 config.gamma_prime);
  out.state.step = state.step + 1;

  const Eigen::VectorXd delta =
      components.adaptive_lr
          ? AdaptiveDirection(noisy_grad, out.state.lr_ema, config.eps0)
          : noisy_grad;
  out.params = params - config.eta * delta;

  out.record.step = out.state.step;
  out.record.mode = mode;
  out.record.params_after = out.params;
  out.record.noisy_grad = noisy_grad;
  out.record.loss = std::nan("");
  out.record.sigma_summary = Summarize(out.plan.sigmas);
  return out;
}

StepOutcome NonPrivateStep(const ParameterVector& params, const EmaState& state,
                           const Eigen::MatrixXd& grads,
                           const TrainConfig& config, bool adaptive_lr) {
  CheckInputs(params, state, grads);
  StepOutcome out;
  out.raw_grad = SumRows(grads) / static_cast<double>(grads.rows());
  if (adaptive_lr) {
    RmsPropResult r = RmsPropStep(params, state, out.raw_grad, config);
    out.params = std::move(r.params);
    out.state = std::move(r.state);
  } else {
    out.params = SgdStep(params, out.raw_grad, config);
    out.state = state;
    out.state.step = state.step + 1;
  }
  out.plan = GlobalPlan(params.size(), config.clip, 0.0);
  out.plan.sigmas.setZero();
  out.record.step = out.state.step;
  out.record.mode = ClipMode::kGlobal;
  out.record.params_after = out.params;
  out.record.noisy_grad = out.raw_grad;
  out.record.loss = std::nan("");
  return out;
}

}  // namespace

const char* AlgorithmName(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kAdaDp:
      return "adadp";
    case Algorithm::kDpSgd:
      return "dpsgd";
    case Algorithm::kSgd:
      return "sgd";
    case Algorithm::kRmsProp:
      return "rmsprop";
    case Algorithm::kAdaL:
      return "adal";
    case Algorithm::kAdaN:
      return "adan";
  }
  return "unknown";
}

Algorithm ParseAlgorithm(const std::string& name) {
  for (Algorithm a : {Algorithm::kAdaDp, Algorithm::kDpSgd, Algorithm::kSgd,
                      Algorithm::kRmsProp, Algorithm::kAdaL,
                      Algorithm::kAdaN}) {
    if (name == AlgorithmName(a)) return a;
  }
  throw DomainError("unknown algorithm '" + name + "'");
}

bool IsPrivate(Algorithm algorithm) {
  return algorithm != Algorithm::kSgd && algorithm != Algorithm::kRmsProp;
}

void TrainConfig::Validate() const {
  auto require = [](bool ok, const char* field, const char* what) {
    if (!ok) throw DomainError(std::string(field) + " " + what);
  };
  require(eta > 0 && std::isfinite(eta), "eta", "must be positive");
  require(lot_size >= 1, "lot_size", "must be >= 1");
  require(dataset_size >= lot_size, "dataset_size", "must be >= lot_size");
  require(sigma_star >= 0 && std::isfinite(sigma_star), "sigma_star",
          "must be >= 0");
  require(clip.beta > 0, "beta", "must be positive");
  require(clip.threshold >= 0, "threshold", "must be >= 0");
  require(clip.global_bound > 0, "global_bound", "must be positive");
  require(gamma > 0 && gamma <= 1, "gamma", "must lie in (0, 1]");
  require(gamma_prime >= 0 && gamma_prime < 1, "gamma_prime",
          "must lie in [0, 1)");
  require(eps0 >= 0, "eps0", "must be >= 0");
  require(steps >= 0, "steps", "must be >= 0");
}

std::vector<std::int64_t> SampleLot(std::int64_t dataset_size,
                                    std::int64_t lot_size, Rng& rng) {
  if (lot_size < 1 || lot_size > dataset_size) {
    throw DomainError("lot_size must lie in [1, dataset_size]");
  }
  // Floyd's algorithm: exactly lot_size distinct indices, uniformly.
  std::set<std::int64_t> chosen;
  for (std::int64_t j = dataset_size - lot_size; j < dataset_size; ++j) {
    const std::int64_t t = rng.UniformInt(0, j);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  return {chosen.begin(), chosen.end()};
}

StepOutcome AdaDpStep(const ParameterVector& params, const EmaState& state,
                      const Eigen::MatrixXd& per_example_grads,
                      const TrainConfig& config, Rng& rng) {
  return PrivateStep(params, state, per_example_grads, config, rng,
                     {.adaptive_noise = true, .adaptive_lr = true});
}

StepOutcome AdaLStep(const ParameterVector& params, const EmaState& state,
                     const Eigen::MatrixXd& per_example_grads,
                     const TrainConfig& config, Rng& rng) {
  return PrivateStep(params, state, per_example_grads, config, rng,
                     {.adaptive_noise = false, .adaptive_lr = true});
}

StepOutcome AdaNStep(const ParameterVector& params, const EmaState& state,
                     const Eigen::MatrixXd& per_example_grads,
                     const TrainConfig& config, Rng& rng) {
  return PrivateStep(params, state, per_example_grads, config, rng,
                     {.adaptive_noise = true, .adaptive_lr = false});
}

StepOutcome DpSgdStep(const ParameterVector& params, const EmaState& state,
                      const Eigen::MatrixXd& per_example_grads,
                      const TrainConfig& config, Rng& rng) {
  return PrivateStep(params, state, per_example_grads, config, rng,
                     {.adaptive_noise = false, .adaptive_lr = false});
}

RmsPropResult RmsPropStep(const ParameterVector& params, const EmaState& state,
                          const Eigen::VectorXd& grad,
                          const TrainConfig& config) {
  if (grad.size() != params.size() || state.lr_ema.size() != params.size()) {
    throw DimensionError("RmsPropStep: dimension mismatch");
  }
  if (!grad.allFinite()) throw NumericalError("non-finite gradient");
  RmsPropResult out{params, state};
  UpdateLrEma(out.state.lr_ema, grad, config.gamma);
  out.state.step = state.step + 1;
  out.params =
      params - config.eta * AdaptiveDirection(grad, out.state.lr_ema,
                                              config.eps0);
  return out;
}

ParameterVector SgdStep(const ParameterVector& params,
                        const Eigen::VectorXd& grad,
                        const TrainConfig& config) {
  if (grad.size() != params.size()) {
    throw DimensionError("SgdStep: dimension mismatch");
  }
  if (!grad.allFinite()) throw NumericalError("non-finite gradient");
  return params - config.eta * grad;
}

TrainResult Train(const Objective& objective, const TrainConfig& config,
                  Algorithm algorithm, const ParameterVector& initial,
                  std::uint64_t seed, const StepObserver& observer) {
  config.Validate();
  if (initial.size() != objective.dim()) {
    throw DimensionError("initial parameters do not match the objective");
  }
  if (config.dataset_size != objective.num_examples()) {
    throw DimensionError("dataset_size differs from the objective's size");
  }
  const Rng master(seed);
  Rng lot_rng = master.Derive(SeedRole::kLotSampling);
  Rng noise_rng = master.Derive(SeedRole::kNoise);

  TrainResult result;
  result.final_params = initial;
  result.final_state = EmaState::Zero(objective.dim());
  result.records.reserve(config.steps);
  const double initial_loss = objective.Loss(initial);
  // Magnitude guard so objectives that are unbounded below also trip it.
  const double limit = 1e6 * std::max(std::abs(initial_loss), 1.0);

  for (std::int64_t t = 0; t < config.steps; ++t) {
    const std::vector<std::int64_t> lot =
        SampleLot(config.dataset_size, config.lot_size, lot_rng);
    const Eigen::MatrixXd grads =
        objective.PerExampleGradients(result.final_params, lot);
    StepOutcome out;
    const ParameterVector& p = result.final_params;
    const EmaState& s = result.final_state;
    switch (algorithm) {
      case Algorithm::kAdaDp:
        out = AdaDpStep(p, s, grads, config, noise_rng);
        break;
      case Algorithm::kAdaL:
        out = AdaLStep(p, s, grads, config, noise_rng);
        break;
      case Algorithm::kAdaN:
        out = AdaNStep(p, s, grads, config, noise_rng);
        break;
      case Algorithm::kDpSgd:
        out = DpSgdStep(p, s, grads, config, noise_rng);
        break;
      case Algorithm::kRmsProp:
        out = NonPrivateStep(p, s, grads, config, /*adaptive_lr=*/true);
        break;
      case Algorithm::kSgd:
        out = NonPrivateStep(p, s, grads, config, /*adaptive_lr=*/false);
        break;
    }
    out.record.loss = objective.Loss(out.params);
    result.final_params = out.params;
    result.final_state = out.state;
    result.records.push_back(out.record);
    if (observer) observer(out);
    if (!std::isfinite(out.record.loss) || std::abs(out.record.loss) > limit) {
      throw DivergenceError("training diverged at step " +
                            std::to_string(out.record.step));
    }
  }
  return result;
}

}  // namespace adadp
