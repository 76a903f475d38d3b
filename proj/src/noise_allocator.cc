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
#include <string>

namespace adadp {
namespace {

// Standard normal CDF in long double.
long double Phi(long double x) {
  return 0.5L * std::erfc(-x / std::sqrt(2.0L));
}

}  // namespace

const char* ClipModeName(ClipMode mode) {
  return mode == ClipMode::kLocal ? "local" : "global";
}

void ClipSettings::Validate() const {
  if (!(beta > 0)) throw DomainError("beta must be positive");
  if (!(threshold >= 0)) throw DomainError("threshold must be nonnegative");
  if (!(global_bound > 0)) throw DomainError("global_bound must be positive");
}

double FeasibilitySum(const Eigen::VectorXd& sensitivities,
                      const Eigen::VectorXd& sigmas) {
  if (sensitivities.size() != sigmas.size()) {
    throw DimensionError("sensitivities and sigmas differ in length");
  }
  double sum = 0.0;
  for (Eigen::Index i = 0; i < sigmas.size(); ++i) {
    const double s = sensitivities[i];
    if (s == 0.0) continue;
    if (sigmas[i] == 0.0) {
      throw DomainError("sigma_" + std::to_string(i) +
                        " is zero while its sensitivity is positive");
    }
    const double ratio = s / sigmas[i];
    sum += ratio * ratio;
  }
  return sum;
}

bool CheckFeasibility(const Eigen::VectorXd& sensitivities,
                      const Eigen::VectorXd& sigmas, double sigma_star) {
  if (!(sigma_star > 0)) throw DomainError("sigma_star must be positive");
  const double budget = 1.0 / (sigma_star * sigma_star);
  return FeasibilitySum(sensitivities, sigmas) <=
         budget * (1.0 + kFeasibilitySlack);
}

NoisePlan AllocateSigmas(const Eigen::VectorXd& prior,
                         const ClipSettings& settings, double sigma_star) {
  if (prior.size() < 1) throw DimensionError("prior must be nonempty");
  if (!(sigma_star > 0)) throw DomainError("sigma_star must be positive");
  const double m = static_cast<double>(prior.size());
  NoisePlan plan;
  plan.mode = ClipMode::kLocal;
  plan.sigma_star = sigma_star;
  plan.global_bound = settings.global_bound;
  plan.sensitivities = settings.beta * prior.cwiseSqrt();
  plan.sigmas = (settings.beta * sigma_star) * (m * prior).cwiseSqrt();
  return plan;
}

NoisePlan GlobalPlan(Eigen::Index dim, const ClipSettings& settings,
                     double sigma_star) {
  NoisePlan plan;
  plan.mode = ClipMode::kGlobal;
  plan.sigma_star = sigma_star;
  plan.global_bound = settings.global_bound;
  plan.sensitivities = Eigen::VectorXd::Constant(dim, settings.global_bound);
  plan.sigmas =
      Eigen::VectorXd::Constant(dim, settings.global_bound * sigma_star);
  return plan;
}

ClipMode SelectClipMode(const Eigen::VectorXd& prior, double threshold,
                        ModeStatistic statistic) {
  if (prior.size() < 1) throw DimensionError("prior must be nonempty");
  const Eigen::VectorXd v =
      statistic == ModeStatistic::kSqrtPrior ? prior.cwiseSqrt() : prior;
  const double variance = (v.array() - v.mean()).square().mean();
  return variance > threshold ? ClipMode::kLocal : ClipMode::kGlobal;
}

Eigen::VectorXd AddNoise(const Eigen::VectorXd& clipped, const NoisePlan& plan,
                         Rng& rng) {
  if (plan.dim() != clipped.size()) {
    throw DimensionError("noise plan dimension differs from the vector");
  }
  Eigen::VectorXd out = clipped;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const double z = rng.Normal();
    if (plan.sigmas[i] != 0.0) out[i] += plan.sigmas[i] * z;
  }
  return out;
}

double AnalyticDpDelta(double h, double epsilon) {
  if (!(h >= 0)) throw DomainError("H must be nonnegative");
  if (!(epsilon > 0)) throw DomainError("epsilon must be positive");
  if (h == 0.0) return 0.0;  // limit H -> 0+
  const long double root = std::sqrt(static_cast<long double>(h));
  const long double eps = epsilon;
  const long double first = Phi(root / 2 - eps / root);
  const long double tail = Phi(-eps / root - root / 2);
  const long double second =
      tail == 0.0L ? 0.0L : std::exp(eps + std::log(tail));
  const long double delta = first - second;
  return delta > 0.0L ? static_cast<double>(delta) : 0.0;
}

MonteCarloEstimate MonteCarloDpCheck(const Eigen::VectorXd& sensitivities,
                                     const Eigen::VectorXd& sigmas,
                                     double epsilon, std::int64_t trials,
                                     Rng& rng) {
  if (trials < kMinMonteCarloTrials) {
    throw DomainError("MonteCarloDpCheck needs at least 100000 trials");
  }
  if (!(epsilon > 0)) throw DomainError("epsilon must be positive");
  const double h = FeasibilitySum(sensitivities, sigmas);

  MonteCarloEstimate result;
  result.trials = trials;
  if (h == 0.0) return result;

  const double e_eps = std::exp(epsilon);
  std::int64_t upper_hits = 0;
  std::int64_t lower_hits = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    double loss = 0.0;
    for (Eigen::Index j = 0; j < sigmas.size(); ++j) {
      const double s = sensitivities[j];
      if (s == 0.0) continue;
      const double var = sigmas[j] * sigmas[j];
      const double r = rng.Normal(sigmas[j]);
      loss += s * s / (2.0 * var) + r * s / var;
    }
    if (loss >= epsilon) ++upper_hits;
    if (loss <= -epsilon) ++lower_hits;
  }
  const double n = static_cast<double>(trials);
  const double p_upper = upper_hits / n;
  const double p_lower = lower_hits / n;
  result.estimate = p_upper - e_eps * p_lower;
  // Per-trial X = 1[l >= eps] - e^eps 1[l <= -eps]; the events are disjoint.
  const double second_moment = p_upper + e_eps * e_eps * p_lower;
  const double variance =
      std::max(0.0, second_moment - result.estimate * result.estimate);
  result.standard_error = std::sqrt(variance / n);
  if (result.standard_error > 1e-3) {
    throw DomainError("too few trials to bring the standard error below 1e-3");
  }
  return result;
}

CosineStudyResult CosineSimilarityStudy(const Eigen::VectorXd& f_value,
                                        const Eigen::VectorXd& sigmas,
                                        std::int64_t trials, Rng& rng) {
  if (f_value.size() != sigmas.size()) {
    throw DimensionError("f_value and sigmas differ in length");
  }
  if (trials < 1) throw DomainError("trials must be >= 1");
  const double f_norm = f_value.norm();
  if (f_norm == 0.0) throw DomainError("cosine similarity of a zero vector");

  NoisePlan plan;
  plan.sigmas = sigmas;
  plan.sensitivities = Eigen::VectorXd::Zero(sigmas.size());
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::int64_t t = 0; t < trials; ++t) {
    const Eigen::VectorXd noisy = AddNoise(f_value, plan, rng);
    const double noisy_norm = noisy.norm();
    const double cosine =
        noisy_norm == 0.0 ? 0.0 : noisy.dot(f_value) / (noisy_norm * f_norm);
    sum += cosine;
    sum_sq += cosine * cosine;
  }
  const double n = static_cast<double>(trials);
  CosineStudyResult result;
  result.mean = sum / n;
  const double var = std::max(0.0, sum_sq / n - result.mean * result.mean);
  result.standard_error = std::sqrt(var / n);
  return result;
}

}  // namespace adadp
