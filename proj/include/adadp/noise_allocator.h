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

// Per-coordinate sensitivities and noise scales for the adaptive Gaussian
// mechanism, the two clipping rules, and privacy-loss oracles for checking
// that heterogeneous noise preserves the reference guarantee.

#ifndef ADADP_NOISE_ALLOCATOR_H_
#define ADADP_NOISE_ALLOCATOR_H_

#include <algorithm>
#include <cstdint>

#include <Eigen/Dense>

#include "adadp/errors.h"
#include "adadp/random.h"

namespace adadp {

enum class ClipMode { kLocal, kGlobal };

const char* ClipModeName(ClipMode mode);

// Quantity whose variance selects the clipping mode.
//   kSqrtPrior: Var[sqrt(E'[g^2])] (the algorithm listing).
//   kPrior:     Var[E'[g^2]] (the prose description).
enum class ModeStatistic { kSqrtPrior, kPrior };

struct ClipSettings {
  double beta = 1.2;          // local clipping factor
  double threshold = 1e-6;    // local clipping threshold G
  double global_bound = 4.0;  // l2 clipping bound C

  void Validate() const;
};

struct NoisePlan {
  ClipMode mode = ClipMode::kGlobal;
  Eigen::VectorXd sensitivities;
  Eigen::VectorXd sigmas;
  double sigma_star = 1.0;
  double global_bound = 4.0;

  Eigen::Index dim() const { return sigmas.size(); }
};

// Relative slack accepted on sum s_i^2 / sigma_i^2 <= 1 / sigma_star^2.
inline constexpr double kFeasibilitySlack = 1e-9;

// sum over coordinates with s_i > 0 of s_i^2 / sigma_i^2. Throws DomainError
// if sigma_i == 0 while s_i > 0.
double FeasibilitySum(const Eigen::VectorXd& sensitivities,
                      const Eigen::VectorXd& sigmas);

bool CheckFeasibility(const Eigen::VectorXd& sensitivities,
                      const Eigen::VectorXd& sigmas, double sigma_star);

// s_i = beta sqrt(prior_i), sigma_i = beta sigma_star sqrt(m prior_i).
NoisePlan AllocateSigmas(const Eigen::VectorXd& prior,
                         const ClipSettings& settings, double sigma_star);

// Uniform plan used with global clipping: sigma_i = C sigma_star.
NoisePlan GlobalPlan(Eigen::Index dim, const ClipSettings& settings,
                     double sigma_star);

// Clamps each coordinate to [-s_i, s_i].
template <typename GradDerived, typename SensDerived>
Eigen::VectorXd LocalClip(const Eigen::MatrixBase<GradDerived>& grad,
                          const Eigen::MatrixBase<SensDerived>& sensitivities) {
  if (grad.size() != sensitivities.size()) {
    throw DimensionError("LocalClip: gradient and sensitivity lengths differ");
  }
  Eigen::VectorXd out(grad.size());
  for (Eigen::Index i = 0; i < grad.size(); ++i) {
    const double s = sensitivities(i);
    out[i] = std::min(std::max(static_cast<double>(grad(i)), -s), s);
  }
  return out;
}

// g / max(1, ||g||_2 / C).
template <typename Derived>
Eigen::VectorXd GlobalClip(const Eigen::MatrixBase<Derived>& grad,
                           double bound) {
  if (!(bound > 0)) throw DomainError("GlobalClip: bound must be positive");
  const double scale = std::max(1.0, grad.norm() / bound);
  return grad / scale;
}

ClipMode SelectClipMode(const Eigen::VectorXd& prior, double threshold,
                        ModeStatistic statistic = ModeStatistic::kSqrtPrior);

// clipped + z with z_i ~ N(0, sigma_i^2), coordinates drawn in index order.
Eigen::VectorXd AddNoise(const Eigen::VectorXd& clipped, const NoisePlan& plan,
                         Rng& rng);

// Exact delta of a Gaussian mechanism whose privacy loss is N(H/2, H):
// Phi(sqrt(H)/2 - eps/sqrt(H)) - e^eps Phi(-eps/sqrt(H) - sqrt(H)/2). H = 0
// gives the limit 0; results below the double range underflow to 0.
double AnalyticDpDelta(double h, double epsilon);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
  std::int64_t trials = 0;
};

inline constexpr std::int64_t kMinMonteCarloTrials = 100000;

// Samples the privacy loss l = sum s_j^2/(2 sigma_j^2) + sum r_j s_j/sigma_j^2
// with r_j ~ N(0, sigma_j^2) and estimates Pr(l >= eps) - e^eps Pr(l <= -eps).
MonteCarloEstimate MonteCarloDpCheck(const Eigen::VectorXd& sensitivities,
                                     const Eigen::VectorXd& sigmas,
                                     double epsilon, std::int64_t trials,
                                     Rng& rng);

struct CosineStudyResult {
  double mean = 0.0;
  double standard_error = 0.0;
};

// Mean over trials of cos(f + z, f), one fresh noise vector per trial.
CosineStudyResult CosineSimilarityStudy(const Eigen::VectorXd& f_value,
                                        const Eigen::VectorXd& sigmas,
                                        std::int64_t trials, Rng& rng);

}  // namespace adadp

#endif  // ADADP_NOISE_ALLOCATOR_H_
