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

// Renyi-DP accounting for the subsampled Gaussian mechanism used by AdaDP.
//
// One training step is a Gaussian mechanism with unit sensitivity and noise
// multiplier sigma_star applied to a lot drawn with ratio q = L / N. Its RDP
// at integer order alpha is bounded by
//
//   eps'(alpha) <= 1/(alpha-1) * log(1 + q^2 C(alpha,2) min{4(e^{1/s^2}-1),
//                  2 e^{1/s^2}} + 4 sum_{j=3}^{alpha} q^j C(alpha,j)
//                  sqrt(B(2 ceil(j/2)) B(2 floor(j/2))))
//
// with B(l) = sum_{i=0}^{l} (-1)^i C(l,i) e^{(i-1)i/(2 s^2)}. T steps compose
// to T * eps'(alpha) and convert to (eps, delta)-DP by adding
// log(1/delta)/(alpha-1). All arithmetic is done in long double and in the
// log domain, so large orders at small sigma do not overflow.

#ifndef ADADP_ACCOUNTANT_H_
#define ADADP_ACCOUNTANT_H_

#include <cstdint>
#include <vector>

namespace adadp {

struct PrivacySpec {
  double epsilon = 1.0;
  double delta = 1e-5;

  // Throws DomainError unless epsilon > 0 and 0 < delta < 1.
  void Validate() const;
};

struct MechanismParams {
  double sigma_star = 1.0;
  double q = 0.01;
  std::int64_t steps = 1;

  // Throws DomainError unless sigma_star > 0, 0 <= q <= 1 and steps >= 1.
  void Validate() const;
};

// Inclusive range of integer RDP orders searched when converting to DP.
struct AlphaRange {
  int min_alpha = 2;
  int max_alpha = 64;

  void Validate() const;
};

// Which printing of the second-order term of the subsampling bound to use.
//   kStandard:    min{4(e^{1/s^2} - 1), 2 e^{1/s^2}}
//   kAlternative: min{4 e^{1/s^2 - 1},  2 e^{1/s^2}}
enum class SecondOrderTerm { kStandard, kAlternative };

struct AccountantOptions {
  SecondOrderTerm second_order = SecondOrderTerm::kStandard;
};

// Counts numerical guards that fired while evaluating a bound.
struct AccountantDiagnostics {
  // Even-order B values that evaluated below zero and were clamped to zero.
  int clamped_b_values = 0;
};

struct RdpEntry {
  int alpha = 2;
  double epsilon = 0.0;
};

// alpha -> eps(alpha), alphas strictly increasing.
struct RdpCurve {
  std::vector<RdpEntry> entries;

  // Curve of the T-fold composition: every eps(alpha) multiplied by steps.
  RdpCurve Compose(std::int64_t steps) const;
};

struct EpsilonResult {
  double epsilon = 0.0;
  int alpha = 0;
};

struct DeltaResult {
  double delta = 1.0;
  int alpha = 0;
  // True when no order yields a nontrivial guarantee; delta is then 1.
  bool vacuous = false;
};

// RDP of the (unsubsampled) Gaussian mechanism: alpha / (2 sigma^2).
double RdpGaussian(int alpha, double sigma);

// B(l) evaluated to relative error below 1e-9 for l <= 128. Throws
// OverflowError if the value or any of its terms leaves the long double range.
long double BFunction(int l, double sigma);

// Natural log of |B(l)| for l = 0..max_l, computed together. Entries where
// B(l) == 0 (only l == 1) hold -infinity. Never overflows.
std::vector<long double> LogAbsBTable(int max_l, double sigma);

// Right-hand side of the subsampled Gaussian RDP bound for one step.
double SubsampledRdpEpsilon(int alpha, double q, double sigma,
                            const AccountantOptions& options = {},
                            AccountantDiagnostics* diagnostics = nullptr);

// Per-step curve over a range of orders. B values are shared across orders.
RdpCurve SubsampledRdpCurve(double q, double sigma, const AlphaRange& range,
                            const AccountantOptions& options = {},
                            AccountantDiagnostics* diagnostics = nullptr);

// min over alpha of T eps'(alpha) + log(1/delta)/(alpha-1). Ties go to the
// smaller alpha.
EpsilonResult TotalDpEpsilon(const MechanismParams& params, double delta,
                             const AlphaRange& range = {},
                             const AccountantOptions& options = {});
EpsilonResult TotalDpEpsilon(const RdpCurve& per_step, std::int64_t steps,
                             double delta);

// Smallest delta for which T steps satisfy the budget epsilon.
DeltaResult SmallestDeltaForEpsilon(double epsilon,
                                    const MechanismParams& params,
                                    const AlphaRange& range = {},
                                    const AccountantOptions& options = {});
DeltaResult SmallestDeltaForEpsilon(double epsilon, const RdpCurve& per_step,
                                    std::int64_t steps);

inline constexpr double kCalibrationLowerSigma = 1e-3;
inline constexpr double kCalibrationUpperSigma = 1e6;
inline constexpr double kCalibrationRelativeTolerance = 1e-4;

// Smallest sigma_star in [1e-3, 1e6] (to relative tolerance 1e-4) whose
// T-step guarantee fits in spec. Throws NumericalError if none does.
double CalibrateSigma(const PrivacySpec& spec, double q, std::int64_t steps,
                      const AlphaRange& range = {},
                      const AccountantOptions& options = {});

}  // namespace adadp

#endif  // ADADP_ACCOUNTANT_H_
