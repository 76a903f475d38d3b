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
#include <string>

#include "adadp/errors.h"

namespace adadp {
namespace {

using ld = long double;

constexpr ld kNegInf = -std::numeric_limits<ld>::infinity();
const ld kLogMax = std::log(std::numeric_limits<ld>::max());

// Above this value of c (l+1)^2 the alternating sum is dominated by its last
// few terms and is evaluated directly; below it the series form is used.
constexpr ld kSeriesLimit = 2000.0L;
constexpr ld kSeriesTolerance = 1e-22L;
constexpr long kMaxSeriesIterations = 1000000;

struct SignedLog {
  ld log_abs = kNegInf;
  int sign = 0;
};

// log C(n, k) for all k, by the exact multiplicative recurrence.
std::vector<ld> LogBinomialRow(int n) {
  std::vector<ld> row(n + 1);
  ld value = 1.0L;
  row[0] = 0.0L;
  for (int k = 1; k <= n; ++k) {
    value = value * static_cast<ld>(n - k + 1) / static_cast<ld>(k);
    row[k] = std::log(value);
  }
  return row;
}

ld HalfInverseSquare(double sigma) {
  const ld s = sigma;
  return 1.0L / (2.0L * s * s);
}

// Largest log-magnitude among the terms C(l,i) e^{c i(i-1)}.
ld MaxLogTerm(int l, ld c) {
  const std::vector<ld> log_binom = LogBinomialRow(l);
  ld best = kNegInf;
  for (int i = 0; i <= l; ++i) {
    best = std::max(best, log_binom[i] + c * static_cast<ld>(i) * (i - 1));
  }
  return best;
}

// Alternating sum evaluated in units of its largest term, with Neumaier
// compensation.
SignedLog DirectB(int l, ld c) {
  const std::vector<ld> log_binom = LogBinomialRow(l);
  std::vector<ld> t(l + 1);
  ld peak = kNegInf;
  for (int i = 0; i <= l; ++i) {
    t[i] = log_binom[i] + c * static_cast<ld>(i) * (i - 1);
    peak = std::max(peak, t[i]);
  }
  ld sum = 0.0L;
  ld compensation = 0.0L;
  for (int i = 0; i <= l; ++i) {
    const ld term = (i % 2 == 0 ? 1.0L : -1.0L) * std::exp(t[i] - peak);
    const ld next = sum + term;
    if (std::fabs(sum) >= std::fabs(term)) {
      compensation += (sum - next) + term;
    } else {
      compensation += (term - next) + sum;
    }
    sum = next;
  }
  sum += compensation;
  if (sum == 0.0L) return {};
  return {peak + std::log(std::fabs(sum)), sum > 0 ? 1 : -1};
}

// Expanding e^{c i(i-1)} in falling factorials of i gives
//   B(l) = (-1)^l l! sum_k c^k a_{k,l} / k!
// where a_{k,n} >= 0 is the coefficient of i^(n) in (i^(2))^k. Every term is
// nonnegative, so no cancellation occurs. With b_{k,n} = c^k a_{k,n} / k!,
//   b_{k+1,n} = c/(k+1) (b_{k,n-2} + 2(n-1) b_{k,n-1} + n(n-1) b_{k,n}).
std::vector<SignedLog> SeriesB(int max_l, ld c) {
  std::vector<ld> b(max_l + 1, 0.0L);
  std::vector<ld> sums(max_l + 1, 0.0L);
  std::vector<bool> done(max_l + 1, false);
  b[0] = 1.0L;
  sums[0] = 1.0L;
  done[0] = true;
  if (max_l >= 1) done[1] = true;  // b_{k,1} == 0 for every k.
  for (long k = 0;; ++k) {
    if (k > kMaxSeriesIterations) {
      throw NumericalError("B series did not converge");
    }
    const ld factor = c / static_cast<ld>(k + 1);
    for (int n = max_l; n >= 0; --n) {
      ld acc = static_cast<ld>(n) * (n - 1) * b[n];
      if (n >= 1) acc += 2.0L * (n - 1) * b[n - 1];
      if (n >= 2) acc += b[n - 2];
      b[n] = factor * acc;
    }
    bool all_done = true;
    ld prefix_max = 0.0L;
    for (int n = 0; n <= max_l; ++n) {
      sums[n] += b[n];
      prefix_max = std::max(prefix_max, b[n]);
      if (done[n]) continue;
      // Future contributions to index n come only from indices <= n, and
      // shrink by at least half per iteration once k+1 >= 2c(n+1)^2.
      const ld np1 = static_cast<ld>(n + 1);
      if (static_cast<ld>(k + 2) >= 2.0L * c * np1 * np1 && 2 * (k + 1) >= n &&
          2.0L * prefix_max <= kSeriesTolerance * sums[n]) {
        done[n] = true;
      } else {
        all_done = false;
      }
    }
    if (all_done) break;
  }
  std::vector<SignedLog> out(max_l + 1);
  for (int n = 0; n <= max_l; ++n) {
    if (sums[n] <= 0.0L) continue;
    out[n].log_abs = std::lgamma(static_cast<ld>(n) + 1) + std::log(sums[n]);
    out[n].sign = n % 2 == 0 ? 1 : -1;
  }
  return out;
}

bool UseSeries(int l, ld c) {
  const ld np1 = static_cast<ld>(l + 1);
  return c * np1 * np1 <= kSeriesLimit;
}

std::vector<SignedLog> SignedLogBTable(int max_l, double sigma) {
  const ld c = HalfInverseSquare(sigma);
  int series_max = -1;
  for (int l = 0; l <= max_l; ++l) {
    if (UseSeries(l, c)) series_max = l;
  }
  std::vector<SignedLog> table(max_l + 1);
  if (series_max >= 0) {
    std::vector<SignedLog> series = SeriesB(series_max, c);
    std::copy(series.begin(), series.end(), table.begin());
  }
  for (int l = 0; l <= max_l; ++l) {
    if (l == 1) {
      table[l] = {};
    } else if (l == 0) {
      table[l] = {0.0L, 1};
    } else if (l > series_max) {
      table[l] = DirectB(l, c);
    }
  }
  return table;
}

void CheckSigma(double sigma) {
  if (!(sigma > 0) || !std::isfinite(sigma)) {
    throw DomainError("sigma must be positive and finite, got " +
                      std::to_string(sigma));
  }
}

void CheckAlpha(int alpha) {
  if (alpha < 2) {
    throw DomainError("alpha must be >= 2, got " + std::to_string(alpha));
  }
}

void CheckQ(double q) {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw DomainError("q must lie in [0, 1], got " + std::to_string(q));
  }
}

ld LogSumExp(const std::vector<ld>& values) {
  ld peak = kNegInf;
  for (ld v : values) peak = std::max(peak, v);
  if (peak == kNegInf) return kNegInf;
  ld sum = 0.0L;
  for (ld v : values) sum += std::exp(v - peak);
  return peak + std::log(sum);
}

// log of the second-order coefficient min{...}.
ld LogSecondOrderCoefficient(ld c, SecondOrderTerm form) {
  const ld inv_sq = 2.0L * c;
  const ld log_two_exp = std::log(2.0L) + inv_sq;
  ld log_four_term;
  if (form == SecondOrderTerm::kStandard) {
    log_four_term = std::log(4.0L) + std::log(std::expm1(inv_sq));
    if (!std::isfinite(log_four_term)) {
      // expm1 overflowed; e^x - 1 == e^x at this magnitude.
      log_four_term = std::log(4.0L) + inv_sq;
    }
  } else {
    log_four_term = std::log(4.0L) + inv_sq - 1.0L;
  }
  return std::min(log_four_term, log_two_exp);
}

double SubsampledFromTable(int alpha, double q, double sigma,
                           const std::vector<SignedLog>& b_table,
                           const AccountantOptions& options,
                           AccountantDiagnostics* diagnostics) {
  if (q == 0.0) return 0.0;
  const ld c = HalfInverseSquare(sigma);
  const ld log_q = std::log(static_cast<ld>(q));
  const std::vector<ld> log_binom = LogBinomialRow(alpha);

  std::vector<ld> log_terms;
  log_terms.reserve(alpha);
  log_terms.push_back(2.0L * log_q + log_binom[2] +
                      LogSecondOrderCoefficient(c, options.second_order));
  for (int j = 3; j <= alpha; ++j) {
    const SignedLog& upper = b_table[2 * ((j + 1) / 2)];
    const SignedLog& lower = b_table[2 * (j / 2)];
    if (upper.sign <= 0 || lower.sign <= 0) {
      if (diagnostics != nullptr) ++diagnostics->clamped_b_values;
      continue;
    }
    log_terms.push_back(std::log(4.0L) + j * log_q + log_binom[j] +
                        0.5L * (upper.log_abs + lower.log_abs));
  }
  const ld log_s = LogSumExp(log_terms);
  // log(1 + S), accurate for both tiny and huge S.
  ld log_arg;
  if (log_s == kNegInf) {
    log_arg = 0.0L;
  } else if (log_s < 0.0L) {
    log_arg = std::log1p(std::exp(log_s));
  } else {
    log_arg = log_s + std::log1p(std::exp(-log_s));
  }
  if (!(log_arg >= 0.0L) || !std::isfinite(log_arg)) {
    throw NumericalError("subsampled RDP bound has an invalid log argument");
  }
  return static_cast<double>(log_arg / static_cast<ld>(alpha - 1));
}

}  // namespace

void PrivacySpec::Validate() const {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    throw DomainError("epsilon must be positive, got " +
                      std::to_string(epsilon));
  }
  if (!(delta > 0 && delta < 1)) {
    throw DomainError("delta must lie in (0, 1), got " + std::to_string(delta));
  }
}

void MechanismParams::Validate() const {
  CheckSigma(sigma_star);
  CheckQ(q);
  if (steps < 1) {
    throw DomainError("steps must be >= 1, got " + std::to_string(steps));
  }
}

void AlphaRange::Validate() const {
  CheckAlpha(min_alpha);
  if (max_alpha < min_alpha) {
    throw DomainError("alpha range is empty");
  }
}

RdpCurve RdpCurve::Compose(std::int64_t steps) const {
  RdpCurve out = *this;
  for (RdpEntry& e : out.entries) e.epsilon *= static_cast<double>(steps);
  return out;
}

double RdpGaussian(int alpha, double sigma) {
  CheckAlpha(alpha);
  CheckSigma(sigma);
  return static_cast<double>(static_cast<ld>(alpha) /
                             (2.0L * static_cast<ld>(sigma) * sigma));
}

long double BFunction(int l, double sigma) {
  if (l < 0) throw DomainError("l must be >= 0, got " + std::to_string(l));
  CheckSigma(sigma);
  if (l == 0) return 1.0L;
  if (l == 1) return 0.0L;
  const ld c = HalfInverseSquare(sigma);
  if (MaxLogTerm(l, c) > kLogMax) {
    throw OverflowError("B(" + std::to_string(l) +
                        ") has a term beyond the long double range; lower l "
                        "or raise sigma");
  }
  const SignedLog value = SignedLogBTable(l, sigma)[l];
  if (value.sign == 0) return 0.0L;
  if (value.log_abs > kLogMax) {
    throw OverflowError("B(" + std::to_string(l) + ") overflows");
  }
  return value.sign * std::exp(value.log_abs);
}

std::vector<long double> LogAbsBTable(int max_l, double sigma) {
  if (max_l < 0) throw DomainError("max_l must be >= 0");
  CheckSigma(sigma);
  const std::vector<SignedLog> table = SignedLogBTable(max_l, sigma);
  std::vector<long double> out(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) out[i] = table[i].log_abs;
  return out;
}

double SubsampledRdpEpsilon(int alpha, double q, double sigma,
                            const AccountantOptions& options,
                            AccountantDiagnostics* diagnostics) {
  CheckAlpha(alpha);
  CheckQ(q);
  CheckSigma(sigma);
  if (q == 0.0) return 0.0;
  const int max_l = 2 * ((alpha + 1) / 2);
  return SubsampledFromTable(alpha, q, sigma, SignedLogBTable(max_l, sigma),
                             options, diagnostics);
}

RdpCurve SubsampledRdpCurve(double q, double sigma, const AlphaRange& range,
                            const AccountantOptions& options,
                            AccountantDiagnostics* diagnostics) {
  range.Validate();
  CheckQ(q);
  CheckSigma(sigma);
  RdpCurve curve;
  curve.entries.reserve(range.max_alpha - range.min_alpha + 1);
  std::vector<SignedLog> table;
  if (q > 0.0) {
    table = SignedLogBTable(2 * ((range.max_alpha + 1) / 2), sigma);
  }
  for (int alpha = range.min_alpha; alpha <= range.max_alpha; ++alpha) {
    const double eps =
        q == 0.0 ? 0.0
                 : SubsampledFromTable(alpha, q, sigma, table, options,
                                       diagnostics);
    curve.entries.push_back({alpha, eps});
  }
  return curve;
}

EpsilonResult TotalDpEpsilon(const RdpCurve& per_step, std::int64_t steps,
                             double delta) {
  if (!(delta > 0 && delta < 1)) {
    throw DomainError("delta must lie in (0, 1), got " + std::to_string(delta));
  }
  if (per_step.entries.empty()) throw DomainError("alpha range is empty");
  const ld log_inv_delta = -std::log(static_cast<ld>(delta));
  EpsilonResult best{std::numeric_limits<double>::infinity(), 0};
  for (const RdpEntry& e : per_step.entries) {
    const ld value = static_cast<ld>(steps) * e.epsilon +
                     log_inv_delta / static_cast<ld>(e.alpha - 1);
    if (!std::isfinite(static_cast<double>(value))) continue;
    if (static_cast<double>(value) < best.epsilon) {
      best = {static_cast<double>(value), e.alpha};
    }
  }
  if (best.alpha == 0) {
    throw NumericalError("privacy bound is not finite for any alpha in range");
  }
  return best;
}

EpsilonResult TotalDpEpsilon(const MechanismParams& params, double delta,
                             const AlphaRange& range,
                             const AccountantOptions& options) {
  params.Validate();
  return TotalDpEpsilon(
      SubsampledRdpCurve(params.q, params.sigma_star, range, options),
      params.steps, delta);
}

DeltaResult SmallestDeltaForEpsilon(double epsilon, const RdpCurve& per_step,
                                    std::int64_t steps) {
  if (!(epsilon > 0)) {
    throw DomainError("epsilon must be positive, got " +
                      std::to_string(epsilon));
  }
  if (per_step.entries.empty()) throw DomainError("alpha range is empty");
  ld best_log = std::numeric_limits<ld>::infinity();
  int best_alpha = 0;
  for (const RdpEntry& e : per_step.entries) {
    const ld total = static_cast<ld>(steps) * e.epsilon;
    const ld log_delta = -static_cast<ld>(e.alpha - 1) * (epsilon - total);
    if (std::isnan(log_delta)) continue;
    if (log_delta < best_log) {
      best_log = log_delta;
      best_alpha = e.alpha;
    }
  }
  DeltaResult result;
  result.alpha = best_alpha;
  if (best_alpha == 0 || best_log >= 0.0L) {
    result.delta = 1.0;
    result.vacuous = true;
    return result;
  }
  result.delta = static_cast<double>(std::exp(best_log));
  return result;
}

DeltaResult SmallestDeltaForEpsilon(double epsilon,
                                    const MechanismParams& params,
                                    const AlphaRange& range,
                                    const AccountantOptions& options) {
  params.Validate();
  return SmallestDeltaForEpsilon(
      epsilon, SubsampledRdpCurve(params.q, params.sigma_star, range, options),
      params.steps);
}

double CalibrateSigma(const PrivacySpec& spec, double q, std::int64_t steps,
                      const AlphaRange& range,
                      const AccountantOptions& options) {
  spec.Validate();
  if (!(q > 0.0 && q <= 1.0)) {
    throw DomainError("q must lie in (0, 1], got " + std::to_string(q));
  }
  if (steps < 1) throw DomainError("steps must be >= 1");
  range.Validate();

  auto fits = [&](double sigma) {
    const MechanismParams params{sigma, q, steps};
    return TotalDpEpsilon(params, spec.delta, range, options).epsilon <=
           spec.epsilon;
  };
  double lo = kCalibrationLowerSigma;
  double hi = kCalibrationUpperSigma;
  if (!fits(hi)) {
    throw NumericalError("no sigma in [1e-3, 1e6] meets the privacy budget");
  }
  if (fits(lo)) return lo;
  while (hi - lo > kCalibrationRelativeTolerance * hi) {
    const double mid = hi / lo > 2.0 ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    if (fits(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace adadp
