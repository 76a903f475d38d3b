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

// Central finite-difference check shared by the model tests and the
// acceptance binary.

#ifndef ADADP_TESTS_GRADIENT_CHECK_H_
#define ADADP_TESTS_GRADIENT_CHECK_H_

#include <algorithm>
#include <functional>

#include <Eigen/Dense>

namespace adadp {

inline Eigen::VectorXd FiniteDifference(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, double h = 1e-6) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double step = h * std::max(1.0, std::abs(x[i]));
    probe[i] = x[i] + step;
    const double up = f(probe);
    probe[i] = x[i] - step;
    const double down = f(probe);
    probe[i] = x[i];
    g[i] = (up - down) / (2 * step);
  }
  return g;
}

// ||fd - analytic|| / max(||analytic||, 1).
inline double GradientError(const Eigen::VectorXd& fd,
                            const Eigen::VectorXd& analytic) {
  return (fd - analytic).norm() / std::max(analytic.norm(), 1.0);
}

}  // namespace adadp

#endif  // ADADP_TESTS_GRADIENT_CHECK_H_
