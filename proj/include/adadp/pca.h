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

#ifndef ADADP_PCA_H_
#define ADADP_PCA_H_

#include <Eigen/Dense>

namespace adadp {

// Non-private PCA of mean-centered data.
struct PcaResult {
  Eigen::VectorXd mean;                // d
  Eigen::MatrixXd projection;          // d x k, orthonormal columns
  Eigen::VectorXd explained_variance;  // k, descending
  Eigen::MatrixXd projected;           // N x k
};

// Projects onto the top `components` principal directions. Directions with
// zero variance are still returned when the data is rank deficient.
PcaResult PcaProject(const Eigen::MatrixXd& features, Eigen::Index components);

// Mean squared reconstruction error of `features` through `pca`.
double ReconstructionError(const Eigen::MatrixXd& features,
                           const PcaResult& pca);

}  // namespace adadp

#endif  // ADADP_PCA_H_
