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

#include "adadp/pca.h"

#include <algorithm>

#include "adadp/errors.h"

namespace adadp {

PcaResult PcaProject(const Eigen::MatrixXd& features,
                     Eigen::Index components) {
  const Eigen::Index d = features.cols();
  if (features.rows() < 1) throw DomainError("PCA of an empty matrix");
  if (components < 1 || components > d) {
    throw DomainError("components must lie in [1, feature dimension]");
  }
  PcaResult out;
  out.mean = features.colwise().mean().transpose();
  const Eigen::MatrixXd centered = features.rowwise() - out.mean.transpose();
  const Eigen::MatrixXd cov =
      centered.transpose() * centered / static_cast<double>(features.rows());

  // Eigenvalues come back ascending; take the trailing columns reversed.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("PCA eigendecomposition failed");
  }
  out.projection.resize(d, components);
  out.explained_variance.resize(components);
  for (Eigen::Index k = 0; k < components; ++k) {
    out.projection.col(k) = solver.eigenvectors().col(d - 1 - k);
    out.explained_variance[k] =
        std::max(0.0, solver.eigenvalues()[d - 1 - k]);
  }
  out.projected = centered * out.projection;
  return out;
}

double ReconstructionError(const Eigen::MatrixXd& features,
                           const PcaResult& pca) {
  const Eigen::MatrixXd centered = features.rowwise() - pca.mean.transpose();
  const Eigen::MatrixXd rebuilt =
      centered * pca.projection * pca.projection.transpose();
  return (centered - rebuilt).squaredNorm() /
         static_cast<double>(features.rows());
}

}  // namespace adadp
