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

#ifndef ADADP_MLP_H_
#define ADADP_MLP_H_

#include <cstdint>
#include <memory>
#include <span>

#include <Eigen/Dense>

#include "adadp/dataset.h"
#include "adadp/objectives.h"
#include "adadp/random.h"

namespace adadp {

// One ReLU hidden layer followed by a softmax output.
struct MlpShape {
  Eigen::Index inputs = 20;
  Eigen::Index hidden = 32;
  Eigen::Index classes = 2;

  // Parameters are packed as [W1 (hidden x inputs), b1, W2 (classes x
  // hidden), b2], matrices column-major.
  Eigen::Index num_params() const {
    return hidden * inputs + hidden + classes * hidden + classes;
  }
};

// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] for weights and biases.
ParameterVector InitMlpWeights(const MlpShape& shape, Rng& rng);

// Softmax cross-entropy of an MLP over a dataset.
class MlpObjective : public Objective {
 public:
  MlpObjective(std::shared_ptr<const Dataset> data, const MlpShape& shape);

  const MlpShape& shape() const { return shape_; }
  const Dataset& data() const { return *data_; }

  Eigen::Index dim() const override { return shape_.num_params(); }
  std::int64_t num_examples() const override { return data_->size(); }

  double Loss(const ParameterVector& theta) const override;
  Eigen::VectorXd Gradient(const ParameterVector& theta) const override;
  Eigen::MatrixXd PerExampleGradients(
      const ParameterVector& theta,
      std::span<const std::int64_t> indices) const override;

  // Mean loss and gradient over a subset of examples.
  double Loss(const ParameterVector& theta,
              std::span<const std::int64_t> indices) const;

  // Class probabilities, one row per example in `features`.
  Eigen::MatrixXd Predict(const ParameterVector& theta,
                          const Eigen::MatrixXd& features) const;

  // Fraction of dataset examples whose argmax prediction equals the label.
  double Accuracy(const ParameterVector& theta) const;

 private:
  std::shared_ptr<const Dataset> data_;
  MlpShape shape_;
};

}  // namespace adadp

#endif  // ADADP_MLP_H_
