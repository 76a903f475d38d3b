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

#include "adadp/mlp.h"

#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

#include "adadp/errors.h"

namespace adadp {
namespace {

struct Layers {
  Eigen::Map<const Eigen::MatrixXd> w1;
  Eigen::Map<const Eigen::VectorXd> b1;
  Eigen::Map<const Eigen::MatrixXd> w2;
  Eigen::Map<const Eigen::VectorXd> b2;
};

Layers Unpack(const ParameterVector& theta, const MlpShape& s) {
  if (theta.size() != s.num_params()) {
    throw DimensionError("MLP parameter vector has the wrong length");
  }
  const double* p = theta.data();
  const double* b1 = p + s.hidden * s.inputs;
  const double* w2 = b1 + s.hidden;
  const double* b2 = w2 + s.classes * s.hidden;
  return {Eigen::Map<const Eigen::MatrixXd>(p, s.hidden, s.inputs),
          Eigen::Map<const Eigen::VectorXd>(b1, s.hidden),
          Eigen::Map<const Eigen::MatrixXd>(w2, s.classes, s.hidden),
          Eigen::Map<const Eigen::VectorXd>(b2, s.classes)};
}

struct Forward {
  Eigen::MatrixXd pre_hidden;  // batch x hidden
  Eigen::MatrixXd hidden;      // batch x hidden, after ReLU
  Eigen::MatrixXd log_probs;   // batch x classes
  Eigen::MatrixXd probs;       // batch x classes
};

Forward RunForward(const Layers& l, const Eigen::MatrixXd& x) {
  Forward f;
  f.pre_hidden = (x * l.w1.transpose()).rowwise() + l.b1.transpose();
  f.hidden = f.pre_hidden.cwiseMax(0.0);
  Eigen::MatrixXd logits =
      (f.hidden * l.w2.transpose()).rowwise() + l.b2.transpose();
  const Eigen::VectorXd row_max = logits.rowwise().maxCoeff();
  logits.colwise() -= row_max;
  const Eigen::VectorXd log_sums =
      logits.array().exp().rowwise().sum().log().matrix();
  f.log_probs = logits.colwise() - log_sums;
  f.probs = f.log_probs.array().exp();
  return f;
}

Eigen::MatrixXd GatherRows(const Eigen::MatrixXd& m,
                           std::span<const std::int64_t> indices) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(indices.size()), m.cols());
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    if (indices[r] < 0 || indices[r] >= m.rows()) {
      throw DimensionError("example index out of range");
    }
    out.row(r) = m.row(indices[r]);
  }
  return out;
}

std::vector<std::int64_t> AllIndices(std::int64_t n) {
  std::vector<std::int64_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

}  // namespace

ParameterVector InitMlpWeights(const MlpShape& shape, Rng& rng) {
  ParameterVector theta(shape.num_params());
  const double r1 = 1.0 / std::sqrt(static_cast<double>(shape.inputs));
  const double r2 = 1.0 / std::sqrt(static_cast<double>(shape.hidden));
  const Eigen::Index first = shape.hidden * shape.inputs + shape.hidden;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    const double r = i < first ? r1 : r2;
    theta[i] = rng.Uniform(-r, r);
  }
  return theta;
}

MlpObjective::MlpObjective(std::shared_ptr<const Dataset> data,
                           const MlpShape& shape)
    : data_(std::move(data)), shape_(shape) {
  if (!data_) throw DomainError("MlpObjective needs a dataset");
  data_->Validate();
  if (data_->feature_dim() != shape_.inputs) {
    throw DimensionError("dataset feature dimension differs from MLP inputs");
  }
  if (data_->num_classes > shape_.classes) {
    throw DimensionError("dataset has more classes than the MLP output");
  }
}

double MlpObjective::Loss(const ParameterVector& theta,
                          std::span<const std::int64_t> indices) const {
  const Layers l = Unpack(theta, shape_);
  const Forward f = RunForward(l, GatherRows(data_->features, indices));
  double total = 0.0;
  for (Eigen::Index r = 0; r < f.probs.rows(); ++r) {
    total -= f.log_probs(r, data_->labels[indices[r]]);
  }
  return total / static_cast<double>(indices.size());
}

double MlpObjective::Loss(const ParameterVector& theta) const {
  const std::vector<std::int64_t> all = AllIndices(num_examples());
  return Loss(theta, all);
}

Eigen::MatrixXd MlpObjective::PerExampleGradients(
    const ParameterVector& theta,
    std::span<const std::int64_t> indices) const {
  if (indices.empty()) throw DimensionError("empty batch");
  const Layers l = Unpack(theta, shape_);
  const Eigen::MatrixXd x = GatherRows(data_->features, indices);
  const Forward f = RunForward(l, x);

  const Eigen::Index h = shape_.hidden;
  const Eigen::Index d = shape_.inputs;
  const Eigen::Index c = shape_.classes;
  const Eigen::Index off_b1 = h * d;
  const Eigen::Index off_w2 = off_b1 + h;
  const Eigen::Index off_b2 = off_w2 + c * h;

  Eigen::MatrixXd grads(x.rows(), shape_.num_params());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    Eigen::VectorXd d_logits = f.probs.row(r).transpose();
    d_logits[data_->labels[indices[r]]] -= 1.0;
    Eigen::VectorXd d_pre = l.w2.transpose() * d_logits;
    for (Eigen::Index k = 0; k < h; ++k) {
      if (f.pre_hidden(r, k) <= 0.0) d_pre[k] = 0.0;
    }
    auto row = grads.row(r);
    for (Eigen::Index j = 0; j < d; ++j) {
      row.segment(j * h, h) = (d_pre * x(r, j)).transpose();
    }
    row.segment(off_b1, h) = d_pre.transpose();
    for (Eigen::Index k = 0; k < h; ++k) {
      row.segment(off_w2 + k * c, c) = (d_logits * f.hidden(r, k)).transpose();
    }
    row.segment(off_b2, c) = d_logits.transpose();
  }
  return grads;
}

Eigen::VectorXd MlpObjective::Gradient(const ParameterVector& theta) const {
  const std::vector<std::int64_t> all = AllIndices(num_examples());
  return PerExampleGradients(theta, all).colwise().mean().transpose();
}

Eigen::MatrixXd MlpObjective::Predict(const ParameterVector& theta,
                                      const Eigen::MatrixXd& features) const {
  return RunForward(Unpack(theta, shape_), features).probs;
}

double MlpObjective::Accuracy(const ParameterVector& theta) const {
  const Eigen::MatrixXd probs = Predict(theta, data_->features);
  std::int64_t correct = 0;
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    Eigen::Index best;
    probs.row(r).maxCoeff(&best);
    if (best == data_->labels[r]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(probs.rows());
}

}  // namespace adadp
