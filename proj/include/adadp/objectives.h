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

#ifndef ADADP_OBJECTIVES_H_
#define ADADP_OBJECTIVES_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace adadp {

using ParameterVector = Eigen::VectorXd;

// A differentiable loss. Dataset objectives expose one gradient row per
// example; analytic test functions behave as a dataset of one example.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual Eigen::Index dim() const = 0;
  virtual std::int64_t num_examples() const { return 1; }

  // Mean loss over all examples.
  virtual double Loss(const ParameterVector& theta) const = 0;
  virtual Eigen::VectorXd Gradient(const ParameterVector& theta) const = 0;

  // Row r is the gradient of the loss on example indices[r].
  virtual Eigen::MatrixXd PerExampleGradients(
      const ParameterVector& theta,
      std::span<const std::int64_t> indices) const;
};

// Which exponent the third Beale term carries.
//   kPrinted: (2.625 - x + x y^3)^3
//   kSquared: (2.625 - x + x y^3)^2 (the canonical function)
enum class BealeForm { kPrinted, kSquared };

struct ValueAndGradient {
  double value = 0.0;
  Eigen::Vector2d gradient = Eigen::Vector2d::Zero();
};

ValueAndGradient Beale(const Eigen::Vector2d& point,
                       BealeForm form = BealeForm::kPrinted);
ValueAndGradient Rosenbrock(const Eigen::Vector2d& point, double a = 1.0,
                            double b = 100.0);
ValueAndGradient Booth(const Eigen::Vector2d& point);
ValueAndGradient Himmelblau(const Eigen::Vector2d& point);

// Two-dimensional analytic test function with its known minima and the start
// point used by trajectory experiments.
class TestFunction : public Objective {
 public:
  using Evaluator = ValueAndGradient (*)(const Eigen::Vector2d&);

  TestFunction(std::string name, Evaluator evaluator,
               std::vector<Eigen::Vector2d> minima, Eigen::Vector2d start);

  const std::string& name() const { return name_; }
  const std::vector<Eigen::Vector2d>& minima() const { return minima_; }
  const Eigen::Vector2d& default_start() const { return start_; }

  Eigen::Index dim() const override { return 2; }
  double Loss(const ParameterVector& theta) const override;
  Eigen::VectorXd Gradient(const ParameterVector& theta) const override;

 private:
  std::string name_;
  Evaluator evaluator_;
  std::vector<Eigen::Vector2d> minima_;
  Eigen::Vector2d start_;
};

// Beale (printed and squared forms), Rosenbrock (a=1, b=100), Booth,
// Himmelblau.
std::vector<TestFunction> TestFunctionSuite();

// Looks up a suite member by name ("beale", "beale_squared", "rosenbrock",
// "booth", "himmelblau"). Throws DomainError for unknown names.
TestFunction MakeTestFunction(const std::string& name);

}  // namespace adadp

#endif  // ADADP_OBJECTIVES_H_
