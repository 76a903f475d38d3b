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

#include "adadp/objectives.h"

#include <utility>

#include "adadp/errors.h"

namespace adadp {

Eigen::MatrixXd Objective::PerExampleGradients(
    const ParameterVector& theta, std::span<const std::int64_t> indices) const {
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(indices.size()), dim());
  const Eigen::VectorXd g = Gradient(theta);
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    if (indices[r] != 0) {
      throw DimensionError("analytic objective has a single example");
    }
    rows.row(r) = g.transpose();
  }
  return rows;
}

ValueAndGradient Beale(const Eigen::Vector2d& point, BealeForm form) {
  const double x = point.x();
  const double y = point.y();
  const double y2 = y * y;
  const double y3 = y2 * y;
  const double u1 = 1.5 - x + x * y;
  const double u2 = 2.25 - x + x * y2;
  const double u3 = 2.625 - x + x * y3;

  ValueAndGradient out;
  out.value = u1 * u1 + u2 * u2;
  double dx = 2 * u1 * (y - 1) + 2 * u2 * (y2 - 1);
  double dy = 2 * u1 * x + 2 * u2 * (2 * x * y);
  // d/du of the third term: 3u^2 (printed) or 2u (squared).
  double du3;
  if (form == BealeForm::kPrinted) {
    out.value += u3 * u3 * u3;
    du3 = 3 * u3 * u3;
  } else {
    out.value += u3 * u3;
    du3 = 2 * u3;
  }
  dx += du3 * (y3 - 1);
  dy += du3 * (3 * x * y2);
  out.gradient = {dx, dy};
  return out;
}

ValueAndGradient Rosenbrock(const Eigen::Vector2d& point, double a, double b) {
  const double x = point.x();
  const double y = point.y();
  const double r = y - x * x;
  ValueAndGradient out;
  out.value = (a - x) * (a - x) + b * r * r;
  out.gradient = {-2 * (a - x) - 4 * b * x * r, 2 * b * r};
  return out;
}

ValueAndGradient Booth(const Eigen::Vector2d& point) {
  const double u = point.x() + 2 * point.y() - 7;
  const double v = 2 * point.x() + point.y() - 5;
  ValueAndGradient out;
  out.value = u * u + v * v;
  out.gradient = {2 * u + 4 * v, 4 * u + 2 * v};
  return out;
}

ValueAndGradient Himmelblau(const Eigen::Vector2d& point) {
  const double x = point.x();
  const double y = point.y();
  const double u = x * x + y - 11;
  const double v = x + y * y - 7;
  ValueAndGradient out;
  out.value = u * u + v * v;
  out.gradient = {4 * x * u + 2 * v, 2 * u + 4 * y * v};
  return out;
}

TestFunction::TestFunction(std::string name, Evaluator evaluator,
                           std::vector<Eigen::Vector2d> minima,
                           Eigen::Vector2d start)
    : name_(std::move(name)),
      evaluator_(evaluator),
      minima_(std::move(minima)),
      start_(start) {}

double TestFunction::Loss(const ParameterVector& theta) const {
  if (theta.size() != 2) throw DimensionError(name_ + " takes 2 parameters");
  return evaluator_(theta).value;
}

Eigen::VectorXd TestFunction::Gradient(const ParameterVector& theta) const {
  if (theta.size() != 2) throw DimensionError(name_ + " takes 2 parameters");
  return evaluator_(theta).gradient;
}

std::vector<TestFunction> TestFunctionSuite() {
  std::vector<TestFunction> suite;
  suite.emplace_back(
      "beale",
      [](const Eigen::Vector2d& p) { return Beale(p, BealeForm::kPrinted); },
      std::vector<Eigen::Vector2d>{{3.0, 0.5}}, Eigen::Vector2d(-2.0, 2.0));
  suite.emplace_back(
      "beale_squared",
      [](const Eigen::Vector2d& p) { return Beale(p, BealeForm::kSquared); },
      std::vector<Eigen::Vector2d>{{3.0, 0.5}}, Eigen::Vector2d(-2.0, 2.0));
  suite.emplace_back(
      "rosenbrock",
      [](const Eigen::Vector2d& p) { return Rosenbrock(p); },
      std::vector<Eigen::Vector2d>{{1.0, 1.0}}, Eigen::Vector2d(-1.5, 2.0));
  suite.emplace_back("booth", &Booth, std::vector<Eigen::Vector2d>{{1.0, 3.0}},
                     Eigen::Vector2d(-5.0, -5.0));
  suite.emplace_back("himmelblau", &Himmelblau,
                     std::vector<Eigen::Vector2d>{{3.0, 2.0},
                                                  {-2.805118, 3.131312},
                                                  {-3.779310, -3.283186},
                                                  {3.584428, -1.848126}},
                     Eigen::Vector2d(0.0, 0.0));
  return suite;
}

TestFunction MakeTestFunction(const std::string& name) {
  for (TestFunction& f : TestFunctionSuite()) {
    if (f.name() == name) return f;
  }
  throw DomainError("unknown test function '" + name + "'");
}

}  // namespace adadp
