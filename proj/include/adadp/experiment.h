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

// Experiment runners behind the command-line tool. Each Run* function
// returns its report and, when config.out is non-empty, writes CSV series
// and a JSON summary into that directory (created if missing).
//
// Output files:
//   accountant  accountant.csv (alpha, rdp_step, rdp_total, epsilon, delta)
//               accountant.json
//   cosine      cosine.csv (case, sigma_1..sigma_m, mean, standard_error)
//   oracle      oracle.csv (triple, h, epsilon, analytic, estimate,
//               standard_error, z)
//   trajectory  trajectory.csv (step, adadp_x, adadp_y, rmsprop_x, ...,
//               sgd_y), trajectory.json
//   train       train.csv (step, loss, accuracy, epsilon, delta_star, mode,
//               sigma_min, sigma_mean, sigma_max), sigma_snapshots.csv
//               (step, coordinate, sigma), prior_snapshots.csv (step,
//               coordinate, sqrt_prior, abs_grad), train.json
//   sweep       sweep.csv (<parameter>, status, steps, final_loss, final_accuracy,
//               delta_star, steps_to_threshold), one train run per point
//               under point_<k>/

#ifndef ADADP_EXPERIMENT_H_
#define ADADP_EXPERIMENT_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "adadp/config.h"
#include "adadp/optimizer.h"

namespace adadp {

// Rows are points. Mean of the pointwise Euclidean distances.
double TrajectoryDistance(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q);

struct TrajectoryReport {
  Eigen::MatrixXd p;
  Eigen::MatrixXd q;
  double distance = 0.0;
};

struct TrajectoryExperimentResult {
  std::string function;
  Eigen::Vector2d start = Eigen::Vector2d::Zero();
  TrajectoryReport adadp;  // p: AdaDP, q: RMSProp
  TrajectoryReport dpsgd;  // p: DpSgd, q: SGD
};

TrajectoryExperimentResult RunTrajectoryExperiment(
    const ExperimentConfig& config);

struct AccountantRow {
  int alpha = 0;
  double rdp_step = 0.0;
  double rdp_total = 0.0;
  double epsilon = 0.0;  // at the configured delta
  double delta = 0.0;    // at the configured epsilon, clamped to [0, 1]
};

struct AccountantReport {
  std::string mode;
  double q = 0.0;
  double sigma_star = 0.0;
  std::int64_t steps = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  int alpha = 0;
  bool vacuous = false;
  std::vector<AccountantRow> rows;
};

Json ToJson(const AccountantReport& report);

// Handles both the accountant and calibrate kinds; calibrate forces
// mode "sigma".
AccountantReport RunAccountant(const ExperimentConfig& config);

struct CosineRow {
  std::vector<double> sigmas;
  double mean = 0.0;
  double standard_error = 0.0;
};

std::vector<CosineRow> RunCosine(const ExperimentConfig& config);

struct OracleRow {
  std::vector<double> sensitivities;
  std::vector<double> sigmas;
  double h = 0.0;
  double epsilon = 0.0;
  double analytic = 0.0;
  double estimate = 0.0;
  double standard_error = 0.0;
};

struct OracleReport {
  double reference = 0.0;  // analytic delta at the configured (h, epsilon)
  std::vector<OracleRow> rows;
};

OracleReport RunOracle(const ExperimentConfig& config);

struct TrainingRow {
  std::int64_t step = 0;
  double loss = 0.0;
  double accuracy = 0.0;  // NaN on steps that were not evaluated
  double epsilon = 0.0;   // at the configured delta; NaN when non-private
  double delta_star = 0.0;
  std::string mode;
  SigmaSummary sigma;
};

struct TrainingReport {
  std::string algorithm;
  std::string status = "ok";  // "ok" or "diverged"
  double q = 0.0;
  double sigma_star = 0.0;
  std::int64_t steps_completed = 0;
  double final_loss = 0.0;
  double final_accuracy = 0.0;
  double epsilon = 0.0;
  double delta_star = 0.0;
  // First evaluated step whose accuracy reached the threshold, -1 if none.
  std::int64_t steps_to_threshold = -1;
  std::vector<TrainingRow> rows;
};

Json ToJson(const TrainingReport& report);
// Inverse of ToJson; rows are not part of the summary.
TrainingReport TrainingReportFromJson(const Json& json);

// Throws DivergenceError after flushing the rows completed so far and a
// summary with status "diverged".
TrainingReport RunTraining(const ExperimentConfig& config);

struct SweepRow {
  double value = 0.0;
  std::string status;
  TrainingReport report;
};

std::vector<SweepRow> RunSweep(const ExperimentConfig& config);

}  // namespace adadp

#endif  // ADADP_EXPERIMENT_H_
