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

// Experiment configuration. A config file is a JSON object with optional
// top-level "kind", "seed" and "out" keys plus one object per section:
//
//   {"seed": 7, "out": "runs/a", "train": {"eta": 0.01, "algorithm": "adan"}}
//
// Sections are flat. Every field has a default, unknown keys are rejected
// with the offending path in the message, and the same field names double
// as command-line overrides.

#ifndef ADADP_CONFIG_H_
#define ADADP_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "adadp/accountant.h"
#include "adadp/optimizer.h"

namespace adadp {

using Json = nlohmann::json;

enum class ExperimentKind {
  kAccountant,
  kCalibrate,
  kCosine,
  kOracle,
  kTrajectory,
  kTrain,
  kSweep,
};

const char* KindName(ExperimentKind kind);
ExperimentKind ParseKind(const std::string& name);

struct AccountantSettings {
  // "epsilon": fixed delta, report epsilon. "delta": fixed epsilon, report
  // the smallest delta. "sigma": calibrate sigma_star to (epsilon, delta).
  std::string mode = "epsilon";
  double epsilon = 4.0;
  double delta = 1e-5;
  double q = 0.01;
  double sigma_star = 0.9;
  std::int64_t steps = 1800;
  int min_alpha = 2;
  int max_alpha = 64;
  SecondOrderTerm second_order = SecondOrderTerm::kStandard;
};

struct CosineSettings {
  std::vector<double> f = {10.0, 5.0};
  std::vector<std::vector<double>> sigmas = {
      {17.0, 8.5}, {13.5, 13.5}, {12.4, 24.8}};
  std::int64_t trials = 10000;
};

struct OracleSettings {
  double loss_variance = 1.0;  // H = sum s_i^2 / sigma_i^2
  double epsilon = 1.0;
  int triples = 20;
  int dim = 3;
  std::int64_t trials = 1000000;
};

struct TrajectorySettings {
  std::string function = "beale_squared";
  // Empty means the function's default start.
  std::vector<double> start;
  std::int64_t steps = 150;
  double eta = 0.003;
  double sigma_star = 2.0;
  double beta = 1.5;
  double threshold = 1e-6;
  double global_bound = 2.0;
  double gamma = 0.1;
  double gamma_prime = 0.9;
};

struct TrainingSettings {
  // "synthetic" or "idx".
  std::string dataset = "synthetic";
  std::string images;
  std::string labels;
  std::int64_t examples = 2000;
  std::int64_t features = 20;
  int classes = 2;
  double separation = 3.0;
  // Synthetic column j is scaled by min_feature_scale^((d-1-j)/(d-1)), a
  // geometric ramp from min_feature_scale up to 1. 1 leaves features as drawn.
  double min_feature_scale = 1.0;
  // Project onto this many principal components first; 0 keeps raw features.
  std::int64_t pca_components = 0;
  std::int64_t hidden = 32;

  std::string algorithm = "adadp";
  double eta = 0.01;
  std::int64_t lot_size = 100;
  double sigma_star = 4.0;
  double beta = 1.2;
  double threshold = 1e-6;
  double global_bound = 4.0;
  double gamma = 0.1;
  double gamma_prime = 0.9;
  double eps0 = 1e-8;
  std::int64_t steps = 200;
  PriorSource prior_source = PriorSource::kRawGradient;
  ModeStatistic mode_statistic = ModeStatistic::kSqrtPrior;
  bool noise_per_example = false;

  // delta_star is reported against epsilon. With calibrate set, sigma_star
  // is replaced by the smallest value meeting (epsilon, delta) after steps.
  double epsilon = 2.0;
  double delta = 1e-5;
  bool calibrate = false;

  std::int64_t eval_every = 1;
  double accuracy_threshold = 0.9;
  std::vector<std::int64_t> snapshot_steps;

  TrainConfig ToTrainConfig(std::int64_t dataset_size) const;
};

struct SweepSettings {
  // One of "eta", "beta", "sigma_star", "lot_size".
  std::string parameter = "beta";
  std::vector<double> values = {0.8, 1.0, 1.2, 1.5, 2.0};
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kTrain;
  std::uint64_t seed = 0;
  std::string out;  // empty: write nothing
  AccountantSettings accountant;
  CosineSettings cosine;
  OracleSettings oracle;
  TrajectorySettings trajectory;
  TrainingSettings train;
  SweepSettings sweep;
};

// Sections read by an experiment, e.g. {"train", "sweep"} for kSweep.
std::vector<std::string> SectionsFor(ExperimentKind kind);
std::vector<std::string> SectionFields(const std::string& section);

// Throws ConfigError naming the offending key or field.
ExperimentConfig ConfigFromJson(const Json& json, ExperimentKind kind);
ExperimentConfig LoadConfig(const std::string& path, ExperimentKind kind);
Json ConfigToJson(const ExperimentConfig& config);

// Sets one field from command-line text. The text is read as JSON when it
// parses, otherwise as a string, so "--sigmas [[1,2]]" and "--algorithm
// adan" both work.
void ApplyOverride(ExperimentConfig& config, const std::string& section,
                   const std::string& field, const std::string& text);

// Range checks for the sections used by config.kind.
void ValidateConfig(const ExperimentConfig& config);

}  // namespace adadp

#endif  // ADADP_CONFIG_H_
