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

// adadp: command-line front end.
//
//   adadp accountant --sigma_star 0.9 --q 0.01 --steps 1800
//   adadp train --config run.json --seed 3 --out runs/a --eta 0.02
//
// Exit codes: 0 success, 1 usage or config error, 2 numerical failure,
// 3 I/O error.

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "adadp/config.h"
#include "adadp/errors.h"
#include "adadp/experiment.h"

namespace {

using adadp::ExperimentConfig;
using adadp::ExperimentKind;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitIo = 3;

struct Overrides {
  std::string section;
  std::string field;
  std::optional<std::string> value;
};

struct Subcommand {
  ExperimentKind kind;
  CLI::App* app = nullptr;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::vector<Overrides> overrides;
};

void PrintAccountant(const adadp::AccountantReport& r) {
  std::printf("alpha  rdp_step  rdp_total  epsilon  delta\n");
  for (const auto& row : r.rows) {
    std::printf("%3d  %.6g  %.6g  %.6g  %.6g\n", row.alpha, row.rdp_step,
                row.rdp_total, row.epsilon, row.delta);
  }
  std::printf("mode=%s q=%g sigma_star=%.6g steps=%lld\n", r.mode.c_str(),
              r.q, r.sigma_star, static_cast<long long>(r.steps));
  std::printf("epsilon=%.6g delta=%.6g alpha=%d%s\n", r.epsilon, r.delta,
              r.alpha, r.vacuous ? " VACUOUS" : "");
}

void PrintTraining(const adadp::TrainingReport& r) {
  std::printf(
      "%s: status=%s steps=%lld loss=%.6g accuracy=%.4f sigma_star=%.6g "
      "epsilon=%.6g delta_star=%.6g steps_to_threshold=%lld\n",
      r.algorithm.c_str(), r.status.c_str(),
      static_cast<long long>(r.steps_completed), r.final_loss,
      r.final_accuracy, r.sigma_star, r.epsilon, r.delta_star,
      static_cast<long long>(r.steps_to_threshold));
}

void Run(const ExperimentConfig& config) {
  switch (config.kind) {
    case ExperimentKind::kAccountant:
    case ExperimentKind::kCalibrate:
      PrintAccountant(adadp::RunAccountant(config));
      break;
    case ExperimentKind::kCosine:
      for (const auto& row : adadp::RunCosine(config)) {
        std::printf("sigma=[");
        for (std::size_t i = 0; i < row.sigmas.size(); ++i) {
          std::printf(i ? ", %g" : "%g", row.sigmas[i]);
        }
        std::printf("] mean_cosine=%.4f se=%.4f\n", row.mean,
                    row.standard_error);
      }
      break;
    case ExperimentKind::kOracle: {
      const adadp::OracleReport r = adadp::RunOracle(config);
      std::printf("analytic delta(h=%g, epsilon=%g) = %.12g\n",
                  config.oracle.loss_variance, config.oracle.epsilon, r.reference);
      for (const auto& row : r.rows) {
        std::printf("h=%.4f epsilon=%.4f analytic=%.6g mc=%.6g se=%.2g\n",
                    row.h, row.epsilon, row.analytic, row.estimate,
                    row.standard_error);
      }
      break;
    }
    case ExperimentKind::kTrajectory: {
      const auto r = adadp::RunTrajectoryExperiment(config);
      std::printf("%s from (%g, %g): D(adadp, rmsprop)=%.4f "
                  "D(dpsgd, sgd)=%.4f\n",
                  r.function.c_str(), r.start[0], r.start[1],
                  r.adadp.distance, r.dpsgd.distance);
      break;
    }
    case ExperimentKind::kTrain:
      PrintTraining(adadp::RunTraining(config));
      break;
    case ExperimentKind::kSweep:
      for (const auto& row : adadp::RunSweep(config)) {
        std::printf("%s=%g ", config.sweep.parameter.c_str(), row.value);
        PrintTraining(row.report);
      }
      break;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive differentially private optimization experiments"};
  app.require_subcommand(1);

  const std::vector<std::pair<ExperimentKind, const char*>> kinds = {
      {ExperimentKind::kAccountant, "RDP accountant: epsilon, delta or sigma"},
      {ExperimentKind::kCalibrate, "Smallest sigma_star for a budget"},
      {ExperimentKind::kCosine, "Cosine similarity of noisy values"},
      {ExperimentKind::kOracle, "Analytic vs Monte Carlo privacy loss"},
      {ExperimentKind::kTrajectory, "Private vs non-private trajectories"},
      {ExperimentKind::kTrain, "Train an MLP classifier"},
      {ExperimentKind::kSweep, "Train over a one-parameter grid"},
  };
  std::vector<Subcommand> subs(kinds.size());
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    Subcommand& sub = subs[k];
    sub.kind = kinds[k].first;
    sub.app = app.add_subcommand(adadp::KindName(sub.kind), kinds[k].second);
    sub.app->add_option("--config", sub.config_path, "JSON config file");
    sub.app->add_option("--seed", sub.seed, "Master seed");
    sub.app->add_option("--out", sub.out, "Output directory");
    for (const std::string& section : adadp::SectionsFor(sub.kind)) {
      for (const std::string& field : adadp::SectionFields(section)) {
        sub.overrides.push_back({section, field, std::nullopt});
      }
    }
    for (Overrides& o : sub.overrides) {
      sub.app->add_option("--" + o.field, o.value, o.section + "." + o.field);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  for (const Subcommand& sub : subs) {
    if (!sub.app->parsed()) continue;
    try {
      ExperimentConfig config =
          sub.config_path.empty()
              ? adadp::ConfigFromJson(adadp::Json::object(), sub.kind)
              : adadp::LoadConfig(sub.config_path, sub.kind);
      if (sub.seed) config.seed = *sub.seed;
      if (sub.out) config.out = *sub.out;
      for (const Overrides& o : sub.overrides) {
        if (o.value) adadp::ApplyOverride(config, o.section, o.field, *o.value);
      }
      adadp::ValidateConfig(config);
      Run(config);
    } catch (const adadp::IoError& e) {
      std::cerr << "I/O error: " << e.what() << '\n';
      return kExitIo;
    } catch (const adadp::FormatError& e) {
      std::cerr << "I/O error: " << e.what() << '\n';
      return kExitIo;
    } catch (const adadp::NumericalError& e) {
      std::cerr << "numerical error: " << e.what() << '\n';
      return kExitNumerical;
    } catch (const std::invalid_argument& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return kExitUsage;
    }
  }
  return kExitOk;
}
