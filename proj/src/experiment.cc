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

#include "adadp/experiment.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <set>
#include <utility>

#include "adadp/accountant.h"
#include "adadp/csv.h"
#include "adadp/dataset.h"
#include "adadp/errors.h"
#include "adadp/mlp.h"
#include "adadp/noise_allocator.h"
#include "adadp/objectives.h"
#include "adadp/pca.h"
#include "adadp/random.h"

namespace adadp {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string PrepareDir(const std::string& out) {
  if (out.empty()) return out;
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) throw IoError("cannot create " + out + ": " + ec.message());
  return out;
}

std::string Join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void WriteJsonFile(const std::string& path, const Json& json) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << json.dump(2) << '\n';
  if (!out) throw IoError("write failed on " + path);
}

Eigen::VectorXd ToVector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                           static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd Path(const TrainResult& result) {
  Eigen::MatrixXd path(static_cast<Eigen::Index>(result.records.size()),
                       result.final_params.size());
  for (Eigen::Index r = 0; r < path.rows(); ++r) {
    path.row(r) = result.records[r].params_after.transpose();
  }
  return path;
}

// JSON has no NaN; null stands in for it.
Json Number(double x) { return std::isnan(x) ? Json(nullptr) : Json(x); }
double Number(const Json& j) { return j.is_null() ? kNaN : j.get<double>(); }

std::shared_ptr<Dataset> BuildDataset(const TrainingSettings& t,
                                      std::uint64_t seed) {
  auto data = std::make_shared<Dataset>();
  if (t.dataset == "idx") {
    *data = LoadIdx(t.images, t.labels);
  } else {
    Rng rng = Rng(seed).Derive(SeedRole::kData);
    *data = SyntheticClassification(t.examples, t.features, t.classes,
                                    t.separation, rng);
    const Eigen::Index d = data->feature_dim();
    for (Eigen::Index j = 0; d > 1 && j < d; ++j) {
      data->features.col(j) *= std::pow(
          t.min_feature_scale, static_cast<double>(d - 1 - j) / (d - 1));
    }
  }
  if (t.pca_components > 0) {
    data->features = PcaProject(data->features, t.pca_components).projected;
  }
  return data;
}

TrainingReport TrainOnce(const ExperimentConfig& config) {
  const TrainingSettings& t = config.train;
  const std::string dir = PrepareDir(config.out);
  const std::shared_ptr<const Dataset> data = BuildDataset(t, config.seed);
  MlpShape shape;
  shape.inputs = data->feature_dim();
  shape.hidden = t.hidden;
  shape.classes = std::max(data->num_classes, 2);
  const MlpObjective objective(data, shape);
  Rng init_rng = Rng(config.seed).Derive(SeedRole::kInit);
  const ParameterVector init = InitMlpWeights(shape, init_rng);

  const Algorithm algorithm = ParseAlgorithm(t.algorithm);
  TrainConfig tc = t.ToTrainConfig(data->size());
  tc.Validate();
  const bool is_private = IsPrivate(algorithm);
  if (is_private && t.calibrate) {
    tc.sigma_star = CalibrateSigma({t.epsilon, t.delta}, tc.sampling_ratio(),
                                   tc.steps);
  }

  TrainingReport report;
  report.algorithm = AlgorithmName(algorithm);
  report.q = tc.sampling_ratio();
  report.sigma_star = is_private ? tc.sigma_star : 0.0;
  report.final_loss = objective.Loss(init);
  report.final_accuracy = objective.Accuracy(init);
  report.epsilon = kNaN;
  report.delta_star = kNaN;

  RdpCurve curve;
  const bool accounted = is_private && tc.sigma_star > 0;
  if (accounted) curve = SubsampledRdpCurve(report.q, tc.sigma_star, {});

  std::unique_ptr<CsvWriter> series, sigma_snap, prior_snap;
  if (!dir.empty()) {
    series = std::make_unique<CsvWriter>(
        Join(dir, "train.csv"),
        std::vector<std::string>{"step", "loss", "accuracy", "epsilon",
                                 "delta_star", "mode", "sigma_min",
                                 "sigma_mean", "sigma_max"});
    sigma_snap = std::make_unique<CsvWriter>(
        Join(dir, "sigma_snapshots.csv"),
        std::vector<std::string>{"step", "coordinate", "sigma"});
    prior_snap = std::make_unique<CsvWriter>(
        Join(dir, "prior_snapshots.csv"),
        std::vector<std::string>{"step", "coordinate", "sqrt_prior",
                                 "abs_grad"});
  }
  const std::set<std::int64_t> snapshots(t.snapshot_steps.begin(),
                                         t.snapshot_steps.end());
  Eigen::VectorXd prev_prior = Eigen::VectorXd::Zero(objective.dim());

  auto observer = [&](const StepOutcome& out) {
    TrainingRow row;
    row.step = out.record.step;
    row.loss = out.record.loss;
    const bool evaluate =
        row.step % t.eval_every == 0 || row.step == tc.steps;
    row.accuracy = evaluate ? objective.Accuracy(out.params) : kNaN;
    if (accounted) {
      row.epsilon = TotalDpEpsilon(curve, row.step, t.delta).epsilon;
      row.delta_star = SmallestDeltaForEpsilon(t.epsilon, curve, row.step).delta;
    } else if (is_private) {
      row.epsilon = std::numeric_limits<double>::infinity();
      row.delta_star = 1.0;
    } else {
      row.epsilon = kNaN;
      row.delta_star = kNaN;
    }
    row.mode = is_private ? ClipModeName(out.record.mode) : "none";
    row.sigma = out.record.sigma_summary;

    report.rows.push_back(row);
    report.steps_completed = row.step;
    report.final_loss = row.loss;
    report.epsilon = row.epsilon;
    report.delta_star = row.delta_star;
    if (evaluate) {
      report.final_accuracy = row.accuracy;
      if (report.steps_to_threshold < 0 &&
          row.accuracy >= t.accuracy_threshold) {
        report.steps_to_threshold = row.step;
      }
    }

    if (series) {
      series->Row({row.step, row.loss, row.accuracy, row.epsilon,
                   row.delta_star, row.mode, row.sigma.min, row.sigma.mean,
                   row.sigma.max});
      if (snapshots.count(row.step)) {
        for (Eigen::Index i = 0; i < out.plan.sigmas.size(); ++i) {
          sigma_snap->Row({row.step, static_cast<std::int64_t>(i),
                           out.plan.sigmas[i]});
        }
        for (Eigen::Index i = 0; i < prev_prior.size(); ++i) {
          prior_snap->Row({row.step, static_cast<std::int64_t>(i),
                           std::sqrt(prev_prior[i]),
                           std::abs(out.raw_grad[i])});
        }
      }
    }
    prev_prior = out.state.prior_ema;
  };

  try {
    Train(objective, tc, algorithm, init, config.seed, observer);
  } catch (const DivergenceError&) {
    report.status = "diverged";
  }
  if (!dir.empty()) {
    Json summary = ToJson(report);
    summary["config"] = ConfigToJson(config);
    WriteJsonFile(Join(dir, "train.json"), summary);
  }
  return report;
}

}  // namespace

double TrajectoryDistance(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q) {
  if (p.rows() != q.rows() || p.cols() != q.cols()) {
    throw DimensionError("trajectories differ in length or dimension");
  }
  if (p.rows() < 1) throw DimensionError("empty trajectory");
  return (p - q).rowwise().norm().mean();
}

TrajectoryExperimentResult RunTrajectoryExperiment(
    const ExperimentConfig& config) {
  const TrajectorySettings& s = config.trajectory;
  const TestFunction f = MakeTestFunction(s.function);
  TrajectoryExperimentResult result;
  result.function = f.name();
  result.start = s.start.empty() ? f.default_start()
                                 : Eigen::Vector2d(s.start[0], s.start[1]);

  TrainConfig c;
  c.eta = s.eta;
  c.lot_size = 1;
  c.dataset_size = 1;
  c.sigma_star = s.sigma_star;
  c.clip.beta = s.beta;
  c.clip.threshold = s.threshold;
  c.clip.global_bound = s.global_bound;
  c.gamma = s.gamma;
  c.gamma_prime = s.gamma_prime;
  c.steps = s.steps;
  TrainConfig plain = c;
  plain.sigma_star = 0.0;

  const std::uint64_t seed = config.seed;
  const TrainResult adadp = Train(f, c, Algorithm::kAdaDp, result.start, seed);
  const TrainResult rms =
      Train(f, plain, Algorithm::kRmsProp, result.start, seed);
  const TrainResult dpsgd = Train(f, c, Algorithm::kDpSgd, result.start, seed);
  const TrainResult sgd = Train(f, plain, Algorithm::kSgd, result.start, seed);

  result.adadp.p = Path(adadp);
  result.adadp.q = Path(rms);
  result.adadp.distance = TrajectoryDistance(result.adadp.p, result.adadp.q);
  result.dpsgd.p = Path(dpsgd);
  result.dpsgd.q = Path(sgd);
  result.dpsgd.distance = TrajectoryDistance(result.dpsgd.p, result.dpsgd.q);

  const std::string dir = PrepareDir(config.out);
  if (!dir.empty()) {
    CsvWriter csv(Join(dir, "trajectory.csv"),
                  {"step", "adadp_x", "adadp_y", "rmsprop_x", "rmsprop_y",
                   "dpsgd_x", "dpsgd_y", "sgd_x", "sgd_y"});
    for (Eigen::Index r = 0; r < result.adadp.p.rows(); ++r) {
      csv.Row({static_cast<std::int64_t>(r + 1), result.adadp.p(r, 0),
               result.adadp.p(r, 1), result.adadp.q(r, 0),
               result.adadp.q(r, 1), result.dpsgd.p(r, 0),
               result.dpsgd.p(r, 1), result.dpsgd.q(r, 0),
               result.dpsgd.q(r, 1)});
    }
    Json summary;
    summary["function"] = result.function;
    summary["start"] = {result.start[0], result.start[1]};
    summary["seed"] = seed;
    summary["adadp_distance"] = result.adadp.distance;
    summary["dpsgd_distance"] = result.dpsgd.distance;
    summary["config"] = ConfigToJson(config);
    WriteJsonFile(Join(dir, "trajectory.json"), summary);
  }
  return result;
}

Json ToJson(const AccountantReport& report) {
  Json j;
  j["mode"] = report.mode;
  j["q"] = report.q;
  j["sigma_star"] = report.sigma_star;
  j["steps"] = report.steps;
  j["epsilon"] = report.epsilon;
  j["delta"] = report.delta;
  j["alpha"] = report.alpha;
  j["vacuous"] = report.vacuous;
  return j;
}

AccountantReport RunAccountant(const ExperimentConfig& config) {
  const AccountantSettings& a = config.accountant;
  const AlphaRange range{a.min_alpha, a.max_alpha};
  const AccountantOptions options{a.second_order};

  AccountantReport report;
  report.mode =
      config.kind == ExperimentKind::kCalibrate ? "sigma" : a.mode;
  report.q = a.q;
  report.steps = a.steps;
  report.sigma_star = a.sigma_star;
  if (report.mode == "sigma") {
    report.sigma_star =
        CalibrateSigma({a.epsilon, a.delta}, a.q, a.steps, range, options);
  }

  const RdpCurve curve =
      SubsampledRdpCurve(a.q, report.sigma_star, range, options);
  for (const RdpEntry& e : curve.entries) {
    AccountantRow row;
    row.alpha = e.alpha;
    row.rdp_step = e.epsilon;
    row.rdp_total = e.epsilon * static_cast<double>(a.steps);
    row.epsilon = row.rdp_total + std::log(1.0 / a.delta) / (e.alpha - 1);
    row.delta = std::min(
        1.0, std::exp(-(e.alpha - 1) * (a.epsilon - row.rdp_total)));
    report.rows.push_back(row);
  }

  if (report.mode == "delta") {
    const DeltaResult d = SmallestDeltaForEpsilon(a.epsilon, curve, a.steps);
    report.epsilon = a.epsilon;
    report.delta = d.delta;
    report.alpha = d.alpha;
    report.vacuous = d.vacuous;
  } else {
    const EpsilonResult e = TotalDpEpsilon(curve, a.steps, a.delta);
    report.epsilon = e.epsilon;
    report.delta = a.delta;
    report.alpha = e.alpha;
  }

  const std::string dir = PrepareDir(config.out);
  if (!dir.empty()) {
    CsvWriter csv(Join(dir, "accountant.csv"),
                  {"alpha", "rdp_step", "rdp_total", "epsilon", "delta"});
    for (const AccountantRow& r : report.rows) {
      csv.Row({static_cast<std::int64_t>(r.alpha), r.rdp_step, r.rdp_total,
               r.epsilon, r.delta});
    }
    Json summary = ToJson(report);
    summary["config"] = ConfigToJson(config);
    WriteJsonFile(Join(dir, "accountant.json"), summary);
  }
  return report;
}

std::vector<CosineRow> RunCosine(const ExperimentConfig& config) {
  const CosineSettings& c = config.cosine;
  const Eigen::VectorXd f = ToVector(c.f);
  Rng rng = Rng(config.seed).Derive(SeedRole::kNoise);
  std::vector<CosineRow> rows;
  for (const std::vector<double>& sigmas : c.sigmas) {
    const CosineStudyResult r =
        CosineSimilarityStudy(f, ToVector(sigmas), c.trials, rng);
    rows.push_back({sigmas, r.mean, r.standard_error});
  }

  const std::string dir = PrepareDir(config.out);
  if (!dir.empty()) {
    std::vector<std::string> header = {"case"};
    for (std::size_t i = 0; i < c.f.size(); ++i) {
      header.push_back("sigma_" + std::to_string(i + 1));
    }
    header.push_back("mean");
    header.push_back("standard_error");
    CsvWriter csv(Join(dir, "cosine.csv"), header);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      std::vector<CsvCell> cells = {static_cast<std::int64_t>(k)};
      for (double s : rows[k].sigmas) cells.emplace_back(s);
      cells.emplace_back(rows[k].mean);
      cells.emplace_back(rows[k].standard_error);
      csv.Row(cells);
    }
  }
  return rows;
}

OracleReport RunOracle(const ExperimentConfig& config) {
  const OracleSettings& o = config.oracle;
  OracleReport report;
  report.reference = AnalyticDpDelta(o.loss_variance, o.epsilon);

  Rng draw = Rng(config.seed).Derive(SeedRole::kData);
  Rng noise = Rng(config.seed).Derive(SeedRole::kNoise);
  for (int k = 0; k < o.triples; ++k) {
    OracleRow row;
    Eigen::VectorXd s(o.dim), sigma(o.dim);
    for (int i = 0; i < o.dim; ++i) {
      s[i] = draw.Uniform(0.5, 2.0);
      sigma[i] = draw.Uniform(1.0, 4.0);
    }
    // Above eps ~ 0.75 the per-trial variance of the estimator can exceed 1,
    // and 1e6 trials no longer keep the standard error under 1e-3.
    row.epsilon = draw.Uniform(0.1, 0.6);
    row.h = (s.array() / sigma.array()).square().sum();
    row.sensitivities.assign(s.data(), s.data() + s.size());
    row.sigmas.assign(sigma.data(), sigma.data() + sigma.size());
    row.analytic = AnalyticDpDelta(row.h, row.epsilon);
    const MonteCarloEstimate mc =
        MonteCarloDpCheck(s, sigma, row.epsilon, o.trials, noise);
    row.estimate = mc.estimate;
    row.standard_error = mc.standard_error;
    report.rows.push_back(row);
  }

  const std::string dir = PrepareDir(config.out);
  if (!dir.empty()) {
    CsvWriter csv(Join(dir, "oracle.csv"),
                  {"triple", "h", "epsilon", "analytic", "estimate",
                   "standard_error", "z"});
    csv.Row({std::int64_t{-1}, o.loss_variance, o.epsilon, report.reference,
             kNaN, kNaN, kNaN});
    for (std::size_t k = 0; k < report.rows.size(); ++k) {
      const OracleRow& r = report.rows[k];
      csv.Row({static_cast<std::int64_t>(k), r.h, r.epsilon, r.analytic,
               r.estimate, r.standard_error,
               (r.estimate - r.analytic) / r.standard_error});
    }
  }
  return report;
}

Json ToJson(const TrainingReport& report) {
  Json j;
  j["algorithm"] = report.algorithm;
  j["status"] = report.status;
  j["q"] = report.q;
  j["sigma_star"] = report.sigma_star;
  j["steps_completed"] = report.steps_completed;
  j["final_loss"] = Number(report.final_loss);
  j["final_accuracy"] = Number(report.final_accuracy);
  j["epsilon"] = Number(report.epsilon);
  j["delta_star"] = Number(report.delta_star);
  j["steps_to_threshold"] = report.steps_to_threshold;
  return j;
}

TrainingReport TrainingReportFromJson(const Json& json) {
  TrainingReport r;
  try {
    r.algorithm = json.at("algorithm").get<std::string>();
    r.status = json.at("status").get<std::string>();
    r.q = json.at("q").get<double>();
    r.sigma_star = json.at("sigma_star").get<double>();
    r.steps_completed = json.at("steps_completed").get<std::int64_t>();
    r.final_loss = Number(json.at("final_loss"));
    r.final_accuracy = Number(json.at("final_accuracy"));
    r.epsilon = Number(json.at("epsilon"));
    r.delta_star = Number(json.at("delta_star"));
    r.steps_to_threshold = json.at("steps_to_threshold").get<std::int64_t>();
  } catch (const Json::exception& e) {
    throw FormatError(std::string("training summary: ") + e.what());
  }
  return r;
}

TrainingReport RunTraining(const ExperimentConfig& config) {
  TrainingReport report = TrainOnce(config);
  if (report.status == "diverged") {
    throw DivergenceError("training diverged after step " +
                          std::to_string(report.steps_completed));
  }
  return report;
}

std::vector<SweepRow> RunSweep(const ExperimentConfig& config) {
  const SweepSettings& s = config.sweep;
  const std::string dir = PrepareDir(config.out);
  std::vector<SweepRow> rows;
  for (std::size_t k = 0; k < s.values.size(); ++k) {
    ExperimentConfig point = config;
    point.kind = ExperimentKind::kTrain;
    const double v = s.values[k];
    if (s.parameter == "eta") {
      point.train.eta = v;
    } else if (s.parameter == "beta") {
      point.train.beta = v;
    } else if (s.parameter == "sigma_star") {
      point.train.sigma_star = v;
      point.train.calibrate = false;
    } else {
      point.train.lot_size = static_cast<std::int64_t>(v);
    }
    point.out = dir.empty() ? "" : Join(dir, "point_" + std::to_string(k));
    SweepRow row;
    row.value = v;
    try {
      row.report = TrainOnce(point);
      row.status = row.report.status;
    } catch (const NumericalError&) {
      row.status = "failed";
      row.report.status = "failed";
    }
    rows.push_back(std::move(row));
  }

  if (!dir.empty()) {
    CsvWriter csv(Join(dir, "sweep.csv"),
                  {s.parameter, "status", "steps", "final_loss",
                   "final_accuracy", "delta_star", "steps_to_threshold"});
    for (const SweepRow& r : rows) {
      csv.Row({r.value, r.status, r.report.steps_completed,
               r.report.final_loss, r.report.final_accuracy,
               r.report.delta_star, r.report.steps_to_threshold});
    }
  }
  return rows;
}

}  // namespace adadp
