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

#include "adadp/config.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <type_traits>
#include <utility>

#include "adadp/errors.h"

namespace adadp {

void to_json(Json& j, SecondOrderTerm v) {
  j = v == SecondOrderTerm::kStandard ? "standard" : "alternative";
}
void from_json(const Json& j, SecondOrderTerm& v) {
  const std::string s = j.get<std::string>();
  if (s == "standard") {
    v = SecondOrderTerm::kStandard;
  } else if (s == "alternative") {
    v = SecondOrderTerm::kAlternative;
  } else {
    throw ConfigError("expected \"standard\" or \"alternative\", got " + s);
  }
}

void to_json(Json& j, PriorSource v) {
  j = v == PriorSource::kRawGradient ? "raw" : "noisy";
}
void from_json(const Json& j, PriorSource& v) {
  const std::string s = j.get<std::string>();
  if (s == "raw") {
    v = PriorSource::kRawGradient;
  } else if (s == "noisy") {
    v = PriorSource::kNoisyGradient;
  } else {
    throw ConfigError("expected \"raw\" or \"noisy\", got " + s);
  }
}

void to_json(Json& j, ModeStatistic v) {
  j = v == ModeStatistic::kSqrtPrior ? "sqrt_prior" : "prior";
}
void from_json(const Json& j, ModeStatistic& v) {
  const std::string s = j.get<std::string>();
  if (s == "sqrt_prior") {
    v = ModeStatistic::kSqrtPrior;
  } else if (s == "prior") {
    v = ModeStatistic::kPrior;
  } else {
    throw ConfigError("expected \"sqrt_prior\" or \"prior\", got " + s);
  }
}

namespace {

template <typename T>
class Schema {
 public:
  struct Field {
    std::string name;
    std::function<void(T&, const Json&)> read;
    std::function<Json(const T&)> write;
  };

  // `get` maps a T (const or not) to a reference to the field.
  template <typename Getter>
  Schema& Add(std::string name, Getter get) {
    fields_.push_back(
        {std::move(name),
         [get](T& t, const Json& j) {
           auto& ref = get(t);
           ref = j.get<std::remove_reference_t<decltype(ref)>>();
         },
         [get](const T& t) { return Json(get(t)); }});
    return *this;
  }

  const std::vector<Field>& fields() const { return fields_; }

  const Field* Find(const std::string& name) const {
    for (const Field& f : fields_) {
      if (f.name == name) return &f;
    }
    return nullptr;
  }

  void Read(T& t, const Json& j, const std::string& section) const {
    if (!j.is_object()) throw ConfigError(section + " must be an object");
    for (const auto& [key, value] : j.items()) {
      const Field* f = Find(key);
      if (f == nullptr) {
        throw ConfigError("unknown key '" + section + "." + key + "'");
      }
      ReadField(*f, t, value, section);
    }
  }

  static void ReadField(const Field& f, T& t, const Json& value,
                        const std::string& section) {
    try {
      f.read(t, value);
    } catch (const Json::exception& e) {
      throw ConfigError(section + "." + f.name + ": " + e.what());
    } catch (const ConfigError& e) {
      throw ConfigError(section + "." + f.name + ": " + e.what());
    }
  }

  Json Write(const T& t) const {
    Json j = Json::object();
    for (const Field& f : fields_) j[f.name] = f.write(t);
    return j;
  }

 private:
  std::vector<Field> fields_;
};

#define ADADP_FIELD(name) Add(#name, [](auto& s) -> auto& { return s.name; })

const Schema<AccountantSettings>& AccountantSchema() {
  static const Schema<AccountantSettings> s =
      Schema<AccountantSettings>()
          .ADADP_FIELD(mode)
          .ADADP_FIELD(epsilon)
          .ADADP_FIELD(delta)
          .ADADP_FIELD(q)
          .ADADP_FIELD(sigma_star)
          .ADADP_FIELD(steps)
          .ADADP_FIELD(min_alpha)
          .ADADP_FIELD(max_alpha)
          .ADADP_FIELD(second_order);
  return s;
}

const Schema<CosineSettings>& CosineSchema() {
  static const Schema<CosineSettings> s = Schema<CosineSettings>()
                                              .ADADP_FIELD(f)
                                              .ADADP_FIELD(sigmas)
                                              .ADADP_FIELD(trials);
  return s;
}

const Schema<OracleSettings>& OracleSchema() {
  static const Schema<OracleSettings> s = Schema<OracleSettings>()
                                              .ADADP_FIELD(loss_variance)
                                              .ADADP_FIELD(epsilon)
                                              .ADADP_FIELD(triples)
                                              .ADADP_FIELD(dim)
                                              .ADADP_FIELD(trials);
  return s;
}

const Schema<TrajectorySettings>& TrajectorySchema() {
  static const Schema<TrajectorySettings> s = Schema<TrajectorySettings>()
                                                  .ADADP_FIELD(function)
                                                  .ADADP_FIELD(start)
                                                  .ADADP_FIELD(steps)
                                                  .ADADP_FIELD(eta)
                                                  .ADADP_FIELD(sigma_star)
                                                  .ADADP_FIELD(beta)
                                                  .ADADP_FIELD(threshold)
                                                  .ADADP_FIELD(global_bound)
                                                  .ADADP_FIELD(gamma)
                                                  .ADADP_FIELD(gamma_prime);
  return s;
}

const Schema<TrainingSettings>& TrainingSchema() {
  static const Schema<TrainingSettings> s =
      Schema<TrainingSettings>()
          .ADADP_FIELD(dataset)
          .ADADP_FIELD(images)
          .ADADP_FIELD(labels)
          .ADADP_FIELD(examples)
          .ADADP_FIELD(features)
          .ADADP_FIELD(classes)
          .ADADP_FIELD(separation)
          .ADADP_FIELD(min_feature_scale)
          .ADADP_FIELD(pca_components)
          .ADADP_FIELD(hidden)
          .ADADP_FIELD(algorithm)
          .ADADP_FIELD(eta)
          .ADADP_FIELD(lot_size)
          .ADADP_FIELD(sigma_star)
          .ADADP_FIELD(beta)
          .ADADP_FIELD(threshold)
          .ADADP_FIELD(global_bound)
          .ADADP_FIELD(gamma)
          .ADADP_FIELD(gamma_prime)
          .ADADP_FIELD(eps0)
          .ADADP_FIELD(steps)
          .ADADP_FIELD(prior_source)
          .ADADP_FIELD(mode_statistic)
          .ADADP_FIELD(noise_per_example)
          .ADADP_FIELD(epsilon)
          .ADADP_FIELD(delta)
          .ADADP_FIELD(calibrate)
          .ADADP_FIELD(eval_every)
          .ADADP_FIELD(accuracy_threshold)
          .ADADP_FIELD(snapshot_steps);
  return s;
}

const Schema<SweepSettings>& SweepSchema() {
  static const Schema<SweepSettings> s =
      Schema<SweepSettings>().ADADP_FIELD(parameter).ADADP_FIELD(values);
  return s;
}

#undef ADADP_FIELD

// Calls fn(schema, settings) for the named section.
template <typename Config, typename Fn>
void WithSection(Config& config, const std::string& section, Fn&& fn) {
  if (section == "accountant") {
    fn(AccountantSchema(), config.accountant);
  } else if (section == "cosine") {
    fn(CosineSchema(), config.cosine);
  } else if (section == "oracle") {
    fn(OracleSchema(), config.oracle);
  } else if (section == "trajectory") {
    fn(TrajectorySchema(), config.trajectory);
  } else if (section == "train") {
    fn(TrainingSchema(), config.train);
  } else if (section == "sweep") {
    fn(SweepSchema(), config.sweep);
  } else {
    throw ConfigError("unknown section '" + section + "'");
  }
}

const std::vector<std::string>& AllSections() {
  static const std::vector<std::string> s = {
      "accountant", "cosine", "oracle", "trajectory", "train", "sweep"};
  return s;
}

void Require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field + ": " + what);
}

bool Positive(double x) { return x > 0 && std::isfinite(x); }

void ValidateAccountant(const AccountantSettings& a) {
  Require(a.mode == "epsilon" || a.mode == "delta" || a.mode == "sigma",
          "accountant.mode", "must be epsilon, delta or sigma");
  Require(Positive(a.epsilon), "accountant.epsilon", "must be positive");
  Require(a.delta > 0 && a.delta < 1, "accountant.delta",
          "must lie in (0, 1)");
  Require(a.q >= 0 && a.q <= 1, "accountant.q", "must lie in [0, 1]");
  Require(Positive(a.sigma_star), "accountant.sigma_star",
          "must be positive");
  Require(a.steps >= 1, "accountant.steps", "must be >= 1");
  Require(a.min_alpha >= 2, "accountant.min_alpha", "must be >= 2");
  Require(a.max_alpha >= a.min_alpha, "accountant.max_alpha",
          "must be >= min_alpha");
}

void ValidateCosine(const CosineSettings& c) {
  Require(!c.f.empty(), "cosine.f", "must be non-empty");
  Require(!c.sigmas.empty(), "cosine.sigmas", "must be non-empty");
  for (const auto& s : c.sigmas) {
    Require(s.size() == c.f.size(), "cosine.sigmas",
            "each entry must match the length of f");
    for (double v : s) Require(v >= 0, "cosine.sigmas", "must be >= 0");
  }
  Require(c.trials >= 1, "cosine.trials", "must be >= 1");
}

void ValidateOracle(const OracleSettings& o) {
  Require(o.loss_variance >= 0, "oracle.loss_variance", "must be >= 0");
  Require(o.epsilon >= 0, "oracle.epsilon", "must be >= 0");
  Require(o.triples >= 0, "oracle.triples", "must be >= 0");
  Require(o.dim >= 1, "oracle.dim", "must be >= 1");
  Require(o.trials >= kMinMonteCarloTrials, "oracle.trials",
          "must be >= " + std::to_string(kMinMonteCarloTrials));
}

void ValidateTrajectory(const TrajectorySettings& t) {
  Require(t.start.empty() || t.start.size() == 2, "trajectory.start",
          "must have two coordinates");
  Require(t.steps >= 1, "trajectory.steps", "must be >= 1");
  Require(Positive(t.eta), "trajectory.eta", "must be positive");
  Require(t.sigma_star >= 0, "trajectory.sigma_star", "must be >= 0");
  Require(Positive(t.beta), "trajectory.beta", "must be positive");
  Require(t.threshold >= 0, "trajectory.threshold", "must be >= 0");
  Require(Positive(t.global_bound), "trajectory.global_bound",
          "must be positive");
  Require(t.gamma > 0 && t.gamma <= 1, "trajectory.gamma",
          "must lie in (0, 1]");
  Require(t.gamma_prime >= 0 && t.gamma_prime < 1, "trajectory.gamma_prime",
          "must lie in [0, 1)");
}

void ValidateTraining(const TrainingSettings& t) {
  Require(t.dataset == "synthetic" || t.dataset == "idx", "train.dataset",
          "must be synthetic or idx");
  if (t.dataset == "idx") {
    Require(!t.images.empty(), "train.images", "required for idx data");
    Require(!t.labels.empty(), "train.labels", "required for idx data");
  } else {
    Require(t.examples >= 1, "train.examples", "must be >= 1");
    Require(t.features >= 1, "train.features", "must be >= 1");
    Require(t.classes >= 2, "train.classes", "must be >= 2");
    Require(t.separation >= 0, "train.separation", "must be >= 0");
    Require(Positive(t.min_feature_scale), "train.min_feature_scale",
            "must be positive");
    Require(t.lot_size <= t.examples, "train.lot_size",
            "must not exceed examples");
  }
  Require(t.pca_components >= 0, "train.pca_components", "must be >= 0");
  Require(t.hidden >= 1, "train.hidden", "must be >= 1");
  try {
    ParseAlgorithm(t.algorithm);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("train.algorithm: ") + e.what());
  }
  try {
    t.ToTrainConfig(std::max<std::int64_t>(t.lot_size, 1)).Validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("train.") + e.what());
  }
  Require(Positive(t.epsilon), "train.epsilon", "must be positive");
  Require(t.delta > 0 && t.delta < 1, "train.delta", "must lie in (0, 1)");
  Require(t.eval_every >= 1, "train.eval_every", "must be >= 1");
  for (std::int64_t s : t.snapshot_steps) {
    Require(s >= 1 && s <= t.steps, "train.snapshot_steps",
            "entries must lie in [1, steps]");
  }
}

void ValidateSweep(const SweepSettings& s) {
  Require(s.parameter == "eta" || s.parameter == "beta" ||
              s.parameter == "sigma_star" || s.parameter == "lot_size",
          "sweep.parameter", "must be eta, beta, sigma_star or lot_size");
  Require(!s.values.empty(), "sweep.values", "must be non-empty");
  if (s.parameter == "lot_size") {
    for (double v : s.values) {
      Require(v >= 1 && v == std::floor(v), "sweep.values",
              "lot sizes must be positive integers");
    }
  }
}

}  // namespace

const char* KindName(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kAccountant:
      return "accountant";
    case ExperimentKind::kCalibrate:
      return "calibrate";
    case ExperimentKind::kCosine:
      return "cosine";
    case ExperimentKind::kOracle:
      return "oracle";
    case ExperimentKind::kTrajectory:
      return "trajectory";
    case ExperimentKind::kTrain:
      return "train";
    case ExperimentKind::kSweep:
      return "sweep";
  }
  return "unknown";
}

ExperimentKind ParseKind(const std::string& name) {
  for (ExperimentKind k :
       {ExperimentKind::kAccountant, ExperimentKind::kCalibrate,
        ExperimentKind::kCosine, ExperimentKind::kOracle,
        ExperimentKind::kTrajectory, ExperimentKind::kTrain,
        ExperimentKind::kSweep}) {
    if (name == KindName(k)) return k;
  }
  throw ConfigError("unknown experiment kind '" + name + "'");
}

TrainConfig TrainingSettings::ToTrainConfig(std::int64_t dataset_size) const {
  TrainConfig c;
  c.eta = eta;
  c.lot_size = lot_size;
  c.dataset_size = dataset_size;
  c.sigma_star = sigma_star;
  c.clip.beta = beta;
  c.clip.threshold = threshold;
  c.clip.global_bound = global_bound;
  c.gamma = gamma;
  c.gamma_prime = gamma_prime;
  c.eps0 = eps0;
  c.steps = steps;
  c.prior_source = prior_source;
  c.mode_statistic = mode_statistic;
  c.noise_per_example = noise_per_example;
  return c;
}

std::vector<std::string> SectionsFor(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kAccountant:
    case ExperimentKind::kCalibrate:
      return {"accountant"};
    case ExperimentKind::kCosine:
      return {"cosine"};
    case ExperimentKind::kOracle:
      return {"oracle"};
    case ExperimentKind::kTrajectory:
      return {"trajectory"};
    case ExperimentKind::kTrain:
      return {"train"};
    case ExperimentKind::kSweep:
      return {"train", "sweep"};
  }
  return {};
}

std::vector<std::string> SectionFields(const std::string& section) {
  std::vector<std::string> names;
  ExperimentConfig scratch;
  WithSection(scratch, section, [&](const auto& schema, auto&) {
    for (const auto& f : schema.fields()) names.push_back(f.name);
  });
  return names;
}

ExperimentConfig ConfigFromJson(const Json& json, ExperimentKind kind) {
  if (!json.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig config;
  config.kind = kind;
  for (const auto& [key, value] : json.items()) {
    try {
      if (key == "kind") {
        if (ParseKind(value.get<std::string>()) != kind) {
          throw ConfigError("kind '" + value.get<std::string>() +
                            "' does not match subcommand '" +
                            KindName(kind) + "'");
        }
      } else if (key == "seed") {
        config.seed = value.get<std::uint64_t>();
      } else if (key == "out") {
        config.out = value.get<std::string>();
      } else {
        bool known = false;
        for (const std::string& s : AllSections()) known |= s == key;
        if (!known) throw ConfigError("unknown key '" + key + "'");
        WithSection(config, key, [&](const auto& schema, auto& settings) {
          schema.Read(settings, value, key);
        });
      }
    } catch (const Json::exception& e) {
      throw ConfigError(key + ": " + e.what());
    }
  }
  return config;
}

ExperimentConfig LoadConfig(const std::string& path, ExperimentKind kind) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  Json json;
  try {
    in >> json;
  } catch (const Json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return ConfigFromJson(json, kind);
}

Json ConfigToJson(const ExperimentConfig& config) {
  Json j;
  j["kind"] = KindName(config.kind);
  j["seed"] = config.seed;
  j["out"] = config.out;
  for (const std::string& s : AllSections()) {
    WithSection(config, s, [&](const auto& schema, const auto& settings) {
      j[s] = schema.Write(settings);
    });
  }
  return j;
}

void ApplyOverride(ExperimentConfig& config, const std::string& section,
                   const std::string& field, const std::string& text) {
  WithSection(config, section, [&](const auto& schema, auto& settings) {
    const auto* f = schema.Find(field);
    if (f == nullptr) {
      throw ConfigError("unknown key '" + section + "." + field + "'");
    }
    Json value = Json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (value.is_discarded()) value = text;
    if (value.is_string()) {
      schema.ReadField(*f, settings, value, section);
      return;
    }
    try {
      schema.ReadField(*f, settings, value, section);
    } catch (const ConfigError&) {
      // A string field given numeric-looking text, e.g. --images 123.
      schema.ReadField(*f, settings, Json(text), section);
    }
  });
}

void ValidateConfig(const ExperimentConfig& config) {
  for (const std::string& s : SectionsFor(config.kind)) {
    if (s == "accountant") ValidateAccountant(config.accountant);
    if (s == "cosine") ValidateCosine(config.cosine);
    if (s == "oracle") ValidateOracle(config.oracle);
    if (s == "trajectory") ValidateTrajectory(config.trajectory);
    if (s == "train") ValidateTraining(config.train);
    if (s == "sweep") ValidateSweep(config.sweep);
  }
}

}  // namespace adadp
