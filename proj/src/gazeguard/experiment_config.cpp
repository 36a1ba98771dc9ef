// Copyright 2026 The GazeGuard Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gazeguard/experiment_config.hpp"

#include "gazeguard/error.hpp"
#include "gazeguard/rng.hpp"

namespace gazeguard {
namespace {

template <typename T>
void Take(const Json& doc, const char* key, T& field) {
  if (doc.contains(key)) field = doc.at(key).get<T>();
}

template <typename T>
void TakeOptional(const Json& doc, const char* key, std::optional<T>& field) {
  if (!doc.contains(key)) return;
  if (doc.at(key).is_null()) {
    field.reset();
  } else {
    field = doc.at(key).get<T>();
  }
}

void TakeLevels(const Json& doc, const char* key, std::set<int>& field) {
  if (!doc.contains(key)) return;
  const auto v = doc.at(key).get<std::vector<int>>();
  field = std::set<int>(v.begin(), v.end());
}

template <typename T>
Json OptionalJson(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

ForestParams ParseForest(const Json& doc) {
  RejectUnknownKeys(doc, {"n_estimators", "max_depth", "min_samples_split", "max_features"},
                    "scenario.forest");
  ForestParams p;
  Take(doc, "n_estimators", p.n_estimators);
  TakeOptional(doc, "max_depth", p.max_depth);
  Take(doc, "min_samples_split", p.min_samples_split);
  TakeOptional(doc, "max_features", p.max_features);
  return p;
}

TreeParams ParseTree(const Json& doc) {
  RejectUnknownKeys(doc, {"max_depth", "min_samples_split"}, "scenario.tree");
  TreeParams p;
  TakeOptional(doc, "max_depth", p.max_depth);
  Take(doc, "min_samples_split", p.min_samples_split);
  return p;
}

ScenarioParams ParseScenario(const Json& doc) {
  RejectUnknownKeys(doc,
                    {"train_levels", "test_levels", "train_frac", "cv_folds", "models", "forest",
                     "tree"},
                    "scenario");
  ScenarioParams p;
  TakeLevels(doc, "train_levels", p.train_levels);
  TakeLevels(doc, "test_levels", p.test_levels);
  Take(doc, "train_frac", p.train_frac);
  Take(doc, "cv_folds", p.cv_folds);
  Take(doc, "models", p.models);
  if (doc.contains("forest")) p.forest = ParseForest(doc.at("forest"));
  if (doc.contains("tree")) p.tree = ParseTree(doc.at("tree"));
  return p;
}

Scenario4Params ParseScenario4(const Json& doc) {
  RejectUnknownKeys(doc,
                    {"k_min", "k_max", "n_init", "novelty_percentile", "tau",
                     "confidence_threshold", "iforest_trees", "iforest_subsample",
                     "iforest_threshold"},
                    "scenario4");
  Scenario4Params p;
  Take(doc, "k_min", p.k_min);
  Take(doc, "k_max", p.k_max);
  Take(doc, "n_init", p.n_init);
  Take(doc, "novelty_percentile", p.novelty_percentile);
  TakeOptional(doc, "tau", p.tau);
  Take(doc, "confidence_threshold", p.confidence_threshold);
  Take(doc, "iforest_trees", p.iforest_trees);
  Take(doc, "iforest_subsample", p.iforest_subsample);
  Take(doc, "iforest_threshold", p.iforest_threshold);
  return p;
}

Phase2Params ParsePhase2(const Json& doc) {
  RejectUnknownKeys(doc,
                    {"n_clients", "rounds", "folds", "epochs", "batch_size", "learning_rate",
                     "early_stopping_patience", "lr_patience", "train_levels", "test_levels",
                     "fedavg"},
                    "phase2");
  Phase2Params p;
  Take(doc, "n_clients", p.n_clients);
  Take(doc, "rounds", p.rounds);
  Take(doc, "folds", p.folds);
  Take(doc, "epochs", p.epochs);
  Take(doc, "batch_size", p.batch_size);
  Take(doc, "learning_rate", p.learning_rate);
  Take(doc, "early_stopping_patience", p.early_stopping_patience);
  Take(doc, "lr_patience", p.lr_patience);
  TakeLevels(doc, "train_levels", p.train_levels);
  TakeLevels(doc, "test_levels", p.test_levels);
  if (doc.contains("fedavg")) p.fedavg = ParseFedAvgMode(doc.at("fedavg").get<std::string>());
  return p;
}

VaultParams ParseVault(const Json& doc) {
  RejectUnknownKeys(doc, {"path", "kdf_iterations"}, "vault");
  VaultParams p;
  if (doc.contains("path")) p.path = doc.at("path").get<std::string>();
  Take(doc, "kdf_iterations", p.kdf_iterations);
  return p;
}

void RequireRange(bool ok, const std::string& what) {
  Require(ok, ErrorCode::kInvalidArgument, "config: " + what);
}

}  // namespace

ExperimentConfig ExperimentConfig::FromJson(const Json& doc) {
  try {
    RejectUnknownKeys(doc,
                      {"seed", "output_dir", "data", "columns", "synthetic", "scenario",
                       "scenario4", "phase2", "vault"},
                      "config");
    ExperimentConfig c;
    Take(doc, "seed", c.seed);
    if (doc.contains("output_dir")) c.output_dir = doc.at("output_dir").get<std::string>();
    if (doc.contains("data") && !doc.at("data").is_null()) {
      c.data_path = doc.at("data").get<std::string>();
    }
    if (doc.contains("columns")) c.columns = ColumnMap::FromJson(doc.at("columns"));
    if (doc.contains("synthetic")) {
      c.synthetic = SyntheticConfig::FromJson(doc.at("synthetic"));
      c.synthetic_seed_set = doc.at("synthetic").contains("seed");
    }
    if (doc.contains("scenario")) c.scenario = ParseScenario(doc.at("scenario"));
    if (doc.contains("scenario4")) c.scenario4 = ParseScenario4(doc.at("scenario4"));
    if (doc.contains("phase2")) c.phase2 = ParsePhase2(doc.at("phase2"));
    if (doc.contains("vault")) c.vault = ParseVault(doc.at("vault"));
    c.Validate();
    return c;
  } catch (const Json::exception& e) {
    Fail(ErrorCode::kInvalidArgument, std::string("config: ") + e.what());
  }
}

ExperimentConfig ExperimentConfig::Load(const std::filesystem::path& path) {
  std::string text;
  try {
    text = ReadFile(path);
  } catch (const Error& e) {
    Fail(ErrorCode::kInvalidArgument, std::string("config: ") + e.what());
  }
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::exception& e) {
    Fail(ErrorCode::kInvalidArgument, "config: " + path.string() + " is not valid JSON");
  }
  return FromJson(doc);
}

void ExperimentConfig::Validate() const {
  const auto& s = scenario;
  RequireRange(s.train_frac > 0.0 && s.train_frac < 1.0, "scenario.train_frac must lie in (0, 1)");
  RequireRange(s.cv_folds >= 2, "scenario.cv_folds must be >= 2");
  RequireRange(!s.models.empty(), "scenario.models is empty");
  for (const auto& m : s.models) {
    RequireRange(m == "random_forest" || m == "decision_tree",
                 "scenario.models: unknown model '" + m + "'");
  }
  RequireRange(!s.train_levels.empty() && !s.test_levels.empty(),
               "scenario levels must be non-empty");
  RequireRange(s.forest.n_estimators >= 1, "scenario.forest.n_estimators must be >= 1");
  const auto& q = scenario4;
  RequireRange(q.k_min >= 2 && q.k_min <= q.k_max, "scenario4 needs 2 <= k_min <= k_max");
  RequireRange(q.n_init >= 1, "scenario4.n_init must be >= 1");
  RequireRange(q.novelty_percentile >= 0.0 && q.novelty_percentile <= 100.0,
               "scenario4.novelty_percentile must lie in [0, 100]");
  RequireRange(!q.tau || *q.tau >= 0.0, "scenario4.tau must be >= 0");
  RequireRange(q.confidence_threshold > 0.0 && q.confidence_threshold < 1.0,
               "scenario4.confidence_threshold must lie in (0, 1)");
  RequireRange(q.iforest_trees >= 1 && q.iforest_subsample >= 2,
               "scenario4 isolation forest needs >= 1 tree and subsample >= 2");
  const auto& p = phase2;
  RequireRange(p.n_clients >= 2, "phase2.n_clients must be >= 2");
  RequireRange(p.rounds >= 1 && p.folds >= 2 && p.epochs >= 1 && p.batch_size >= 1,
               "phase2 needs rounds >= 1, folds >= 2, epochs >= 1, batch_size >= 1");
  RequireRange(p.learning_rate > 0.0, "phase2.learning_rate must be > 0");
  RequireRange(!p.train_levels.empty() && !p.test_levels.empty(),
               "phase2 levels must be non-empty");
  RequireRange(vault.kdf_iterations >= 1, "vault.kdf_iterations must be >= 1");
}

std::uint64_t ExperimentConfig::DataSeed() const {
  return synthetic_seed_set ? synthetic.seed : DeriveSeed(seed, "data");
}

std::filesystem::path ExperimentConfig::VaultPath() const {
  return vault.path.empty() ? output_dir / "vault.json" : vault.path;
}

Json ExperimentConfig::ToJson() const {
  SyntheticConfig syn = synthetic;
  syn.seed = DataSeed();
  const auto& s = scenario;
  const auto& q = scenario4;
  const auto& p = phase2;
  Json doc{{"seed", seed}};
  if (data_path.empty()) {
    doc["data"] = nullptr;
    doc["synthetic"] = syn.ToJson();
  } else {
    doc["data"] = data_path.string();
    doc["columns"] = columns.ToJson();
  }
  doc["scenario"] = {{"train_levels", s.train_levels},
                     {"test_levels", s.test_levels},
                     {"train_frac", s.train_frac},
                     {"cv_folds", s.cv_folds},
                     {"models", s.models},
                     {"forest", {{"n_estimators", s.forest.n_estimators},
                                 {"max_depth", OptionalJson(s.forest.max_depth)},
                                 {"min_samples_split", s.forest.min_samples_split},
                                 {"max_features", OptionalJson(s.forest.max_features)}}},
                     {"tree", {{"max_depth", OptionalJson(s.tree.max_depth)},
                               {"min_samples_split", s.tree.min_samples_split}}}};
  doc["scenario4"] = {{"k_min", q.k_min},
                      {"k_max", q.k_max},
                      {"n_init", q.n_init},
                      {"novelty_percentile", q.novelty_percentile},
                      {"tau", OptionalJson(q.tau)},
                      {"confidence_threshold", q.confidence_threshold},
                      {"iforest_trees", q.iforest_trees},
                      {"iforest_subsample", q.iforest_subsample},
                      {"iforest_threshold", q.iforest_threshold}};
  doc["phase2"] = {{"n_clients", p.n_clients},
                   {"rounds", p.rounds},
                   {"folds", p.folds},
                   {"epochs", p.epochs},
                   {"batch_size", p.batch_size},
                   {"learning_rate", p.learning_rate},
                   {"early_stopping_patience", p.early_stopping_patience},
                   {"lr_patience", p.lr_patience},
                   {"train_levels", p.train_levels},
                   {"test_levels", p.test_levels},
                   {"fedavg", FedAvgModeName(p.fedavg)}};
  doc["vault"] = {{"kdf_iterations", vault.kdf_iterations}};
  return doc;
}

}  // namespace gazeguard
