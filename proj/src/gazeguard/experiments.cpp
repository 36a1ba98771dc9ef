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

#include "gazeguard/experiments.hpp"

#include <algorithm>
#include <map>

#include "gazeguard/cluster.hpp"
#include "gazeguard/error.hpp"
#include "gazeguard/federated.hpp"
#include "gazeguard/id_assignment.hpp"
#include "gazeguard/isolation_forest.hpp"
#include "gazeguard/metrics.hpp"
#include "gazeguard/pca.hpp"
#include "gazeguard/preprocess.hpp"
#include "gazeguard/privacy_audit.hpp"
#include "gazeguard/rng.hpp"
#include "gazeguard/trees.hpp"
#include "gazeguard/vault.hpp"

namespace gazeguard {
namespace {

namespace fs = std::filesystem;

constexpr std::string_view kCommands[] = {"synth",     "scenario1", "scenario2", "scenario3",
                                          "scenario4", "phase2",    "report"};

class OutputDir {
 public:
  OutputDir(const ExperimentConfig& config, std::string_view command)
      : root_(config.output_dir / std::string(command)) {
    fs::create_directories(root_);
  }

  const fs::path& root() const { return root_; }

  void Text(const std::string& name, std::string_view content) {
    const fs::path p = root_ / name;
    fs::create_directories(p.parent_path());
    WriteFileAtomic(p, content);
    files_.push_back(name);
  }
  void Write(const std::string& name, const Json& doc) { Text(name, doc.dump(2) + "\n"); }

  Json Summary(std::string_view command, Json metrics) const {
    return Json{{"command", command},
                {"output_dir", root_.string()},
                {"files", files_},
                {"metrics", std::move(metrics)}};
  }

 private:
  fs::path root_;
  std::vector<std::string> files_;
};

std::string ImportanceCsv(std::span<const double> importance) {
  std::string out = "feature,importance\n";
  for (std::size_t f = 0; f < importance.size(); ++f) {
    out += std::string(kFeatureNames[f]) + "," + FormatDouble(importance[f]) + "\n";
  }
  return out;
}

double AccuracyOf(std::span<const int> y, std::span<const int> pred) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < y.size(); ++i) ok += y[i] == pred[i] ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(y.size());
}

struct Classifier {
  std::string name;
  std::vector<int> (*fit_predict)(const Matrix&, std::span<const int>, int, const Matrix&,
                                  const ExperimentConfig&, std::vector<double>*);
};

std::vector<int> ForestFitPredict(const Matrix& x, std::span<const int> y, int n_classes,
                                  const Matrix& test, const ExperimentConfig& cfg,
                                  std::vector<double>* importance) {
  const auto& p = cfg.scenario.forest;
  ForestConfig fc;
  fc.n_estimators = p.n_estimators;
  fc.max_depth = p.max_depth;
  fc.min_samples_split = p.min_samples_split;
  fc.max_features = p.max_features;
  fc.seed = DeriveSeed(cfg.seed, "model.forest");
  const auto model = RandomForest::Fit(x, y, n_classes, fc);
  if (importance) *importance = model.FeatureImportance();
  return model.Predict(test);
}

std::vector<int> TreeFitPredict(const Matrix& x, std::span<const int> y, int n_classes,
                                const Matrix& test, const ExperimentConfig& cfg,
                                std::vector<double>* importance) {
  TreeConfig tc;
  tc.max_depth = cfg.scenario.tree.max_depth;
  tc.min_samples_split = cfg.scenario.tree.min_samples_split;
  tc.seed = DeriveSeed(cfg.seed, "model.tree");
  const auto model = DecisionTree::Fit(x, y, n_classes, tc);
  if (importance) *importance = model.FeatureImportance();
  return model.Predict(test);
}

// Shared body of scenarios 1-3: scale on train, cross-validate on train, fit
// on all of train, evaluate on test.
Json RunClassification(std::string_view command, const ExperimentConfig& cfg,
                       LabelTarget target, bool level_split) {
  const Dataset data = LoadExperimentData(cfg);
  const EncodedData enc = EncodeLabels(data, target);
  const SplitPlan plan =
      level_split ? SplitByLevel(data, cfg.scenario.train_levels, cfg.scenario.test_levels)
                  : RandomStratifiedSplit(enc.labels, cfg.scenario.train_frac,
                                          DeriveSeed(cfg.seed, "split"));
  const FittedScaler scaler =
      FittedScaler::Fit(SelectRows(enc.features, plan.train), ScalerKind::kMinMax);
  const Matrix x_train = scaler.Transform(SelectRows(enc.features, plan.train));
  const Matrix x_test = scaler.Transform(SelectRows(enc.features, plan.test));
  const auto y_train = SelectLabels(enc.labels, plan.train);
  const auto y_test = SelectLabels(enc.labels, plan.test);
  const int n_classes = static_cast<int>(enc.label_map.size());
  const FoldPlan folds =
      StratifiedKFold(y_train, cfg.scenario.cv_folds, DeriveSeed(cfg.seed, "folds"));

  OutputDir out(cfg, command);
  Json models = Json::object();
  Json metrics = Json::object();
  for (const auto& name : cfg.scenario.models) {
    const auto fit = name == "random_forest" ? ForestFitPredict : TreeFitPredict;
    std::vector<double> cv;
    for (std::size_t f = 0; f < folds.k(); ++f) {
      const auto tr = folds.TrainIndices(f);
      const auto& va = folds.folds[f];
      const auto pred = fit(SelectRows(x_train, tr), SelectLabels(y_train, tr), n_classes,
                            SelectRows(x_train, va), cfg, nullptr);
      cv.push_back(AccuracyOf(SelectLabels(y_train, va), pred));
    }
    std::vector<double> importance;
    const auto pred = fit(x_train, y_train, n_classes, x_test, cfg, &importance);
    const EvalReport report = Evaluate(y_test, pred, enc.label_map.labels());
    out.Text("confusion_" + name + ".csv", report.ConfusionCsv());
    out.Text("feature_importance_" + name + ".csv", ImportanceCsv(importance));
    Json imp = Json::object();
    for (std::size_t f = 0; f < importance.size(); ++f) {
      imp[std::string(kFeatureNames[f])] = importance[f];
    }
    models[name] = Json{{"cv_accuracies", cv},
                        {"cv_mean", CvMean(cv)},
                        {"test_accuracy", report.accuracy},
                        {"evaluation", report.ToJson()},
                        {"feature_importance", imp}};
    metrics[name] = Json{{"cv_mean", CvMean(cv)}, {"test_accuracy", report.accuracy}};
  }
  const Json doc{{"format", "gazeguard.scenario_report"},
                 {"version", 1},
                 {"command", command},
                 {"target", target == LabelTarget::kDiagnosis ? "diagnosis" : "student_id"},
                 {"config", cfg.ToJson()},
                 {"split", {{"description", plan.description},
                            {"train_size", plan.train.size()},
                            {"test_size", plan.test.size()},
                            {"excluded", plan.excluded}}},
                 {"scaler", scaler.ToJson()},
                 {"labels", enc.label_map.labels()},
                 {"models", models}};
  out.Write("report.json", doc);
  return out.Summary(command, metrics);
}

Json RunSynth(const ExperimentConfig& cfg) {
  Require(cfg.data_path.empty(), ErrorCode::kInvalidArgument,
          "synth generates data; --data is not accepted");
  const Dataset data = LoadExperimentData(cfg);
  OutputDir out(cfg, "synth");
  out.Text("dataset.csv", DatasetToCsv(data, cfg.columns));
  SyntheticConfig syn = cfg.synthetic;
  syn.seed = cfg.DataSeed();
  out.Write("provenance.json", Json{{"format", "gazeguard.synth_provenance"},
                                    {"version", 1},
                                    {"seed", cfg.seed},
                                    {"synthetic", syn.ToJson()},
                                    {"rows", data.size()}});
  return out.Summary("synth", Json{{"rows", data.size()}});
}

Json RunScenario4(const ExperimentConfig& cfg) {
  const auto& p = cfg.scenario4;
  const Dataset data = LoadExperimentData(cfg);
  const auto ids = data.StudentIds();
  Require(ids.size() >= 2, ErrorCode::kData, "scenario4 needs at least two students");
  const std::int64_t held_out = *ids.rbegin();
  std::vector<std::size_t> known_rows, new_rows;
  for (std::size_t i = 0; i < data.size(); ++i) {
    (data[i].student_id == held_out ? new_rows : known_rows).push_back(i);
  }
  const Matrix raw_known = data.FeatureMatrix(known_rows);
  const Matrix raw_new = data.FeatureMatrix(new_rows);
  const FittedScaler scaler = FittedScaler::Fit(raw_known, ScalerKind::kZScore);
  const Matrix xk = scaler.Transform(raw_known);
  const Matrix xn = scaler.Transform(raw_new);
  std::vector<std::int64_t> known_ids;
  for (std::size_t r : known_rows) known_ids.push_back(data[r].student_id);

  const int k_max = std::min<int>(p.k_max, static_cast<int>(xk.rows()));
  Require(p.k_min <= k_max, ErrorCode::kData, "too few known samples for the k range");
  const auto curve = WcssCurve(xk, p.k_min, k_max, p.n_init, DeriveSeed(cfg.seed, "kmeans"));
  std::vector<double> silhouettes;
  std::size_t best = 0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const auto labels = curve[i].model.Assign(xk);
    const bool multi = std::adjacent_find(labels.begin(), labels.end(),
                                          std::not_equal_to<>()) != labels.end();
    silhouettes.push_back(multi ? Silhouette(xk, labels) : -1.0);
    if (silhouettes[i] > silhouettes[best]) best = i;
  }
  const KMeansModel& kmeans = curve[best].model;
  const NoveltyThreshold novelty = p.tau ? ManualNoveltyThreshold(*p.tau)
                                         : FitNoveltyThreshold(xk, kmeans, p.novelty_percentile);
  IsolationForestConfig ic;
  ic.n_trees = p.iforest_trees;
  ic.subsample_size = p.iforest_subsample;
  ic.threshold = p.iforest_threshold;
  ic.seed = DeriveSeed(cfg.seed, "iforest");
  const auto iforest = IsolationForestModel::Fit(xk, ic);
  const auto known_clusters = kmeans.Assign(xk);
  AssignmentContext ctx;
  ctx.known_x = &xk;
  ctx.known_ids = known_ids;
  ctx.confidence_threshold = p.confidence_threshold;
  ctx.iforest = &iforest;
  ctx.kmeans = &kmeans;
  ctx.novelty = &novelty;
  ctx.known_clusters = known_clusters;
  const std::vector<std::int64_t> existing(ids.begin(), std::prev(ids.end()));

  constexpr Strategy kOrder[] = {Strategy::kSequential, Strategy::kSimilarity,
                                 Strategy::kOutlier,    Strategy::kClustering,
                                 Strategy::kFeatureHash, Strategy::kEnsemble};
  struct Tally {
    std::size_t new_count = 0;
    std::map<std::int64_t, std::size_t> matched;
  };
  std::map<std::string, Tally> tally;
  Json queries = Json::array();
  std::size_t above_tau = 0, anomalous = 0;
  for (Eigen::Index i = 0; i < xn.rows(); ++i) {
    const auto q = Row(xn, i);
    Json decisions = Json::array();
    for (Strategy s : kOrder) {
      const AssignmentDecision d = s == Strategy::kFeatureHash
                                       ? FeatureHashAssign(Row(raw_new, i), existing)
                                       : Assign(s, q, ctx);
      Tally& t = tally[StrategyName(s)];
      if (d.is_new) {
        ++t.new_count;
      } else {
        ++t.matched[d.id];
      }
      decisions.push_back(d.ToJson());
    }
    if (IsOutlier(q, kmeans, novelty)) ++above_tau;
    if (iforest.IsAnomaly(q)) ++anomalous;
    queries.push_back(Json{{"query", i}, {"decisions", std::move(decisions)}});
  }
  const double n_q = static_cast<double>(xn.rows());

  OutputDir out(cfg, "scenario4");
  std::string wcss_csv = "k,wcss,silhouette\n";
  Json sil = Json::array();
  for (std::size_t i = 0; i < curve.size(); ++i) {
    wcss_csv += std::to_string(curve[i].k) + "," + FormatDouble(curve[i].wcss) + "," +
                FormatDouble(silhouettes[i]) + "\n";
    sil.push_back(Json{{"k", curve[i].k}, {"wcss", curve[i].wcss}, {"silhouette", silhouettes[i]}});
  }
  out.Text("wcss_curve.csv", wcss_csv);

  const PcaModel pca = PcaFit(xk, 2);
  std::string pca_csv = "pc1,pc2,student_id,group\n";
  auto emit = [&](const Matrix& x, const std::vector<std::size_t>& rows, const char* group) {
    const Matrix proj = pca.Project(x);
    for (Eigen::Index i = 0; i < proj.rows(); ++i) {
      pca_csv += FormatDouble(proj(i, 0)) + "," + FormatDouble(proj(i, 1)) + "," +
                 std::to_string(data[rows[static_cast<std::size_t>(i)]].student_id) + "," +
                 group + "\n";
    }
  };
  emit(xk, known_rows, "known");
  emit(xn, new_rows, "new");
  out.Text("pca_projection.csv", pca_csv);
  out.Write("decisions.json", Json{{"format", "gazeguard.assignment_decisions"},
                                   {"version", 1},
                                   {"held_out_student", held_out},
                                   {"queries", std::move(queries)}});

  Json strategies = Json::object();
  for (Strategy s : kOrder) {
    const Tally& t = tally[StrategyName(s)];
    Json matched = Json::object();
    for (const auto& [id, count] : t.matched) matched[std::to_string(id)] = count;
    strategies[StrategyName(s)] = Json{{"new_fraction", static_cast<double>(t.new_count) / n_q},
                                       {"matched_counts", std::move(matched)}};
  }
  Json metrics{{"selected_k", kmeans.k()},
               {"tau", novelty.tau},
               {"novelty_above_tau_fraction", static_cast<double>(above_tau) / n_q},
               {"iforest_anomaly_fraction", static_cast<double>(anomalous) / n_q},
               {"ensemble_new_fraction", strategies["ensemble"]["new_fraction"]},
               {"similarity_new_fraction", strategies["similarity"]["new_fraction"]}};
  out.Write("report.json",
            Json{{"format", "gazeguard.scenario4_report"},
                 {"version", 1},
                 {"config", cfg.ToJson()},
                 {"known_students", existing},
                 {"held_out_student", held_out},
                 {"n_queries", xn.rows()},
                 {"scaler", scaler.ToJson()},
                 {"k_selection", {{"rule", "max silhouette"}, {"curve", sil}}},
                 {"kmeans", kmeans.ToJson()},
                 {"novelty_threshold", novelty.ToJson()},
                 {"isolation_forest", {{"n_trees", ic.n_trees},
                                       {"subsample_size", iforest.subsample_size()},
                                       {"threshold", iforest.threshold()}}},
                 {"pca", pca.ToJson()},
                 {"strategies", std::move(strategies)},
                 {"metrics", metrics}});
  return out.Summary("scenario4", metrics);
}

Json RunPhase2(const ExperimentConfig& cfg, const std::string& passphrase) {
  const auto& p = cfg.phase2;
  Require(!passphrase.empty(), ErrorCode::kUnauthorized,
          "phase2 needs the administrator passphrase");
  Vault vault = Vault::Load(cfg.VaultPath());
  const VaultKeys keys = vault.Unlock(passphrase);
  const Dataset data = LoadExperimentData(cfg);

  // True ids stay inside this scope; everything downstream sees dummy labels.
  std::map<std::int64_t, std::string> dummy_of;
  std::set<std::string> true_id_tokens;
  for (std::int64_t id : data.StudentIds()) {
    dummy_of[id] = vault.Issue(id, keys);
    true_id_tokens.insert(std::to_string(id));
  }
  vault.Save(cfg.VaultPath());
  std::vector<std::string> dummies;
  for (const auto& [id, d] : dummy_of) dummies.push_back(d);
  const LabelMap labels(dummies);
  std::vector<int> y(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    y[i] = labels.Encode(dummy_of.at(data[i].student_id));
  }
  const SplitPlan plan = SplitByLevel(data, p.train_levels, p.test_levels);
  const Matrix features = data.FeatureMatrix();
  const FittedScaler scaler =
      FittedScaler::Fit(SelectRows(features, plan.train), ScalerKind::kZScore);
  const Matrix x_train = scaler.Transform(SelectRows(features, plan.train));
  const Matrix x_test = scaler.Transform(SelectRows(features, plan.test));
  const auto y_train = SelectLabels(y, plan.train);
  const auto y_test = SelectLabels(y, plan.test);
  const auto clients =
      PartitionClients(x_train, y_train, p.n_clients, DeriveSeed(cfg.seed, "clients"));

  FederatedConfig fc;
  fc.n_rounds = p.rounds;
  fc.n_folds = p.folds;
  fc.mode = p.fedavg;
  fc.net.input_dim = static_cast<int>(kNumFeatures);
  fc.net.num_classes = static_cast<int>(labels.size());
  fc.net.seed = DeriveSeed(cfg.seed, "model");
  fc.train.epochs = p.epochs;
  fc.train.batch_size = p.batch_size;
  fc.train.learning_rate = p.learning_rate;
  fc.train.early_stopping_patience = p.early_stopping_patience;
  fc.train.lr_patience = p.lr_patience;
  fc.seed = DeriveSeed(cfg.seed, "federated");

  OutputDir out(cfg, "phase2");
  const auto result = RunFederated(
      clients, x_test, y_test, fc, [&out](const RoundRecord& r, const ModelWeights& w) {
        out.Text("checkpoints/round_" + std::to_string(r.round) + ".ggw", SerializeWeights(w));
      });
  const EvalReport eval = Evaluate(y_test, result.test_predictions, labels.labels());
  out.Text("progression.csv", ProgressionCsv(result.rounds));
  out.Text("confusion.csv", eval.ConfusionCsv());
  out.Write("evaluation.json", eval.ToJson());

  Json config = cfg.ToJson();
  if (config.contains("synthetic")) config["synthetic"].erase("diagnosis_assignment");
  Json rounds = Json::array();
  for (const auto& r : result.rounds) {
    rounds.push_back(Json{{"round", r.round},
                          {"client_val_accuracy", r.client_val_accuracy},
                          {"client_best_fold", r.client_best_fold},
                          {"test_accuracy", r.test_accuracy},
                          {"test_loss", r.test_loss}});
  }
  Json sizes = Json::array();
  for (const auto& c : clients) sizes.push_back(c.size());
  const double final_acc = result.rounds.back().test_accuracy;
  const double first_acc = result.rounds.front().test_accuracy;
  Json metrics{{"final_test_accuracy", final_acc},
               {"round1_test_accuracy", first_acc},
               {"rounds", result.rounds.size()}};
  out.Write("report.json", Json{{"format", "gazeguard.phase2_report"},
                                {"version", 1},
                                {"config", config},
                                {"vault_epoch", vault.epoch()},
                                {"labels", labels.labels()},
                                {"split", {{"description", plan.description},
                                           {"train_size", plan.train.size()},
                                           {"test_size", plan.test.size()}}},
                                {"client_sizes", sizes},
                                {"net", fc.net.ToJson()},
                                {"train", fc.train.ToJson()},
                                {"fedavg", FedAvgModeName(fc.mode)},
                                {"rounds", rounds},
                                {"metrics", metrics}});

  PrivacyAuditReport audit = AuditDirectory(out.root(), true_id_tokens);
  out.Write("privacy_audit.json", audit.ToJson());
  Require(audit.passed(), ErrorCode::kData, "privacy audit found true ids in phase2 artifacts");
  metrics["privacy_audit_passed"] = true;
  return out.Summary("phase2", metrics);
}

Json RunReport(const ExperimentConfig& cfg) {
  auto load = [&](const char* command) -> std::optional<Json> {
    const fs::path p = cfg.output_dir / command / "report.json";
    if (!fs::exists(p)) return std::nullopt;
    try {
      return Json::parse(ReadFile(p));
    } catch (const Json::exception&) {
      Fail(ErrorCode::kData, p.string() + " is not valid JSON");
    }
  };
  const auto s2 = load("scenario2");
  const auto s3 = load("scenario3");
  Require(s2 && s3, ErrorCode::kNotFound,
          "report needs scenario2 and scenario3 reports under " + cfg.output_dir.string());
  Json gaps = Json::object();
  for (const auto& item : (*s3)["models"].items()) {
    if (!(*s2)["models"].contains(item.key())) continue;
    const double a3 = item.value()["test_accuracy"].get<double>();
    const double a2 = (*s2)["models"][item.key()]["test_accuracy"].get<double>();
    gaps[item.key()] = Json{{"scenario2_accuracy", a2},
                            {"scenario3_accuracy", a3},
                            {"gap_s3_minus_s2", a3 - a2}};
  }
  Json doc{{"format", "gazeguard.gap_report"}, {"version", 1}, {"models", gaps}};
  if (const auto s1 = load("scenario1")) {
    Json s1_acc = Json::object();
    for (const auto& item : (*s1)["models"].items()) {
      s1_acc[item.key()] = item.value()["test_accuracy"];
    }
    doc["scenario1_test_accuracy"] = s1_acc;
  }
  OutputDir out(cfg, "report");
  out.Write("gap_report.json", doc);
  return out.Summary("report", gaps);
}

}  // namespace

bool IsExperimentCommand(std::string_view command) {
  return std::find(std::begin(kCommands), std::end(kCommands), command) != std::end(kCommands);
}

Dataset LoadExperimentData(const ExperimentConfig& config) {
  if (config.data_path.empty()) {
    SyntheticConfig syn = config.synthetic;
    syn.seed = config.DataSeed();
    return GenerateSynthetic(syn);
  }
  Require(fs::exists(config.data_path), ErrorCode::kData,
          "data file not found: " + config.data_path.string());
  return LoadDataset(config.data_path, config.columns).dataset;
}

Json RunExperiment(std::string_view command, const ExperimentConfig& config,
                   const std::string& admin_passphrase) {
  if (command == "synth") return RunSynth(config);
  if (command == "scenario1") {
    return RunClassification(command, config, LabelTarget::kDiagnosis, true);
  }
  if (command == "scenario2") {
    return RunClassification(command, config, LabelTarget::kStudentId, true);
  }
  if (command == "scenario3") {
    return RunClassification(command, config, LabelTarget::kStudentId, false);
  }
  if (command == "scenario4") return RunScenario4(config);
  if (command == "phase2") return RunPhase2(config, admin_passphrase);
  if (command == "report") return RunReport(config);
  Fail(ErrorCode::kInvalidArgument, "unknown command '" + std::string(command) + "'");
}

}  // namespace gazeguard
