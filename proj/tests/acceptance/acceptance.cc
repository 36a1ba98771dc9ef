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

// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "gazeguard/cluster.hpp"
#include "gazeguard/crypto.hpp"
#include "gazeguard/error.hpp"
#include "gazeguard/experiment_config.hpp"
#include "gazeguard/experiments.hpp"
#include "gazeguard/federated.hpp"
#include "gazeguard/id_assignment.hpp"
#include "gazeguard/io.hpp"
#include "gazeguard/neural_net.hpp"
#include "gazeguard/preprocess.hpp"
#include "gazeguard/rng.hpp"
#include "gazeguard/vault.hpp"

namespace gazeguard {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

class Scratch {
 public:
  Scratch() {
    root_ = fs::temp_directory_path() / ("gazeguard_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(root_, ec);
  }
  fs::path Dir(const std::string& name) const { return root_ / name; }

 private:
  fs::path root_;
};

const Scratch& Tmp() {
  static const Scratch s;
  return s;
}

ExperimentConfig Config(const std::string& json, const fs::path& out) {
  ExperimentConfig c = ExperimentConfig::FromJson(Json::parse(json));
  c.output_dir = out;
  return c;
}

double ModelAccuracy(const Json& report, const char* model) {
  return report["models"][model]["test_accuracy"].get<double>();
}

// ---------------------------------------------------------------------------

Outcome ScenarioGap() {
  constexpr std::uint64_t kSeeds[] = {1, 2, 3, 4, 5};
  double min_s3 = 1.0, min_gap = 1.0, max_seconds = 0.0;
  for (std::uint64_t seed : kSeeds) {
    const auto t0 = Clock::now();
    ExperimentConfig c = Config(
        R"({"synthetic": {"n_students": 9, "levels": [1, 2, 3],
                          "signature_separation": 4, "level_drift": 2}})",
        Tmp().Dir("gap_" + std::to_string(seed)));
    c.seed = seed;
    RunExperiment("scenario2", c);
    RunExperiment("scenario3", c);
    const Json gap = RunExperiment("report", c)["metrics"]["random_forest"];
    max_seconds = std::max(max_seconds, Seconds(t0));
    min_s3 = std::min(min_s3, gap["scenario3_accuracy"].get<double>());
    min_gap = std::min(min_gap, gap["gap_s3_minus_s2"].get<double>());
  }
  return {min_s3 >= 0.95 && min_gap >= 0.15 && max_seconds <= 120.0,
          "random forest over 5 seeds: min s3 accuracy " + Fmt("%.4f", min_s3) +
              ", min gap " + Fmt("%.4f", min_gap) + ", slowest seed " +
              Fmt("%.1f", max_seconds) + " s"};
}

Outcome DiagnosisClassification() {
  const auto t0 = Clock::now();
  const ExperimentConfig c = Config("{}", Tmp().Dir("diagnosis"));
  RunExperiment("scenario1", c);
  const double secs = Seconds(t0);
  const Json r = Json::parse(ReadFile(c.output_dir / "scenario1/report.json"));
  const double rf = ModelAccuracy(r, "random_forest");
  const double dt = ModelAccuracy(r, "decision_tree");
  const bool cv_ok = r["models"]["random_forest"]["cv_accuracies"].size() == 5 &&
                     r["models"]["decision_tree"]["cv_accuracies"].size() == 5;
  return {rf >= 0.97 && dt >= 0.97 && cv_ok && secs <= 60.0,
          "level-3 accuracy RF " + Fmt("%.4f", rf) + ", DT " + Fmt("%.4f", dt) +
              (cv_ok ? ", 5 CV entries each" : ", CV list missing") + ", " +
              Fmt("%.1f", secs) + " s"};
}

Outcome KnnConfidence() {
  const double at_zero = ConfidenceFromDistance(0.0);
  const double at_269 = ConfidenceFromDistance(2.69);
  // The same law drives the decision: a neighbour 2.69 away is rejected at 0.5.
  Matrix known(2, 2);
  known << 0.0, 0.0, 10.0, 10.0;
  const std::vector<std::int64_t> ids{1, 2};
  const std::vector<double> query{2.69, 0.0};
  const AssignmentDecision d = SimilarityAssign(query, known, ids, 0.5);
  const bool ok = at_zero == 1.0 && std::abs(at_269 - 0.0679) <= 2e-4 && d.is_new &&
                  d.id == 3 && std::abs(d.Evidence("confidence") - at_269) < 1e-15;
  return {ok, "confidence(0) = " + Fmt("%.6f", at_zero) + ", confidence(2.69) = " +
                  Fmt("%.6f", at_269) + ", decision at threshold 0.5: " +
                  (d.is_new ? "new id" : "matched")};
}

Outcome Novelty() {
  double min_far = 1.0, max_clone = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    for (const char* mode : {"far", "clone_of_first"}) {
      ExperimentConfig c = Config(std::string(R"({"synthetic": {"held_out": ")") + mode +
                                      R"(", "held_out_offset": 6}})",
                                  Tmp().Dir("novelty"));
      c.seed = seed;
      const double frac =
          RunExperiment("scenario4", c)["metrics"]["novelty_above_tau_fraction"].get<double>();
      if (std::string(mode) == "far") {
        min_far = std::min(min_far, frac);
      } else {
        max_clone = std::max(max_clone, frac);
      }
    }
  }
  return {min_far >= 0.95 && max_clone <= 0.10,
          "10 seeds: injected student above tau min " + Fmt("%.3f", min_far) +
              ", cloned student above tau max " + Fmt("%.3f", max_clone)};
}

Outcome FeatureHash() {
  // Expected ids come from an independent MD5 implementation.
  struct Pin {
    std::vector<double> features;
    std::int64_t id;
  };
  const Pin pins[] = {{{1.0, 2.0}, 5007},
                      {std::vector<double>(7, 0.0), 7970},
                      {{960.123457, 540.0, 3.5, 3.45, -12.25, 4.0, 600.0}, 9984}};
  int pinned = 0;
  for (const auto& p : pins) {
    pinned += FeatureHashAssign(p.features, std::vector<std::int64_t>{}).id == p.id;
  }
  Rng rng(17);
  bool in_range = true;
  for (int i = 0; i < 10000; ++i) {
    std::vector<double> f(7);
    for (double& v : f) v = rng.Uniform(-1e4, 1e4);
    const auto id = FeatureHashAssign(f, std::vector<std::int64_t>{}).id;
    in_range = in_range && id >= 0 && id < kHashIdSpace;
  }
  // Chain: 5007 and 5008 taken -> 5009 after two probes; a full tail wraps to 0.
  const auto chain = FeatureHashAssign(pins[0].features, std::vector<std::int64_t>{5007, 5008});
  std::vector<std::int64_t> tail;
  for (std::int64_t i = 9984; i < kHashIdSpace; ++i) tail.push_back(i);
  const auto wrap = FeatureHashAssign(pins[2].features, tail);
  const bool chain_ok = chain.id == 5009 && chain.Evidence("collision_probes") == 2.0 &&
                        wrap.id == 0 && wrap.Evidence("collision_probes") == 16.0;
  return {pinned == 3 && in_range && chain_ok,
          std::to_string(pinned) + "/3 pinned ids, 10000 random ids in range: " +
              (in_range ? "yes" : "no") + ", collision chain: " + (chain_ok ? "ok" : "wrong")};
}

Outcome VaultProperties() {
  const auto t0 = Clock::now();
  constexpr int kTrials = 10000;
  constexpr int kPerEpoch = 500;
  constexpr char kPass[] = "acceptance";
  // One KDF iteration: this suite exercises the mapping, not the KDF cost.
  Vault v = Vault::Create(kPass, {.kdf_iterations = 1});
  const VaultKeys keys = v.Unlock(kPass);
  VaultKeys wrong = keys;
  Rng rng(23);
  int failures = 0;
  std::string first_failure;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok && failures++ == 0) first_failure = what;
  };
  std::map<std::int64_t, std::string> previous_epoch, current_epoch;
  std::size_t log_size = 0;
  std::string last_hash;
  for (int t = 0; t < kTrials; ++t) {
    if (t > 0 && t % kPerEpoch == 0) {
      // Rotation must change the mapping of the ids seen in both epochs.
      bool differs = false;
      for (const auto& [id, d] : current_epoch) {
        auto it = previous_epoch.find(id);
        differs = differs || it == previous_epoch.end() || it->second != d;
      }
      check(previous_epoch.empty() || differs, "rotation left the mapping unchanged");
      std::set<std::string> distinct;
      for (const auto& [id, d] : current_epoch) distinct.insert(d);
      check(distinct.size() == current_epoch.size(), "dummy collision within an epoch");
      v.Rotate();
      previous_epoch = std::move(current_epoch);
      current_epoch.clear();
      // Re-issue the previous epoch's ids so the two mappings overlap.
      for (const auto& [id, d] : previous_epoch) current_epoch[id] = v.Issue(id, keys);
    }
    const auto id = static_cast<std::int64_t>(1 + rng.Index(2000));
    const std::string dummy = v.Issue(id, keys);
    check(IsDummyFormatted(dummy), "badly formatted dummy");
    auto [it, inserted] = current_epoch.emplace(id, dummy);
    check(inserted || it->second == dummy, "issue is not stable within an epoch");
    check(v.Resolve(dummy, std::nullopt, keys, kPass) == id, "resolve(issue(s)) != s");

    wrong.ek2 = keys.ek2;
    wrong.ek2[rng.Index(wrong.ek2.size())] ^= static_cast<std::uint8_t>(1 + rng.Index(255));
    bool rejected = false;
    try {
      v.Resolve(dummy, std::nullopt, wrong, kPass);
    } catch (const Error& e) {
      rejected = e.code() == ErrorCode::kUnauthorized;
    }
    check(rejected, "wrong ek2 accepted");

    // Append-only: two new entries, earlier entries untouched.
    const auto& log = v.audit_log();
    check(log.size() == log_size + 2, "audit log did not grow by one per attempt");
    check(log_size == 0 || log[log_size - 1].hash == last_hash, "audit history rewritten");
    check(log.back().outcome == "denied" && log[log.size() - 2].outcome == "resolved",
          "audit outcomes wrong");
    log_size = log.size();
    last_hash = log.back().hash;
  }
  check(v.VerifyAuditChain(), "audit hash chain broken");
  const double secs = Seconds(t0);
  return {failures == 0 && secs <= 10.0,
          std::to_string(kTrials) + " trials, " + std::to_string(v.epoch() + 1) +
              " epochs, " + std::to_string(failures) + " failures" +
              (failures ? " (first: " + first_failure + ")" : std::string()) + ", " +
              Fmt("%.2f", secs) + " s"};
}

Outcome NeuralNetChecks() {
  NetConfig nc;
  nc.seed = 31;
  NeuralNet net = NeuralNet::Build(nc);
  Rng rng(5);
  Matrix x(32, 7);
  std::vector<int> y(32);
  for (int i = 0; i < 32; ++i) {
    y[i] = i % 9;
    for (int j = 0; j < 7; ++j) x(i, j) = rng.Normal();
  }
  const GradientCheckResult gc = GradientCheck(net, x, y, 400, 7);
  const Matrix p = net.Predict(x * 50.0);
  double worst_sum = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    worst_sum = std::max(worst_sum, std::abs(p.row(i).sum() - 1.0));
  }
  // Overfit 64 separable samples.
  NetConfig oc;
  oc.num_classes = 4;
  NeuralNet small = NeuralNet::Build(oc);
  Matrix ox(64, 7);
  std::vector<int> oy(64);
  for (int i = 0; i < 64; ++i) {
    oy[i] = i % 4;
    for (int j = 0; j < 7; ++j) ox(i, j) = 0.5 * rng.Normal() + (j == oy[i] ? 3.0 : 0.0);
  }
  TrainConfig tc;
  tc.epochs = 200;
  tc.early_stopping = false;
  tc.seed = 5;
  Train(small, ox, oy, ox, oy, tc);
  const double train_acc = Accuracy(small.Predict(ox), oy);
  return {gc.max_relative_error <= 1e-4 && gc.checked >= 300 && worst_sum <= 1e-6 &&
              train_acc == 1.0,
          "max relative gradient error " + Fmt("%.2e", gc.max_relative_error) + " over " +
              std::to_string(gc.checked) + " coordinates (" +
              std::to_string(gc.skipped_kinks) + " kink crossings skipped), softmax row-sum "
              "error " + Fmt("%.1e", worst_sum) + ", overfit train accuracy " +
              Fmt("%.4f", train_acc)};
}

Outcome FedAvgAlgebra() {
  auto single = [](std::vector<double> v) {
    ModelWeights w;
    w.layout = {{"p", 1, static_cast<int>(v.size()), true}};
    w.tensors = {Eigen::Map<Matrix>(v.data(), 1, static_cast<Eigen::Index>(v.size()))};
    return w;
  };
  bool ok = true;
  std::string detail;
  const std::vector<ModelWeights> same(4, single({0.1, -3.7, 1e-9}));
  ok = ok && FedAvg(same).tensors[0] == same[0].tensors[0];
  const std::vector<std::size_t> sizes31{3, 1};
  const std::vector<ModelWeights> pair{single({2.0}), single({4.0})};
  const double ex = FedAvg(pair, sizes31).tensors[0](0, 0);
  ok = ok && ex == 2.5;
  Rng rng(3);
  double worst_delta = 0.0, worst_coeff = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.Index(6);
    std::vector<ModelWeights> ws;
    std::vector<std::size_t> sizes;
    for (std::size_t s = 0; s < n; ++s) {
      std::vector<double> v(10);
      for (double& e : v) e = rng.Normal();
      ws.push_back(single(v));
      sizes.push_back(1 + rng.Index(500));
    }
    std::vector<double> g(10);
    for (double& e : g) e = rng.Normal();
    const auto a = FedAvg(ws, sizes);
    const auto b = FedAvgDelta(single(g), ws, sizes);
    worst_delta = std::max(worst_delta, (a.tensors[0] - b.tensors[0]).cwiseAbs().maxCoeff());
    const auto c = FedAvgCoefficients(n, sizes);
    worst_coeff = std::max(worst_coeff, std::abs(std::accumulate(c.begin(), c.end(), 0.0) - 1.0));
  }
  ok = ok && worst_delta <= 1e-9 && worst_coeff <= 1e-12;
  return {ok, "fixed point exact, sizes (3,1) example " + Fmt("%.17g", ex) +
                  ", delta vs direct max diff " + Fmt("%.1e", worst_delta) +
                  ", coefficient sum error " + Fmt("%.1e", worst_coeff)};
}

// Shared between the end-to-end and determinism criteria.
constexpr char kPhase2Pass[] = "acceptance admin";

fs::path PreparedVault() {
  static const fs::path path = [] {
    const fs::path p = Tmp().Dir("vault_template.json");
    fs::create_directories(p.parent_path());
    Vault::Create(kPhase2Pass, {.kdf_iterations = 10000}).Save(p);
    return p;
  }();
  return path;
}

ExperimentConfig Phase2Config(const fs::path& out) {
  ExperimentConfig c = Config("{}", out);
  fs::create_directories(out);
  fs::copy_file(PreparedVault(), c.VaultPath(), fs::copy_options::overwrite_existing);
  return c;
}

Outcome Phase2EndToEnd() {
  const auto t0 = Clock::now();
  const ExperimentConfig c = Phase2Config(Tmp().Dir("phase2_a"));
  RunExperiment("phase2", c, kPhase2Pass);
  const double secs = Seconds(t0);
  const fs::path dir = c.output_dir / "phase2";
  const Json report = Json::parse(ReadFile(dir / "report.json"));
  const auto& rounds = report["rounds"];
  const double first = rounds.front()["test_accuracy"].get<double>();
  const double final_acc = rounds.back()["test_accuracy"].get<double>();
  const bool shape = rounds.size() == 5 && report["client_sizes"].size() == 2 &&
                     report["config"]["phase2"]["folds"] == 3 &&
                     report["config"]["phase2"]["epochs"] == 25;
  // Confusion labels straight from the CSV.
  bool dummies = true;
  const std::string csv = ReadFile(dir / "confusion.csv");
  std::size_t start = 0;
  for (std::size_t line = 0; start < csv.size(); ++line) {
    const std::size_t end = csv.find('\n', start);
    const auto cells = SplitCsvLine(csv.substr(start, end - start));
    if (line == 0) {
      for (std::size_t i = 1; i < cells.size(); ++i) dummies = dummies && IsDummyFormatted(cells[i]);
    } else if (!cells.empty()) {
      dummies = dummies && IsDummyFormatted(cells[0]);
    }
    start = end == std::string::npos ? csv.size() : end + 1;
  }
  const Json audit = Json::parse(ReadFile(dir / "privacy_audit.json"));
  const bool audit_ok = audit["passed"] == true && audit["violations"].empty() &&
                        audit["true_ids_checked"] == 9;
  return {shape && final_acc >= 0.97 && final_acc >= first - 0.02 && dummies && audit_ok &&
              secs <= 600.0,
          "final accuracy " + Fmt("%.4f", final_acc) + ", round 1 " + Fmt("%.4f", first) +
              ", confusion labels dummy-formatted: " + (dummies ? "yes" : "no") +
              ", true-id audit over " + std::to_string(audit["files_scanned"].size()) +
              " artifacts: " + (audit_ok ? "0 matches" : "matches found") + ", " +
              Fmt("%.0f", secs) + " s"};
}

std::map<std::string, std::string> Snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = ReadFile(e.path());
  }
  return files;
}

Outcome Determinism() {
  const char* commands[] = {"synth", "scenario1", "scenario2", "scenario3", "scenario4",
                            "report"};
  std::vector<std::string> differing;
  std::size_t compared = 0;
  const ExperimentConfig a = Config(R"({"seed": 77})", Tmp().Dir("det_a"));
  const ExperimentConfig b = Config(R"({"seed": 77})", Tmp().Dir("det_b"));
  for (const char* cmd : commands) {
    RunExperiment(cmd, a);
    RunExperiment(cmd, b);
    const auto sa = Snapshot(a.output_dir / cmd);
    const auto sb = Snapshot(b.output_dir / cmd);
    compared += sa.size();
    if (sa != sb) differing.push_back(cmd);
  }
  // phase2: the second run reuses the first run's vault template.
  const ExperimentConfig p = Phase2Config(Tmp().Dir("phase2_b"));
  RunExperiment("phase2", p, kPhase2Pass);
  const auto pa = Snapshot(Tmp().Dir("phase2_a") / "phase2");
  const auto pb = Snapshot(p.output_dir / "phase2");
  compared += pa.size();
  if (pa != pb) differing.push_back("phase2");
  std::string list;
  for (const auto& d : differing) list += (list.empty() ? "" : ", ") + d;
  return {differing.empty(), "7 commands run twice, " + std::to_string(compared) +
                                 " artifacts compared byte for byte" +
                                 (differing.empty() ? "" : "; differing: " + list)};
}

Outcome PreprocessingInvariants() {
  Rng rng(41);
  int worst_split = 0, worst_fold = 0;
  bool partition_ok = true;
  for (int trial = 0; trial < 200; ++trial) {
    const int classes = 2 + static_cast<int>(rng.Index(8));
    const int k = 2 + static_cast<int>(rng.Index(9));
    std::vector<int> y;
    std::vector<int> counts(classes);
    for (int c = 0; c < classes; ++c) {
      counts[c] = k + static_cast<int>(rng.Index(60));
      y.insert(y.end(), counts[c], c);
    }
    rng.Shuffle(std::span<int>(y));
    const double frac = 0.2 + 0.6 * rng.Uniform();
    const SplitPlan s = RandomStratifiedSplit(y, frac, rng.NextU64());
    std::vector<int> in_train(classes);
    for (auto i : s.train) ++in_train[y[i]];
    for (int c = 0; c < classes; ++c) {
      worst_split = std::max(
          worst_split, static_cast<int>(std::ceil(std::abs(in_train[c] - frac * counts[c]) - 1e-9)));
    }
    const FoldPlan f = StratifiedKFold(y, k, rng.NextU64());
    std::vector<int> seen(y.size());
    for (int c = 0; c < classes; ++c) {
      int lo = 1 << 30, hi = 0;
      for (const auto& fold : f.folds) {
        int n = 0;
        for (auto i : fold) n += y[i] == c;
        lo = std::min(lo, n);
        hi = std::max(hi, n);
      }
      worst_fold = std::max(worst_fold, hi - lo);
    }
    for (const auto& fold : f.folds) {
      for (auto i : fold) ++seen[i];
    }
    partition_ok = partition_ok &&
                   std::all_of(seen.begin(), seen.end(), [](int v) { return v == 1; }) &&
                   s.train.size() + s.test.size() == y.size();
  }
  double worst_scaler = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    Matrix x(20 + rng.Index(200), 7);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (Eigen::Index j = 0; j < 7; ++j) x(i, j) = rng.Uniform(-1e3, 1e3) * (j + 1) + 5e2 * j;
    }
    const Matrix mm = FittedScaler::Fit(x, ScalerKind::kMinMax).Transform(x);
    const Matrix z = FittedScaler::Fit(x, ScalerKind::kZScore).Transform(x);
    for (Eigen::Index j = 0; j < 7; ++j) {
      const double mean = z.col(j).mean();
      const double var = (z.col(j).array() - mean).square().mean();
      worst_scaler = std::max({worst_scaler, std::abs(mm.col(j).minCoeff()),
                               std::abs(mm.col(j).maxCoeff() - 1.0), std::abs(mean),
                               std::abs(var - 1.0)});
    }
  }
  return {worst_split <= 1 && worst_fold <= 1 && partition_ok && worst_scaler <= 1e-9,
          "200 random label sets: max split deviation " + std::to_string(worst_split) +
              ", max per-class fold spread " + std::to_string(worst_fold) +
              ", folds disjoint and covering: " + (partition_ok ? "yes" : "no") +
              ", scaler max error " + Fmt("%.1e", worst_scaler)};
}

}  // namespace
}  // namespace gazeguard

int main() {
  using gazeguard::Outcome;
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"AC1 scenario gap", gazeguard::ScenarioGap},
      {"AC2 diagnosis classification", gazeguard::DiagnosisClassification},
      {"AC3 knn confidence law", gazeguard::KnnConfidence},
      {"AC4 novelty detection", gazeguard::Novelty},
      {"AC5 feature-hash ids", gazeguard::FeatureHash},
      {"AC6 vault properties", gazeguard::VaultProperties},
      {"AC7 neural net checks", gazeguard::NeuralNetChecks},
      {"AC8 fedavg algebra", gazeguard::FedAvgAlgebra},
      {"AC9 phase2 end-to-end", gazeguard::Phase2EndToEnd},
      {"AC10 determinism", gazeguard::Determinism},
      {"AC11 preprocessing invariants", gazeguard::PreprocessingInvariants},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed,
              std::size(criteria));
  return failed == 0 ? 0 : 1;
}
