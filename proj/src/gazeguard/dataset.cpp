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

#include "gazeguard/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <unordered_set>

#include "gazeguard/error.hpp"
#include "gazeguard/rng.hpp"

namespace gazeguard {
namespace {

// Physical units for the synthetic features: value = base + scale * z.
constexpr std::array<double, kNumFeatures> kFeatureBase = {960.0, 540.0, 3.6, 3.5,
                                                           0.0,   0.0,   600.0};
constexpr std::array<double, kNumFeatures> kFeatureScale = {40.0, 30.0, 0.05, 0.05,
                                                            5.0,  5.0,  8.0};
constexpr double kMinPupilMm = 0.05;
constexpr std::int64_t kSampleIntervalMs = 16;

std::string RecordKey(const GazeRecord& r) {
  std::string key = std::to_string(r.timestamp);
  for (double v : r.Features()) {
    key += ',';
    key += FormatDouble(v);
  }
  key += ',' + std::to_string(r.game_level) + ',' + r.diagnosis + ',' +
         std::to_string(r.student_id);
  return key;
}

double Distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(sum);
}

}  // namespace

std::set<std::int64_t> Dataset::StudentIds() const {
  std::set<std::int64_t> ids;
  for (const auto& r : records_) ids.insert(r.student_id);
  return ids;
}

std::set<int> Dataset::Levels() const {
  std::set<int> levels;
  for (const auto& r : records_) levels.insert(r.game_level);
  return levels;
}

Dataset Dataset::Subset(std::span<const std::size_t> indices) const {
  std::vector<GazeRecord> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(records_.at(i));
  return Dataset(std::move(out));
}

Matrix Dataset::FeatureMatrix() const {
  Matrix x(static_cast<Eigen::Index>(records_.size()), kNumFeatures);
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto f = records_[i].Features();
    for (std::size_t j = 0; j < kNumFeatures; ++j) x(i, j) = f[j];
  }
  return x;
}

Matrix Dataset::FeatureMatrix(std::span<const std::size_t> indices) const {
  Matrix x(static_cast<Eigen::Index>(indices.size()), kNumFeatures);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto f = records_.at(indices[i]).Features();
    for (std::size_t j = 0; j < kNumFeatures; ++j) x(i, j) = f[j];
  }
  return x;
}

ColumnMap ColumnMap::FromJson(const Json& doc) {
  RejectUnknownKeys(doc,
                    {"timestamp", "gaze_x", "gaze_y", "left_pupil_dia", "right_pupil_dia",
                     "head_x", "head_y", "head_z", "game_level", "diagnosis", "student_id"},
                    "columns");
  ColumnMap m;
  auto take = [&](const char* key, std::string& field) {
    if (doc.contains(key)) field = doc.at(key).get<std::string>();
  };
  take("timestamp", m.timestamp);
  take("gaze_x", m.gaze_x);
  take("gaze_y", m.gaze_y);
  take("left_pupil_dia", m.left_pupil_dia);
  take("right_pupil_dia", m.right_pupil_dia);
  take("head_x", m.head_x);
  take("head_y", m.head_y);
  take("head_z", m.head_z);
  take("game_level", m.game_level);
  take("diagnosis", m.diagnosis);
  take("student_id", m.student_id);
  return m;
}

Json ColumnMap::ToJson() const {
  return Json{{"timestamp", timestamp},       {"gaze_x", gaze_x},
              {"gaze_y", gaze_y},             {"left_pupil_dia", left_pupil_dia},
              {"right_pupil_dia", right_pupil_dia}, {"head_x", head_x},
              {"head_y", head_y},             {"head_z", head_z},
              {"game_level", game_level},     {"diagnosis", diagnosis},
              {"student_id", student_id}};
}

LoadResult ParseDataset(std::istream& in, const ColumnMap& columns) {
  std::string line;
  if (!std::getline(in, line)) Fail(ErrorCode::kData, "CSV has no header row");
  const auto header = SplitCsvLine(line);
  auto column = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (Trim(header[i]) == name) return i;
    }
    Fail(ErrorCode::kData, "CSV header is missing column '" + name + "'");
  };
  const std::size_t c_ts = column(columns.timestamp);
  const std::array<std::size_t, kNumFeatures> c_feat = {
      column(columns.gaze_x),         column(columns.gaze_y),
      column(columns.left_pupil_dia), column(columns.right_pupil_dia),
      column(columns.head_x),         column(columns.head_y),
      column(columns.head_z)};
  const std::size_t c_level = column(columns.game_level);
  const std::size_t c_diag = column(columns.diagnosis);
  const std::size_t c_id = column(columns.student_id);

  LoadResult result;
  std::vector<GazeRecord> records;
  std::unordered_set<std::string> seen;
  while (std::getline(in, line)) {
    if (Trim(line).empty()) continue;
    ++result.rows_read;
    const auto fields = SplitCsvLine(line);
    auto field = [&](std::size_t i) -> std::string_view {
      return i < fields.size() ? Trim(fields[i]) : std::string_view{};
    };
    GazeRecord r;
    bool ok = true;
    if (auto ts = ParseInt(field(c_ts)); ts && *ts >= 0) {
      r.timestamp = *ts;
    } else {
      ok = false;
    }
    std::array<double, kNumFeatures> f{};
    for (std::size_t j = 0; j < kNumFeatures && ok; ++j) {
      auto v = ParseDouble(field(c_feat[j]));
      if (v) {
        f[j] = *v;
      } else {
        ok = false;
      }
    }
    auto level = ParseInt(field(c_level));
    auto id = ParseInt(field(c_id));
    const std::string_view diag = field(c_diag);
    ok = ok && level && *level >= 1 && *level <= 3 && id && *id >= 1 && !diag.empty() &&
         f[2] > 0.0 && f[3] > 0.0;
    if (!ok) {
      ++result.dropped_invalid;
      continue;
    }
    r.gaze_x = f[0];
    r.gaze_y = f[1];
    r.left_pupil_dia = f[2];
    r.right_pupil_dia = f[3];
    r.head_x = f[4];
    r.head_y = f[5];
    r.head_z = f[6];
    r.game_level = static_cast<int>(*level);
    r.diagnosis = std::string(diag);
    r.student_id = *id;
    if (!seen.insert(RecordKey(r)).second) {
      ++result.dropped_duplicate;
      continue;
    }
    records.push_back(std::move(r));
  }
  if (records.empty()) Fail(ErrorCode::kData, "no rows survived cleaning");
  result.dataset = Dataset(std::move(records));
  return result;
}

LoadResult LoadDataset(const std::filesystem::path& path, const ColumnMap& columns) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kData, "cannot read dataset " + path.string());
  return ParseDataset(in, columns);
}

std::string DatasetToCsv(const Dataset& dataset, const ColumnMap& columns) {
  std::ostringstream out;
  out << CsvEscape(columns.timestamp) << ',' << CsvEscape(columns.gaze_x) << ','
      << CsvEscape(columns.gaze_y) << ',' << CsvEscape(columns.left_pupil_dia) << ','
      << CsvEscape(columns.right_pupil_dia) << ',' << CsvEscape(columns.head_x) << ','
      << CsvEscape(columns.head_y) << ',' << CsvEscape(columns.head_z) << ','
      << CsvEscape(columns.game_level) << ',' << CsvEscape(columns.diagnosis) << ','
      << CsvEscape(columns.student_id) << '\n';
  for (const auto& r : dataset.records()) {
    out << r.timestamp;
    for (double v : r.Features()) out << ',' << FormatDouble(v);
    out << ',' << r.game_level << ',' << CsvEscape(r.diagnosis) << ',' << r.student_id
        << '\n';
  }
  return out.str();
}

std::map<std::int64_t, std::string> SyntheticConfig::DefaultDiagnoses(int n_students) {
  std::map<std::int64_t, std::string> out;
  for (int s = 1; s <= n_students; ++s) out[s] = (s % 2 == 1) ? "MDI" : "DD";
  return out;
}

SyntheticConfig SyntheticConfig::FromJson(const Json& doc) {
  RejectUnknownKeys(doc,
                    {"n_students", "levels", "records_per_student_per_level",
                     "signature_separation", "level_drift", "diagnosis_assignment", "seed",
                     "held_out", "held_out_offset"},
                    "synthetic");
  SyntheticConfig c;
  if (doc.contains("n_students")) c.n_students = doc.at("n_students").get<int>();
  if (doc.contains("levels")) c.levels = doc.at("levels").get<std::vector<int>>();
  if (doc.contains("records_per_student_per_level")) {
    c.records_per_student_per_level = doc.at("records_per_student_per_level").get<int>();
  }
  if (doc.contains("signature_separation")) {
    c.signature_separation = doc.at("signature_separation").get<double>();
  }
  if (doc.contains("level_drift")) c.level_drift = doc.at("level_drift").get<double>();
  if (doc.contains("seed")) c.seed = doc.at("seed").get<std::uint64_t>();
  if (doc.contains("held_out")) {
    const auto mode = doc.at("held_out").get<std::string>();
    if (mode == "regular") {
      c.held_out = HeldOutStudent::kRegular;
    } else if (mode == "far") {
      c.held_out = HeldOutStudent::kFarOffset;
    } else if (mode == "clone_of_first") {
      c.held_out = HeldOutStudent::kCloneOfFirst;
    } else {
      Fail(ErrorCode::kInvalidArgument, "synthetic.held_out: unknown mode '" + mode + "'");
    }
  }
  if (doc.contains("held_out_offset")) {
    c.held_out_offset = doc.at("held_out_offset").get<double>();
  }
  if (doc.contains("diagnosis_assignment")) {
    const auto& m = doc.at("diagnosis_assignment");
    if (!m.is_object()) {
      Fail(ErrorCode::kInvalidArgument, "synthetic.diagnosis_assignment must be an object");
    }
    for (const auto& item : m.items()) {
      auto id = ParseInt(item.key());
      if (!id) {
        Fail(ErrorCode::kInvalidArgument,
             "synthetic.diagnosis_assignment: bad student id '" + item.key() + "'");
      }
      c.diagnosis_assignment[*id] = item.value().get<std::string>();
    }
  } else {
    c.diagnosis_assignment = DefaultDiagnoses(c.n_students);
  }
  return c;
}

Json SyntheticConfig::ToJson() const {
  Json diag = Json::object();
  const auto& resolved =
      diagnosis_assignment.empty() ? DefaultDiagnoses(n_students) : diagnosis_assignment;
  for (const auto& [id, label] : resolved) diag[std::to_string(id)] = label;
  const char* mode = held_out == HeldOutStudent::kRegular      ? "regular"
                     : held_out == HeldOutStudent::kFarOffset ? "far"
                                                               : "clone_of_first";
  return Json{{"n_students", n_students},
              {"levels", levels},
              {"records_per_student_per_level", records_per_student_per_level},
              {"signature_separation", signature_separation},
              {"level_drift", level_drift},
              {"diagnosis_assignment", diag},
              {"seed", seed},
              {"held_out", mode},
              {"held_out_offset", held_out_offset}};
}

Dataset GenerateSynthetic(const SyntheticConfig& config) {
  Require(config.n_students >= 1, ErrorCode::kInvalidArgument, "n_students must be >= 1");
  Require(!config.levels.empty(), ErrorCode::kInvalidArgument, "levels must be non-empty");
  Require(config.records_per_student_per_level >= 1, ErrorCode::kInvalidArgument,
          "records_per_student_per_level must be >= 1");
  Require(config.signature_separation >= 0.0 && config.level_drift >= 0.0,
          ErrorCode::kInvalidArgument, "separation and drift must be non-negative");
  std::set<int> levels(config.levels.begin(), config.levels.end());
  Require(levels.size() == config.levels.size(), ErrorCode::kInvalidArgument,
          "levels must be distinct");
  for (int l : levels) {
    Require(l >= 1 && l <= 3, ErrorCode::kInvalidArgument, "levels must lie in {1,2,3}");
  }
  // An empty assignment means the default one.
  const auto diagnoses = config.diagnosis_assignment.empty()
                             ? SyntheticConfig::DefaultDiagnoses(config.n_students)
                             : config.diagnosis_assignment;
  for (int s = 1; s <= config.n_students; ++s) {
    Require(diagnoses.contains(s), ErrorCode::kInvalidArgument,
            "diagnosis_assignment has no entry for student " + std::to_string(s));
  }

  const auto n = static_cast<std::size_t>(config.n_students);
  Rng mean_rng(DeriveSeed(config.seed, "synthetic.means"));
  std::vector<std::array<double, kNumFeatures>> means(n);
  for (auto& m : means) {
    for (double& v : m) v = config.signature_separation * mean_rng.Normal();
  }
  // Drift direction is drawn per (student, level, feature).
  Rng drift_rng(DeriveSeed(config.seed, "synthetic.drift"));
  std::vector<std::array<std::array<double, kNumFeatures>, 4>> drift_sign(n);
  for (auto& per_level : drift_sign) {
    for (auto& signs : per_level) {
      for (double& v : signs) v = (drift_rng.NextU64() >> 63) ? 1.0 : -1.0;
    }
  }

  if (n >= 2 && config.held_out == HeldOutStudent::kCloneOfFirst) {
    means[n - 1] = means[0];
    drift_sign[n - 1] = drift_sign[0];
  } else if (n >= 2 && config.held_out == HeldOutStudent::kFarOffset) {
    std::array<double, kNumFeatures> centre{};
    for (std::size_t s = 0; s + 1 < n; ++s) {
      for (std::size_t j = 0; j < kNumFeatures; ++j) centre[j] += means[s][j] / double(n - 1);
    }
    Rng dir_rng(DeriveSeed(config.seed, "synthetic.held_out"));
    std::array<double, kNumFeatures> dir{};
    double norm = 0.0;
    for (double& v : dir) {
      v = dir_rng.Normal();
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (double& v : dir) v /= norm;
    auto min_distance = [&](double t) {
      std::array<double, kNumFeatures> p{};
      for (std::size_t j = 0; j < kNumFeatures; ++j) p[j] = centre[j] + t * dir[j];
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t s = 0; s + 1 < n; ++s) best = std::min(best, Distance(p, means[s]));
      return best;
    };
    // Walk outwards until clear of every other mean, then bisect to the boundary.
    double hi = config.held_out_offset;
    while (min_distance(hi) < config.held_out_offset) hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (min_distance(mid) < config.held_out_offset ? lo : hi) = mid;
    }
    for (std::size_t j = 0; j < kNumFeatures; ++j) means[n - 1][j] = centre[j] + hi * dir[j];
  }

  Rng noise_rng(DeriveSeed(config.seed, "synthetic.noise"));
  std::vector<GazeRecord> records;
  records.reserve(n * levels.size() *
                  static_cast<std::size_t>(config.records_per_student_per_level));
  for (std::size_t s = 0; s < n; ++s) {
    const auto id = static_cast<std::int64_t>(s + 1);
    for (int level : levels) {
      const double shift = config.level_drift * (level - 1);
      for (int i = 0; i < config.records_per_student_per_level; ++i) {
        std::array<double, kNumFeatures> v{};
        for (std::size_t j = 0; j < kNumFeatures; ++j) {
          const double z =
              means[s][j] + shift * drift_sign[s][level][j] + noise_rng.Normal();
          v[j] = kFeatureBase[j] + kFeatureScale[j] * z;
        }
        GazeRecord r;
        r.timestamp = i * kSampleIntervalMs;
        r.gaze_x = v[0];
        r.gaze_y = v[1];
        r.left_pupil_dia = std::max(v[2], kMinPupilMm);
        r.right_pupil_dia = std::max(v[3], kMinPupilMm);
        r.head_x = v[4];
        r.head_y = v[5];
        r.head_z = v[6];
        r.game_level = level;
        r.diagnosis = diagnoses.at(id);
        r.student_id = id;
        records.push_back(std::move(r));
      }
    }
  }
  return Dataset(std::move(records));
}

LabelMap::LabelMap(std::vector<std::string> labels) : labels_(std::move(labels)) {
  std::sort(labels_.begin(), labels_.end());
  labels_.erase(std::unique(labels_.begin(), labels_.end()), labels_.end());
}

int LabelMap::Encode(std::string_view label) const {
  auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
  if (it == labels_.end() || *it != label) {
    Fail(ErrorCode::kNotFound, "label '" + std::string(label) + "' is not in the map");
  }
  return static_cast<int>(it - labels_.begin());
}

const std::string& LabelMap::Decode(int index) const {
  if (index < 0 || static_cast<std::size_t>(index) >= labels_.size()) {
    Fail(ErrorCode::kInvalidArgument, "label index " + std::to_string(index) +
                                          " outside map of size " +
                                          std::to_string(labels_.size()));
  }
  return labels_[static_cast<std::size_t>(index)];
}

std::string LabelString(const GazeRecord& record, LabelTarget target) {
  return target == LabelTarget::kDiagnosis ? record.diagnosis
                                           : std::to_string(record.student_id);
}

EncodedData EncodeLabels(const Dataset& dataset, LabelTarget target) {
  Require(!dataset.empty(), ErrorCode::kData, "cannot encode an empty dataset");
  std::vector<std::string> raw;
  raw.reserve(dataset.size());
  for (const auto& r : dataset.records()) raw.push_back(LabelString(r, target));
  EncodedData out;
  out.label_map = LabelMap(raw);
  out.features = dataset.FeatureMatrix();
  out.labels.reserve(raw.size());
  for (const auto& label : raw) out.labels.push_back(out.label_map.Encode(label));
  return out;
}

}  // namespace gazeguard
