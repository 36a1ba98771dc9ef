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

#ifndef GAZEGUARD_DATASET_HPP_
#define GAZEGUARD_DATASET_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gazeguard/io.hpp"
#include "gazeguard/matrix.hpp"

namespace gazeguard {

inline constexpr std::size_t kNumFeatures = 7;
inline constexpr std::array<std::string_view, kNumFeatures> kFeatureNames = {
    "gaze_x", "gaze_y", "left_pupil_dia", "right_pupil_dia",
    "head_x", "head_y", "head_z"};

/// One eye-tracking sample. Level and student id are labels, never features.
struct GazeRecord {
  std::int64_t timestamp = 0;
  double gaze_x = 0.0;
  double gaze_y = 0.0;
  double left_pupil_dia = 0.0;
  double right_pupil_dia = 0.0;
  double head_x = 0.0;
  double head_y = 0.0;
  double head_z = 0.0;
  int game_level = 1;
  std::string diagnosis;
  std::int64_t student_id = 1;

  std::array<double, kNumFeatures> Features() const {
    return {gaze_x, gaze_y, left_pupil_dia, right_pupil_dia, head_x, head_y, head_z};
  }

  friend bool operator==(const GazeRecord&, const GazeRecord&) = default;
};

class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<GazeRecord> records) : records_(std::move(records)) {}

  const std::vector<GazeRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const GazeRecord& operator[](std::size_t i) const { return records_[i]; }

  std::set<std::int64_t> StudentIds() const;
  std::set<int> Levels() const;
  Dataset Subset(std::span<const std::size_t> indices) const;
  /// N x 7 matrix in kFeatureNames order.
  Matrix FeatureMatrix() const;
  Matrix FeatureMatrix(std::span<const std::size_t> indices) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<GazeRecord> records_;
};

/// CSV header names for each field; defaults match the canonical schema.
struct ColumnMap {
  std::string timestamp = "timestamp";
  std::string gaze_x = "gaze_x";
  std::string gaze_y = "gaze_y";
  std::string left_pupil_dia = "left_pupil_dia";
  std::string right_pupil_dia = "right_pupil_dia";
  std::string head_x = "head_x";
  std::string head_y = "head_y";
  std::string head_z = "head_z";
  std::string game_level = "game_level";
  std::string diagnosis = "diagnosis";
  std::string student_id = "student_id";

  static ColumnMap FromJson(const Json& doc);
  Json ToJson() const;
};

struct LoadResult {
  Dataset dataset;
  std::size_t rows_read = 0;
  std::size_t dropped_invalid = 0;
  std::size_t dropped_duplicate = 0;

  std::size_t dropped() const { return dropped_invalid + dropped_duplicate; }
};

/// Parses and cleans CSV: rows with missing, unparsable or out-of-domain
/// fields are dropped, then exact duplicates are dropped (first kept).
LoadResult ParseDataset(std::istream& in, const ColumnMap& columns = {});
LoadResult LoadDataset(const std::filesystem::path& path, const ColumnMap& columns = {});

std::string DatasetToCsv(const Dataset& dataset, const ColumnMap& columns = {});

enum class HeldOutStudent {
  kRegular,       // drawn like everyone else
  kFarOffset,     // mean pushed >= held_out_offset from every other mean
  kCloneOfFirst,  // same signature as student 1
};

struct SyntheticConfig {
  int n_students = 9;
  std::vector<int> levels = {1, 2, 3};
  int records_per_student_per_level = 100;
  /// Spread of per-student means, in within-student standard deviations.
  double signature_separation = 4.0;
  /// Per-feature mean shift magnitude added per level step above level 1.
  double level_drift = 0.0;
  std::map<std::int64_t, std::string> diagnosis_assignment;
  std::uint64_t seed = 42;
  /// Applies to the highest student id.
  HeldOutStudent held_out = HeldOutStudent::kRegular;
  double held_out_offset = 6.0;

  /// Alternating MDI/DD labels for ids 1..n_students.
  static std::map<std::int64_t, std::string> DefaultDiagnoses(int n_students);

  static SyntheticConfig FromJson(const Json& doc);
  Json ToJson() const;
};

Dataset GenerateSynthetic(const SyntheticConfig& config);

enum class LabelTarget { kDiagnosis, kStudentId };

/// Bijection between label strings and 0-based indices in lexicographic order.
class LabelMap {
 public:
  LabelMap() = default;
  explicit LabelMap(std::vector<std::string> labels);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  int Encode(std::string_view label) const;
  const std::string& Decode(int index) const;

 private:
  std::vector<std::string> labels_;
};

struct EncodedData {
  Matrix features;
  std::vector<int> labels;
  LabelMap label_map;
};

std::string LabelString(const GazeRecord& record, LabelTarget target);
EncodedData EncodeLabels(const Dataset& dataset, LabelTarget target);

}  // namespace gazeguard

#endif  // GAZEGUARD_DATASET_HPP_
