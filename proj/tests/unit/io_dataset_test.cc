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

#include <sstream>

#include <gtest/gtest.h>

#include "gazeguard/dataset.hpp"
#include "gazeguard/error.hpp"
#include "gazeguard/io.hpp"
#include "test_util.hpp"

namespace gazeguard {
namespace {

constexpr char kHeader[] =
    "timestamp,gaze_x,gaze_y,left_pupil_dia,right_pupil_dia,head_x,head_y,head_z,"
    "game_level,diagnosis,student_id\n";

TEST(FormatDoubleTest, RoundTripsExactly) {
  for (double v : {0.1, 1.0 / 3.0, -12.25, 6.02214076e23, 5e-324}) {
    EXPECT_EQ(*ParseDouble(FormatDouble(v)), v);
  }
}

TEST(ParseTest, RejectsPartialNumbers) {
  EXPECT_FALSE(ParseDouble("1.5x"));
  EXPECT_FALSE(ParseDouble(""));
  EXPECT_FALSE(ParseDouble("nan"));
  EXPECT_FALSE(ParseInt("3.0"));
  EXPECT_EQ(*ParseInt(" 42 "), 42);
}

TEST(CsvTest, SplitsQuotedFields) {
  const auto f = SplitCsvLine(R"(a,"b,c","d ""e""",)");
  ASSERT_EQ(f.size(), 4u);
  EXPECT_EQ(f[1], "b,c");
  EXPECT_EQ(f[2], "d \"e\"");
  EXPECT_EQ(f[3], "");
  EXPECT_EQ(SplitCsvLine(CsvEscape("x,\"y\""))[0], "x,\"y\"");
}

TEST(RejectUnknownKeysTest, NamesTheOffendingKey) {
  try {
    RejectUnknownKeys(Json{{"a", 1}, {"zz", 2}}, {"a"}, "block");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
    EXPECT_NE(std::string(e.what()).find("zz"), std::string::npos);
  }
}

TEST(ParseDatasetTest, DropsInvalidAndDuplicateRows) {
  std::istringstream in(std::string(kHeader) +
                        "1,10,20,3.1,3.2,0,0,600,1,MDI,1\n"
                        "1,10,20,3.1,3.2,0,0,600,1,MDI,1\n"   // duplicate
                        "2,10,20,-3.1,3.2,0,0,600,1,MDI,1\n"  // negative pupil
                        "3,10,20,3.1,3.2,0,0,600,4,MDI,1\n"   // bad level
                        "4,10,abc,3.1,3.2,0,0,600,1,MDI,1\n"
                        "5,11,21,3.0,3.0,1,1,601,2,DD,2\n");
  const LoadResult r = ParseDataset(in);
  EXPECT_EQ(r.rows_read, 6u);
  EXPECT_EQ(r.dropped_duplicate, 1u);
  EXPECT_EQ(r.dropped_invalid, 3u);
  ASSERT_EQ(r.dataset.size(), 2u);
  EXPECT_EQ(r.dataset[1].diagnosis, "DD");
  EXPECT_EQ(r.dataset.StudentIds(), (std::set<std::int64_t>{1, 2}));
}

TEST(ParseDatasetTest, MissingColumnIsDataError) {
  std::istringstream in("timestamp,gaze_x\n1,2\n");
  try {
    ParseDataset(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kData);
  }
}

TEST(ParseDatasetTest, ColumnMapRenames) {
  ColumnMap cols;
  cols.student_id = "subject";
  std::istringstream in(
      "timestamp,gaze_x,gaze_y,left_pupil_dia,right_pupil_dia,head_x,head_y,head_z,"
      "game_level,diagnosis,subject\n1,1,2,3,3,0,0,1,1,MDI,7\n");
  EXPECT_EQ(ParseDataset(in, cols).dataset[0].student_id, 7);
}

TEST(SyntheticTest, ShapeAndDeterminism) {
  SyntheticConfig c;
  c.records_per_student_per_level = 20;
  c.seed = 5;
  const Dataset a = GenerateSynthetic(c);
  EXPECT_EQ(a.size(), 9u * 3u * 20u);
  EXPECT_EQ(a.Levels(), (std::set<int>{1, 2, 3}));
  EXPECT_EQ(a, GenerateSynthetic(c));
  c.seed = 6;
  EXPECT_FALSE(a == GenerateSynthetic(c));
  for (const auto& r : a.records()) {
    EXPECT_GT(r.left_pupil_dia, 0.0);
    EXPECT_EQ(r.diagnosis, r.student_id % 2 == 1 ? "MDI" : "DD");
  }
}

TEST(SyntheticTest, CsvRoundTrip) {
  SyntheticConfig c;
  c.records_per_student_per_level = 5;
  const Dataset a = GenerateSynthetic(c);
  std::istringstream in(DatasetToCsv(a));
  EXPECT_EQ(ParseDataset(in).dataset, a);
}

TEST(SyntheticConfigTest, RejectsUnknownKeys) {
  EXPECT_THROW(SyntheticConfig::FromJson(Json{{"n_student", 3}}), Error);
  const auto c = SyntheticConfig::FromJson(Json{{"n_students", 3}, {"held_out", "far"}});
  EXPECT_EQ(c.held_out, HeldOutStudent::kFarOffset);
  EXPECT_EQ(SyntheticConfig::FromJson(c.ToJson()).ToJson(), c.ToJson());
}

TEST(LabelMapTest, LexicographicOrder) {
  const LabelMap m({"b", "a", "c", "a"});
  EXPECT_EQ(m.labels(), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(m.Encode("c"), 2);
  EXPECT_EQ(m.Decode(0), "a");
  EXPECT_THROW(m.Encode("zz"), Error);
}

TEST(WriteFileAtomicTest, OwnerOnlyPermissions) {
  testing::TempDir dir;
  const auto p = dir / "secret.json";
  WriteFileAtomic(p, "x", true);
  EXPECT_EQ(ReadFile(p), "x");
  const auto perms = std::filesystem::status(p).permissions();
  EXPECT_EQ(perms & std::filesystem::perms::all, std::filesystem::perms::owner_read |
                                                     std::filesystem::perms::owner_write);
}

}  // namespace
}  // namespace gazeguard
