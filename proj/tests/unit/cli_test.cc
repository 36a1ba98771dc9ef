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

// Runs the installed CLI binary and checks exit codes and artifacts.

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "json.hpp"
#include "test_util.hpp"

namespace {

using gazeguard::testing::TempDir;
using Json = nlohmann::json;

struct Result {
  int code = -1;
  std::string out;
};

// `env` is prepended to the command line, e.g. "GAZEGUARD_ADMIN_PASSPHRASE=x".
Result RunCli(const std::string& args, const std::string& env = "") {
  const std::string cmd = "env -u GAZEGUARD_ADMIN_PASSPHRASE " + env + " " +
                          GAZEGUARD_CLI_PATH + " " + args + " 2>/dev/null </dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string Slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::ofstream(dir_ / "small.json") << R"({
      "synthetic": {"records_per_student_per_level": 20, "level_drift": 2.0},
      "scenario": {"forest": {"n_estimators": 10}, "cv_folds": 3},
      "phase2": {"rounds": 2, "epochs": 3, "folds": 2},
      "vault": {"kdf_iterations": 1000}
    })";
  }
  std::string Common() const {
    return "--config " + (dir_ / "small.json").string() + " --out " + (dir_ / "out").string();
  }

  TempDir dir_;
};

constexpr char kPass[] = "GAZEGUARD_ADMIN_PASSPHRASE=sesame";

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(RunCli("").code, 2);
  EXPECT_EQ(RunCli("frobnicate").code, 2);
  EXPECT_EQ(RunCli("scenario1 --seed notanumber").code, 2);
  EXPECT_EQ(RunCli("--help").code, 0);
}

TEST_F(CliTest, BadConfigExitsTwo) {
  std::ofstream(dir_ / "bad.json") << R"({"scenario": {"unknown_knob": 1}})";
  EXPECT_EQ(RunCli("scenario1 --config " + (dir_ / "bad.json").string()).code, 2);
  EXPECT_EQ(RunCli("scenario1 --config " + (dir_ / "absent.json").string()).code, 2);
}

TEST_F(CliTest, MissingDataExitsThree) {
  EXPECT_EQ(RunCli("scenario1 " + Common() + " --data " + (dir_ / "none.csv").string()).code, 3);
}

TEST_F(CliTest, ReportWithoutInputsExitsFive) {
  EXPECT_EQ(RunCli("report " + Common()).code, 5);
}

TEST_F(CliTest, SynthAndScenarioPrintSummary) {
  const Result r = RunCli("synth " + Common() + " --seed 4");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(Json::parse(r.out)["command"], "synth");
  const std::string csv = (dir_ / "out/synth/dataset.csv").string();
  const Result s = RunCli("scenario2 " + Common() + " --data " + csv);
  ASSERT_EQ(s.code, 0);
  EXPECT_TRUE(Json::parse(s.out)["metrics"].contains("random_forest"));
}

TEST_F(CliTest, SameSeedSameBytes) {
  TempDir other;
  ASSERT_EQ(RunCli("scenario3 " + Common() + " --seed 8").code, 0);
  ASSERT_EQ(RunCli("scenario3 --config " + (dir_ / "small.json").string() + " --out " +
                other.path().string() + " --seed 8")
                .code,
            0);
  EXPECT_EQ(Slurp(dir_ / "out/scenario3/report.json"),
            Slurp(other / "scenario3/report.json"));
}

TEST_F(CliTest, VaultWorkflow) {
  EXPECT_EQ(RunCli("vault-init " + Common()).code, 4);  // no passphrase
  ASSERT_EQ(RunCli("vault-init " + Common(), kPass).code, 0);
  EXPECT_EQ(RunCli("vault-init " + Common(), kPass).code, 2);  // already there
  EXPECT_EQ(RunCli("phase2 " + Common()).code, 4);

  const Result p = RunCli("phase2 " + Common(), kPass);
  ASSERT_EQ(p.code, 0);
  EXPECT_EQ(Json::parse(p.out)["metrics"]["privacy_audit_passed"], true);
  const Json report = Json::parse(Slurp(dir_ / "out/phase2/report.json"));
  const std::string dummy = report["labels"][0];

  const Result ok = RunCli("resolve " + dummy + " " + Common(), kPass);
  ASSERT_EQ(ok.code, 0);
  const auto id = Json::parse(ok.out)["true_id"].get<int>();
  EXPECT_GE(id, 1);
  EXPECT_LE(id, 9);
  EXPECT_EQ(RunCli("resolve " + dummy + " " + Common(), "GAZEGUARD_ADMIN_PASSPHRASE=bad").code, 4);
  EXPECT_EQ(RunCli("resolve " + dummy + " " + Common()).code, 4);
  EXPECT_EQ(RunCli("resolve nobody000 " + Common(), kPass).code, 5);
  EXPECT_EQ(RunCli("rotate " + Common(), "GAZEGUARD_ADMIN_PASSPHRASE=bad").code, 4);
  ASSERT_EQ(RunCli("rotate " + Common(), kPass).code, 0);
  EXPECT_EQ(RunCli("resolve " + dummy + " " + Common(), kPass).code, 5);  // stale epoch
  EXPECT_EQ(RunCli("resolve " + dummy + " --epoch 0 " + Common(), kPass).code, 0);

  // Denials and misses are on the audit trail too.
  const Json vault = Json::parse(Slurp(dir_ / "out/vault.json"));
  std::vector<std::string> outcomes;
  for (const auto& e : vault["audit_log"]) outcomes.push_back(e["outcome"]);
  EXPECT_EQ(outcomes, (std::vector<std::string>{"resolved", "denied", "denied", "not_found",
                                                "stale_epoch", "resolved"}));
}

}  // namespace
