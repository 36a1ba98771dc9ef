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

#include <cmath>
#include <string>

#include <gtest/gtest.h>

#include "gazeguard.h"
#include "test_util.hpp"

namespace {

using gazeguard::testing::TempDir;

std::string Summary(const gg_experiment* exp) {
  size_t needed = 0;
  EXPECT_EQ(gg_experiment_summary_json(exp, nullptr, 0, &needed), GG_ERR_BUFFER_TOO_SMALL);
  std::string buf(needed, '\0');
  EXPECT_EQ(gg_experiment_summary_json(exp, buf.data(), buf.size(), &needed), GG_OK);
  buf.resize(needed - 1);
  return buf;
}

TEST(CApiTest, VersionAndStatusNames) {
  EXPECT_STREQ(gg_version(), "0.1.0");
  EXPECT_STREQ(gg_status_name(GG_ERR_AUTH), "auth");
  EXPECT_STREQ(gg_status_name(static_cast<gg_status>(99)), "unknown");
}

TEST(CApiTest, NullArgumentsAreConfigErrors) {
  EXPECT_EQ(gg_experiment_create(nullptr, nullptr), GG_ERR_CONFIG);
  EXPECT_NE(std::string(gg_last_error()).find("null"), std::string::npos);
  EXPECT_EQ(gg_vault_open(nullptr, nullptr), GG_ERR_CONFIG);
  gg_experiment_free(nullptr);
  gg_vault_free(nullptr);
  gg_keys_free(nullptr);
}

TEST(CApiTest, MissingConfigFile) {
  gg_experiment* exp = nullptr;
  EXPECT_EQ(gg_experiment_create("/nonexistent/config.json", &exp), GG_ERR_CONFIG);
  EXPECT_EQ(exp, nullptr);
}

TEST(CApiTest, RunsAScenario) {
  TempDir dir;
  gg_experiment* exp = nullptr;
  ASSERT_EQ(gg_experiment_create(nullptr, &exp), GG_OK);
  EXPECT_EQ(gg_experiment_summary_json(exp, nullptr, 0, nullptr), GG_ERR_NOT_FOUND);
  ASSERT_EQ(gg_experiment_set_seed(exp, 5), GG_OK);
  ASSERT_EQ(gg_experiment_set_output_dir(exp, dir.path().c_str()), GG_OK);
  EXPECT_EQ(gg_experiment_run(exp, "scenario1", nullptr), GG_OK) << gg_last_error();
  EXPECT_NE(Summary(exp).find("\"scenario1\""), std::string::npos);
  EXPECT_EQ(gg_experiment_run(exp, "bogus", nullptr), GG_ERR_CONFIG);
  ASSERT_EQ(gg_experiment_set_data_path(exp, "/nonexistent.csv"), GG_OK);
  EXPECT_EQ(gg_experiment_run(exp, "scenario1", nullptr), GG_ERR_DATA);
  gg_experiment_free(exp);
}

TEST(CApiTest, VaultLifecycle) {
  TempDir dir;
  const std::string path = (dir / "vault.json").string();
  gg_vault* vault = nullptr;
  ASSERT_EQ(gg_vault_create("pw", 1000, &vault), GG_OK);
  gg_vault_keys* keys = nullptr;
  EXPECT_EQ(gg_vault_unlock(vault, "nope", &keys), GG_ERR_AUTH);
  EXPECT_EQ(keys, nullptr);
  ASSERT_EQ(gg_vault_unlock(vault, "pw", &keys), GG_OK);

  char small[4];
  size_t needed = 0;
  EXPECT_EQ(gg_vault_issue(vault, keys, 11, small, sizeof small, &needed),
            GG_ERR_BUFFER_TOO_SMALL);
  std::string dummy(needed, '\0');
  ASSERT_EQ(gg_vault_issue(vault, keys, 11, dummy.data(), dummy.size(), &needed), GG_OK);
  dummy.resize(needed - 1);

  int64_t id = 0;
  EXPECT_EQ(gg_vault_resolve(vault, keys, "pw", dummy.c_str(), 0, 0, &id), GG_OK);
  EXPECT_EQ(id, 11);
  EXPECT_EQ(gg_vault_resolve(vault, nullptr, "pw", dummy.c_str(), 0, 0, &id), GG_ERR_AUTH);
  uint64_t epoch = 0;
  ASSERT_EQ(gg_vault_rotate(vault, &epoch), GG_OK);
  EXPECT_EQ(epoch, 1u);
  EXPECT_EQ(gg_vault_resolve(vault, keys, "pw", dummy.c_str(), 0, 0, &id), GG_ERR_STALE_EPOCH);
  EXPECT_EQ(gg_vault_resolve(vault, keys, "pw", "zzz000", 1, 0, &id), GG_ERR_NOT_FOUND);
  ASSERT_EQ(gg_vault_save(vault, path.c_str()), GG_OK);
  gg_keys_free(keys);
  gg_vault_free(vault);

  ASSERT_EQ(gg_vault_open(path.c_str(), &vault), GG_OK);
  ASSERT_EQ(gg_vault_epoch(vault, &epoch), GG_OK);
  EXPECT_EQ(epoch, 1u);
  int ok = 0;
  ASSERT_EQ(gg_vault_verify_audit(vault, &ok), GG_OK);
  EXPECT_EQ(ok, 1);
  ASSERT_EQ(gg_vault_unlock(vault, "pw", &keys), GG_OK);
  EXPECT_EQ(gg_vault_resolve(vault, keys, "pw", dummy.c_str(), 1, 0, &id), GG_OK);
  EXPECT_EQ(id, 11);
  gg_keys_free(keys);
  gg_vault_free(vault);
}

TEST(CApiTest, Helpers) {
  EXPECT_NEAR(gg_knn_confidence(2.69), 0.06788093937176144, 1e-15);
  const double f[2] = {1.0, 2.0};
  uint32_t id = 0;
  ASSERT_EQ(gg_feature_hash_id(f, 2, &id), GG_OK);
  EXPECT_EQ(id, 5007u);

  const double a[3] = {1, 2, 3};
  const double b[3] = {5, 6, 7};
  const double* ws[2] = {a, b};
  const uint64_t sizes[2] = {3, 1};
  double out[3];
  ASSERT_EQ(gg_fedavg(ws, sizes, 2, 3, out), GG_OK);
  EXPECT_DOUBLE_EQ(out[0], 2.0);
  ASSERT_EQ(gg_fedavg(ws, nullptr, 2, 3, out), GG_OK);
  EXPECT_DOUBLE_EQ(out[2], 5.0);
  EXPECT_EQ(gg_fedavg(ws, nullptr, 0, 3, out), GG_ERR_CONFIG);
}

}  // namespace
