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

#include "gazeguard.h"

#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "gazeguard/cluster.hpp"
#include "gazeguard/error.hpp"
#include "gazeguard/experiments.hpp"
#include "gazeguard/federated.hpp"
#include "gazeguard/id_assignment.hpp"
#include "gazeguard/vault.hpp"

struct gg_experiment {
  gazeguard::ExperimentConfig config;
  std::string summary;
};

struct gg_vault {
  gazeguard::Vault vault;
};

struct gg_vault_keys {
  gazeguard::VaultKeys keys;
};

namespace {

thread_local std::string g_last_error;

gg_status ToStatus(gazeguard::ErrorCode code) {
  using gazeguard::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidArgument: return GG_ERR_CONFIG;
    case ErrorCode::kData: return GG_ERR_DATA;
    case ErrorCode::kUnauthorized: return GG_ERR_AUTH;
    case ErrorCode::kNotFound: return GG_ERR_NOT_FOUND;
    case ErrorCode::kStaleEpoch: return GG_ERR_STALE_EPOCH;
    case ErrorCode::kLayoutMismatch: return GG_ERR_LAYOUT;
    case ErrorCode::kInternal: break;
  }
  return GG_ERR_INTERNAL;
}

gg_status SetError(gg_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
gg_status Guard(F&& body) {
  try {
    g_last_error.clear();
    body();
    return GG_OK;
  } catch (const gazeguard::Error& e) {
    return SetError(ToStatus(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return SetError(GG_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return SetError(GG_ERR_INTERNAL, e.what());
  } catch (...) {
    return SetError(GG_ERR_INTERNAL, "unknown error");
  }
}

void NotNull(const void* p, const char* what) {
  gazeguard::Require(p != nullptr, gazeguard::ErrorCode::kInvalidArgument,
                     std::string(what) + " must not be null");
}

gg_status CopyOut(const std::string& value, char* buf, size_t len, size_t* needed) {
  if (needed) *needed = value.size() + 1;
  if (buf == nullptr || len < value.size() + 1) {
    return SetError(GG_ERR_BUFFER_TOO_SMALL, "buffer too small");
  }
  std::memcpy(buf, value.c_str(), value.size() + 1);
  return GG_OK;
}

}  // namespace

extern "C" {

const char* gg_version(void) { return "0.1.0"; }

const char* gg_status_name(gg_status status) {
  switch (status) {
    case GG_OK: return "ok";
    case GG_ERR_INTERNAL: return "internal";
    case GG_ERR_CONFIG: return "config";
    case GG_ERR_DATA: return "data";
    case GG_ERR_AUTH: return "auth";
    case GG_ERR_NOT_FOUND: return "not_found";
    case GG_ERR_STALE_EPOCH: return "stale_epoch";
    case GG_ERR_LAYOUT: return "layout";
    case GG_ERR_BUFFER_TOO_SMALL: return "buffer_too_small";
  }
  return "unknown";
}

const char* gg_last_error(void) { return g_last_error.c_str(); }

gg_status gg_experiment_create(const char* config_path, gg_experiment** out) {
  return Guard([&] {
    NotNull(out, "out");
    *out = nullptr;
    auto exp = std::make_unique<gg_experiment>();
    if (config_path != nullptr) exp->config = gazeguard::ExperimentConfig::Load(config_path);
    *out = exp.release();
  });
}

gg_status gg_experiment_set_seed(gg_experiment* exp, uint64_t seed) {
  return Guard([&] {
    NotNull(exp, "experiment");
    exp->config.seed = seed;
  });
}

gg_status gg_experiment_set_output_dir(gg_experiment* exp, const char* dir) {
  return Guard([&] {
    NotNull(exp, "experiment");
    NotNull(dir, "dir");
    gazeguard::Require(*dir != '\0', gazeguard::ErrorCode::kInvalidArgument,
                       "output dir must not be empty");
    exp->config.output_dir = dir;
  });
}

gg_status gg_experiment_set_data_path(gg_experiment* exp, const char* path) {
  return Guard([&] {
    NotNull(exp, "experiment");
    exp->config.data_path = path ? path : "";
  });
}

gg_status gg_experiment_config_json(const gg_experiment* exp, char* buf, size_t len,
                                    size_t* needed) {
  std::string doc;
  const gg_status st = Guard([&] {
    NotNull(exp, "experiment");
    doc = exp->config.ToJson().dump(2);
  });
  return st == GG_OK ? CopyOut(doc, buf, len, needed) : st;
}

gg_status gg_experiment_vault_path(const gg_experiment* exp, char* buf, size_t len,
                                   size_t* needed) {
  std::string path;
  const gg_status st = Guard([&] {
    NotNull(exp, "experiment");
    path = exp->config.VaultPath().string();
  });
  return st == GG_OK ? CopyOut(path, buf, len, needed) : st;
}

gg_status gg_experiment_kdf_iterations(const gg_experiment* exp, int* iterations) {
  return Guard([&] {
    NotNull(exp, "experiment");
    NotNull(iterations, "iterations");
    *iterations = exp->config.vault.kdf_iterations;
  });
}

gg_status gg_experiment_run(gg_experiment* exp, const char* command,
                            const char* admin_passphrase) {
  return Guard([&] {
    NotNull(exp, "experiment");
    NotNull(command, "command");
    exp->config.Validate();
    exp->summary = gazeguard::RunExperiment(command, exp->config,
                                            admin_passphrase ? admin_passphrase : "")
                       .dump(2);
  });
}

gg_status gg_experiment_summary_json(const gg_experiment* exp, char* buf, size_t len,
                                     size_t* needed) {
  if (exp == nullptr) return SetError(GG_ERR_CONFIG, "experiment must not be null");
  if (exp->summary.empty()) return SetError(GG_ERR_NOT_FOUND, "no run has completed");
  return CopyOut(exp->summary, buf, len, needed);
}

void gg_experiment_free(gg_experiment* exp) { delete exp; }

gg_status gg_vault_create(const char* passphrase, int kdf_iterations, gg_vault** out) {
  return Guard([&] {
    NotNull(out, "out");
    NotNull(passphrase, "passphrase");
    *out = nullptr;
    gazeguard::VaultOptions opts;
    if (kdf_iterations > 0) opts.kdf_iterations = kdf_iterations;
    *out = new gg_vault{gazeguard::Vault::Create(passphrase, opts)};
  });
}

gg_status gg_vault_open(const char* path, gg_vault** out) {
  return Guard([&] {
    NotNull(out, "out");
    NotNull(path, "path");
    *out = nullptr;
    *out = new gg_vault{gazeguard::Vault::Load(path)};
  });
}

gg_status gg_vault_save(const gg_vault* vault, const char* path) {
  return Guard([&] {
    NotNull(vault, "vault");
    NotNull(path, "path");
    vault->vault.Save(path);
  });
}

gg_status gg_vault_unlock(const gg_vault* vault, const char* passphrase, gg_vault_keys** out) {
  return Guard([&] {
    NotNull(vault, "vault");
    NotNull(out, "out");
    *out = nullptr;
    *out = new gg_vault_keys{vault->vault.Unlock(passphrase ? passphrase : "")};
  });
}

gg_status gg_vault_issue(gg_vault* vault, const gg_vault_keys* keys, int64_t true_id,
                         char* buf, size_t len, size_t* needed) {
  std::string dummy;
  const gg_status st = Guard([&] {
    NotNull(vault, "vault");
    NotNull(keys, "keys");
    // Issue is idempotent, so retrying with a larger buffer is safe.
    dummy = vault->vault.Issue(true_id, keys->keys);
  });
  return st == GG_OK ? CopyOut(dummy, buf, len, needed) : st;
}

gg_status gg_vault_rotate(gg_vault* vault, uint64_t* new_epoch) {
  return Guard([&] {
    NotNull(vault, "vault");
    const std::uint64_t e = vault->vault.Rotate();
    if (new_epoch) *new_epoch = e;
  });
}

gg_status gg_vault_epoch(const gg_vault* vault, uint64_t* epoch) {
  return Guard([&] {
    NotNull(vault, "vault");
    NotNull(epoch, "epoch");
    *epoch = vault->vault.epoch();
  });
}

gg_status gg_vault_resolve(gg_vault* vault, const gg_vault_keys* keys, const char* passphrase,
                           const char* dummy, int has_epoch, uint64_t epoch,
                           int64_t* true_id) {
  return Guard([&] {
    NotNull(vault, "vault");
    NotNull(dummy, "dummy");
    NotNull(true_id, "true_id");
    const std::optional<std::uint64_t> e =
        has_epoch ? std::optional<std::uint64_t>(epoch) : std::nullopt;
    const gazeguard::VaultKeys none;
    *true_id = vault->vault.Resolve(dummy, e, keys ? keys->keys : none,
                                    passphrase ? passphrase : "");
  });
}

gg_status gg_vault_verify_audit(const gg_vault* vault, int* ok) {
  return Guard([&] {
    NotNull(vault, "vault");
    NotNull(ok, "ok");
    *ok = vault->vault.VerifyAuditChain() ? 1 : 0;
  });
}

void gg_vault_free(gg_vault* vault) { delete vault; }

void gg_keys_free(gg_vault_keys* keys) { delete keys; }

double gg_knn_confidence(double distance) {
  return gazeguard::ConfidenceFromDistance(distance);
}

gg_status gg_feature_hash_id(const double* features, size_t n, uint32_t* id) {
  return Guard([&] {
    NotNull(features, "features");
    NotNull(id, "id");
    const auto value =
        gazeguard::FeatureHashValue(gazeguard::CanonicalFeatureString({features, n}));
    *id = static_cast<uint32_t>(value % gazeguard::kHashIdSpace);
  });
}

gg_status gg_fedavg(const double* const* client_weights, const uint64_t* sizes,
                    size_t n_clients, size_t n_params, double* out) {
  return Guard([&] {
    NotNull(client_weights, "client_weights");
    NotNull(out, "out");
    gazeguard::Require(n_clients > 0 && n_params > 0, gazeguard::ErrorCode::kInvalidArgument,
                       "need at least one client and one parameter");
    std::vector<gazeguard::ModelWeights> ws(n_clients);
    for (size_t s = 0; s < n_clients; ++s) {
      NotNull(client_weights[s], "client weight vector");
      ws[s].layout = {{"w", 1, static_cast<int>(n_params), true}};
      ws[s].tensors = {Eigen::Map<const gazeguard::Matrix>(client_weights[s], 1,
                                                           static_cast<Eigen::Index>(n_params))};
    }
    std::optional<std::span<const std::size_t>> span;
    std::vector<std::size_t> sz;
    if (sizes != nullptr) {
      sz.assign(sizes, sizes + n_clients);
      span = std::span<const std::size_t>(sz);
    }
    const auto avg = gazeguard::FedAvg(ws, span);
    std::memcpy(out, avg.tensors[0].data(), n_params * sizeof(double));
  });
}

}  // extern "C"
