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

/* C interface to the GazeGuard lab. Objects are opaque handles; every fallible
 * call returns a gg_status and leaves a message in gg_last_error(). */

#ifndef GAZEGUARD_H_
#define GAZEGUARD_H_

#include <stddef.h>
#include <stdint.h>

#if defined(GAZEGUARD_BUILDING_LIBRARY)
#define GG_API __attribute__((visibility("default")))
#else
#define GG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gg_status {
  GG_OK = 0,
  GG_ERR_INTERNAL = 1,
  GG_ERR_CONFIG = 2,
  GG_ERR_DATA = 3,
  GG_ERR_AUTH = 4,
  GG_ERR_NOT_FOUND = 5,
  GG_ERR_STALE_EPOCH = 6,
  GG_ERR_LAYOUT = 7,
  GG_ERR_BUFFER_TOO_SMALL = 8,
} gg_status;

typedef struct gg_experiment gg_experiment;
typedef struct gg_vault gg_vault;
typedef struct gg_vault_keys gg_vault_keys;

GG_API const char* gg_version(void);
GG_API const char* gg_status_name(gg_status status);
/* Message of the last failed call on this thread; "" if none. */
GG_API const char* gg_last_error(void);

/* String outputs: `needed` always receives strlen + 1. With a NULL or short
 * buffer the call returns GG_ERR_BUFFER_TOO_SMALL and writes nothing. */

/* config_path may be NULL for defaults. */
GG_API gg_status gg_experiment_create(const char* config_path, gg_experiment** out);
GG_API gg_status gg_experiment_set_seed(gg_experiment* exp, uint64_t seed);
GG_API gg_status gg_experiment_set_output_dir(gg_experiment* exp, const char* dir);
GG_API gg_status gg_experiment_set_data_path(gg_experiment* exp, const char* path);
GG_API gg_status gg_experiment_config_json(const gg_experiment* exp, char* buf, size_t len,
                                           size_t* needed);
/* Resolved vault location and KDF cost from the configuration. */
GG_API gg_status gg_experiment_vault_path(const gg_experiment* exp, char* buf, size_t len,
                                          size_t* needed);
GG_API gg_status gg_experiment_kdf_iterations(const gg_experiment* exp, int* iterations);
/* admin_passphrase is only read by phase2; may be NULL otherwise. */
GG_API gg_status gg_experiment_run(gg_experiment* exp, const char* command,
                                   const char* admin_passphrase);
/* Summary of the last successful run. */
GG_API gg_status gg_experiment_summary_json(const gg_experiment* exp, char* buf, size_t len,
                                            size_t* needed);
GG_API void gg_experiment_free(gg_experiment* exp);

/* kdf_iterations <= 0 selects the default. */
GG_API gg_status gg_vault_create(const char* passphrase, int kdf_iterations, gg_vault** out);
GG_API gg_status gg_vault_open(const char* path, gg_vault** out);
GG_API gg_status gg_vault_save(const gg_vault* vault, const char* path);
GG_API gg_status gg_vault_unlock(const gg_vault* vault, const char* passphrase,
                                 gg_vault_keys** out);
GG_API gg_status gg_vault_issue(gg_vault* vault, const gg_vault_keys* keys, int64_t true_id,
                                char* buf, size_t len, size_t* needed);
GG_API gg_status gg_vault_rotate(gg_vault* vault, uint64_t* new_epoch);
GG_API gg_status gg_vault_epoch(const gg_vault* vault, uint64_t* epoch);
/* keys may be NULL, which is refused as GG_ERR_AUTH.
 * has_epoch == 0 searches the current epoch only. The attempt is appended to
 * the vault's audit log whatever the outcome; save the vault to keep it. */
GG_API gg_status gg_vault_resolve(gg_vault* vault, const gg_vault_keys* keys,
                                  const char* passphrase, const char* dummy, int has_epoch,
                                  uint64_t epoch, int64_t* true_id);
GG_API gg_status gg_vault_verify_audit(const gg_vault* vault, int* ok);
GG_API void gg_vault_free(gg_vault* vault);
GG_API void gg_keys_free(gg_vault_keys* keys);

GG_API double gg_knn_confidence(double distance);
/* MD5-derived id in [0, 10000) of the "%.6f" canonical feature string. */
GG_API gg_status gg_feature_hash_id(const double* features, size_t n, uint32_t* id);
/* out[p] = sum_s c_s * w[s][p]; sizes NULL gives uniform weights. */
GG_API gg_status gg_fedavg(const double* const* client_weights, const uint64_t* sizes,
                           size_t n_clients, size_t n_params, double* out);

#ifdef __cplusplus
}
#endif

#endif /* GAZEGUARD_H_ */
