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

#ifndef GAZEGUARD_VAULT_HPP_
#define GAZEGUARD_VAULT_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gazeguard/crypto.hpp"
#include "gazeguard/io.hpp"

namespace gazeguard {

/// The two vault secrets. Held in memory only; zeroed on destruction.
struct VaultKeys {
  Bytes ek1;  // dummy-id mapping key
  Bytes ek2;  // administrator unlock key

  VaultKeys() = default;
  VaultKeys(Bytes k1, Bytes k2) : ek1(std::move(k1)), ek2(std::move(k2)) {}
  VaultKeys(const VaultKeys&) = default;
  VaultKeys& operator=(const VaultKeys&) = default;
  ~VaultKeys();
};

/// Lowercase name words used for dummy ids.
std::span<const std::string_view> DummyWords();

/// Keyed pseudorandom dummy for (epoch, id) at a given re-draw counter:
/// HMAC-SHA256(ek1, "gazeguard.dummy.v1" || u64 epoch || i64 id || u32 counter),
/// word = first 8 bytes mod |words|, suffix = next 8 bytes mod 1000.
std::string DeriveDummy(std::span<const std::uint8_t> ek1, std::uint64_t epoch,
                        std::int64_t true_id, std::uint32_t counter);

/// ^[a-z]+[0-9]{3}$
bool IsDummyFormatted(std::string_view name);

struct VaultOptions {
  int kdf_iterations = 210000;
  Bytes salt;  // empty: random
  Bytes ek1;   // empty: random; fixed keys are a test hook
};

struct AuditEntry {
  std::uint64_t seq = 0;
  std::string timestamp;
  std::uint64_t epoch = 0;
  std::string dummy;
  std::string outcome;
  std::string prev_hash;
  std::string hash;
};

class Vault {
 public:
  static Vault Create(std::string_view passphrase, const VaultOptions& options = {});
  static Vault FromJson(const Json& doc);
  static Vault Load(const std::filesystem::path& path);

  Json ToJson() const;
  /// Atomic write with owner-only permissions.
  void Save(const std::filesystem::path& path) const;

  /// Verifies the passphrase and recovers both keys; kUnauthorized otherwise.
  VaultKeys Unlock(std::string_view passphrase) const;

  /// Dummy for `true_id` in the current epoch. Repeat calls return the same
  /// dummy unless the epoch-separation rule re-draws the lowest id.
  std::string Issue(std::int64_t true_id, const VaultKeys& keys);

  std::uint64_t Rotate();
  std::uint64_t epoch() const { return epoch_; }
  std::size_t EpochSize(std::uint64_t epoch) const;
  /// Dummies issued in an epoch, in issue order.
  std::vector<std::string> EpochDummies(std::uint64_t epoch) const;

  /// Without `epoch`, the current epoch is searched and a dummy that only exists
  /// in an older epoch raises kStaleEpoch. Every call is audited.
  std::int64_t Resolve(std::string_view dummy, std::optional<std::uint64_t> epoch,
                       const VaultKeys& keys, std::string_view passphrase);

  const std::vector<AuditEntry>& audit_log() const { return audit_; }
  bool VerifyAuditChain() const;

 private:
  struct Entry {
    std::string tag;  // HMAC(ek1, epoch || id), hex
    std::string dummy;
    std::uint64_t sealed = 0;  // id XOR HMAC(ek2, epoch || dummy)
  };
  struct EpochTable {
    std::uint64_t epoch = 0;
    std::vector<Entry> entries;
    std::unordered_map<std::string, std::size_t> by_tag;
    std::unordered_map<std::string, std::size_t> by_dummy;

    void Reindex();
  };

  void CheckKeys(const VaultKeys& keys) const;
  Bytes DeriveMaterial(std::string_view passphrase) const;
  bool CredentialOk(std::string_view passphrase) const;
  std::int64_t Unseal(const Entry& e, std::uint64_t epoch, const VaultKeys& keys) const;
  void EnforceEpochSeparation(const VaultKeys& keys);
  void Audit(std::uint64_t epoch, std::string_view dummy, std::string_view outcome);
  EpochTable& Table(std::uint64_t epoch);
  const EpochTable* FindTable(std::uint64_t epoch) const;

  int kdf_iterations_ = 0;
  Bytes salt_;
  Bytes verifier_;
  Bytes ek1_wrapped_;
  Bytes ek1_check_;
  Bytes ek2_check_;
  std::uint64_t epoch_ = 0;
  std::vector<EpochTable> tables_;
  std::vector<AuditEntry> audit_;
};

}  // namespace gazeguard

#endif  // GAZEGUARD_VAULT_HPP_
