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

#include "gazeguard/vault.hpp"

#include <openssl/crypto.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <map>

#include "gazeguard/error.hpp"

namespace gazeguard {
namespace {

constexpr std::string_view kWords[] = {
    "mulan",    "olaf",      "ariel",    "belle",    "jasmine",  "aurora",   "moana",
    "elsa",     "anna",      "simba",    "nala",     "timon",    "pumbaa",   "baloo",
    "bambi",    "dumbo",     "goofy",    "pluto",    "donald",   "daisy",    "minnie",
    "mickey",   "stitch",    "lilo",     "tiana",    "rapunzel", "merida",   "hercules",
    "tarzan",   "aladdin",   "genie",    "abu",      "rajah",    "sebastian", "flounder",
    "ursula",   "gaston",    "lumiere",  "cogsworth", "chip",    "dale",     "scar",
    "rafiki",   "zazu",      "kovu",     "kiara",    "meeko",    "flit",     "esmeralda",
    "mushu",    "shang",     "kuzco",    "pacha",    "kronk",    "milo",     "kida",
    "nemo",     "dory",      "marlin",   "woody",    "buzz",     "jessie",   "rex",
    "hamm",     "remy",      "carl",     "russell",  "dug",      "joy",      "bingbong",
    "maui",     "heihei",
};

constexpr std::string_view kDummyDomain = "gazeguard.dummy.v1";
constexpr std::string_view kTagDomain = "gazeguard.tag.v1";
constexpr std::string_view kSealDomain = "gazeguard.seal.v1";
constexpr std::string_view kEk1Check = "gazeguard.ek1.check";
constexpr std::string_view kEk2Check = "gazeguard.ek2.check";
constexpr std::size_t kKeyBytes = 32;
constexpr std::string_view kGenesisHash =
    "0000000000000000000000000000000000000000000000000000000000000000";

Bytes Mac(std::span<const std::uint8_t> key, std::string_view domain, std::uint64_t epoch,
          std::int64_t id) {
  Bytes msg;
  AppendString(msg, domain);
  AppendU64(msg, epoch);
  AppendU64(msg, static_cast<std::uint64_t>(id));
  return HmacSha256(key, msg);
}

Bytes CheckValue(std::span<const std::uint8_t> key, std::string_view domain) {
  Bytes msg;
  AppendString(msg, domain);
  return HmacSha256(key, msg);
}

std::uint64_t SealPad(std::span<const std::uint8_t> ek2, std::uint64_t epoch,
                      std::string_view dummy) {
  Bytes msg;
  AppendString(msg, kSealDomain);
  AppendU64(msg, epoch);
  AppendString(msg, dummy);
  return ReadU64(HmacSha256(ek2, msg));
}

std::string UtcNow() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string AuditHash(const AuditEntry& e) {
  return Sha256Hex(std::to_string(e.seq) + "|" + e.timestamp + "|" + std::to_string(e.epoch) +
                   "|" + e.dummy + "|" + e.outcome + "|" + e.prev_hash);
}

Bytes HexField(const Json& doc, const char* key) {
  return FromHex(doc.at(key).get<std::string>());
}

}  // namespace

VaultKeys::~VaultKeys() {
  if (!ek1.empty()) OPENSSL_cleanse(ek1.data(), ek1.size());
  if (!ek2.empty()) OPENSSL_cleanse(ek2.data(), ek2.size());
}

std::span<const std::string_view> DummyWords() { return kWords; }

std::string DeriveDummy(std::span<const std::uint8_t> ek1, std::uint64_t epoch,
                        std::int64_t true_id, std::uint32_t counter) {
  Bytes msg;
  AppendString(msg, kDummyDomain);
  AppendU64(msg, epoch);
  AppendU64(msg, static_cast<std::uint64_t>(true_id));
  AppendU32(msg, counter);
  const Bytes tag = HmacSha256(ek1, msg);
  const auto word = kWords[ReadU64(tag) % std::size(kWords)];
  const auto suffix = ReadU64(std::span(tag).subspan(8)) % 1000;
  char buf[8];
  std::snprintf(buf, sizeof buf, "%03u", static_cast<unsigned>(suffix));
  return std::string(word) + buf;
}

bool IsDummyFormatted(std::string_view name) {
  if (name.size() < 4) return false;
  const std::size_t letters = name.size() - 3;
  for (std::size_t i = 0; i < name.size(); ++i) {
    const char c = name[i];
    const bool ok = i < letters ? (c >= 'a' && c <= 'z') : (c >= '0' && c <= '9');
    if (!ok) return false;
  }
  return true;
}

void Vault::EpochTable::Reindex() {
  by_tag.clear();
  by_dummy.clear();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    by_tag.emplace(entries[i].tag, i);
    by_dummy.emplace(entries[i].dummy, i);
  }
}

Vault Vault::Create(std::string_view passphrase, const VaultOptions& options) {
  Require(!passphrase.empty(), ErrorCode::kInvalidArgument, "admin passphrase is empty");
  Require(options.kdf_iterations >= 1, ErrorCode::kInvalidArgument,
          "kdf iterations must be >= 1");
  Require(options.ek1.empty() || options.ek1.size() == kKeyBytes, ErrorCode::kInvalidArgument,
          "ek1 must be 32 bytes");
  Vault v;
  v.kdf_iterations_ = options.kdf_iterations;
  v.salt_ = options.salt.empty() ? RandomBytes(16) : options.salt;
  const Bytes material = v.DeriveMaterial(passphrase);
  const Bytes ek1 = options.ek1.empty() ? RandomBytes(kKeyBytes) : options.ek1;
  v.verifier_.assign(material.begin(), material.begin() + 32);
  const Bytes ek2(material.begin() + 32, material.begin() + 64);
  v.ek1_wrapped_.resize(kKeyBytes);
  for (std::size_t i = 0; i < kKeyBytes; ++i) v.ek1_wrapped_[i] = ek1[i] ^ material[64 + i];
  v.ek1_check_ = CheckValue(ek1, kEk1Check);
  v.ek2_check_ = CheckValue(ek2, kEk2Check);
  v.tables_.push_back({});
  return v;
}

Bytes Vault::DeriveMaterial(std::string_view passphrase) const {
  return Pbkdf2Sha256(passphrase, salt_, kdf_iterations_, 96);
}

bool Vault::CredentialOk(std::string_view passphrase) const {
  const Bytes material = DeriveMaterial(passphrase);
  return ConstantTimeEqual(std::span(material).first(32), verifier_);
}

VaultKeys Vault::Unlock(std::string_view passphrase) const {
  const Bytes material = DeriveMaterial(passphrase);
  Require(ConstantTimeEqual(std::span(material).first(32), verifier_),
          ErrorCode::kUnauthorized, "authorization failed");
  VaultKeys keys;
  keys.ek2.assign(material.begin() + 32, material.begin() + 64);
  keys.ek1.resize(kKeyBytes);
  for (std::size_t i = 0; i < kKeyBytes; ++i) keys.ek1[i] = ek1_wrapped_[i] ^ material[64 + i];
  CheckKeys(keys);
  return keys;
}

void Vault::CheckKeys(const VaultKeys& keys) const {
  Require(keys.ek1.size() == kKeyBytes && keys.ek2.size() == kKeyBytes,
          ErrorCode::kUnauthorized, "authorization failed: both vault keys are required");
  Require(ConstantTimeEqual(CheckValue(keys.ek1, kEk1Check), ek1_check_) &&
              ConstantTimeEqual(CheckValue(keys.ek2, kEk2Check), ek2_check_),
          ErrorCode::kUnauthorized, "authorization failed");
}

Vault::EpochTable& Vault::Table(std::uint64_t epoch) {
  for (auto& t : tables_) {
    if (t.epoch == epoch) return t;
  }
  tables_.push_back({});
  tables_.back().epoch = epoch;
  return tables_.back();
}

const Vault::EpochTable* Vault::FindTable(std::uint64_t epoch) const {
  for (const auto& t : tables_) {
    if (t.epoch == epoch) return &t;
  }
  return nullptr;
}

std::int64_t Vault::Unseal(const Entry& e, std::uint64_t epoch, const VaultKeys& keys) const {
  const auto id = static_cast<std::int64_t>(e.sealed ^ SealPad(keys.ek2, epoch, e.dummy));
  // The tag binds the unsealed id to ek1; a mismatch means a corrupted entry.
  Require(ToHex(Mac(keys.ek1, kTagDomain, epoch, id)) == e.tag, ErrorCode::kData,
          "vault entry failed its integrity check");
  return id;
}

std::string Vault::Issue(std::int64_t true_id, const VaultKeys& keys) {
  CheckKeys(keys);
  EpochTable& table = Table(epoch_);
  const std::string tag = ToHex(Mac(keys.ek1, kTagDomain, epoch_, true_id));
  if (auto it = table.by_tag.find(tag); it != table.by_tag.end()) {
    return table.entries[it->second].dummy;
  }
  Require(table.entries.size() < std::size(kWords) * 1000, ErrorCode::kData,
          "dummy name space exhausted");
  std::string dummy;
  for (std::uint32_t counter = 0;; ++counter) {
    dummy = DeriveDummy(keys.ek1, epoch_, true_id, counter);
    if (!table.by_dummy.contains(dummy)) break;
  }
  Entry e{tag, dummy, static_cast<std::uint64_t>(true_id) ^ SealPad(keys.ek2, epoch_, dummy)};
  table.by_tag.emplace(tag, table.entries.size());
  table.by_dummy.emplace(dummy, table.entries.size());
  table.entries.push_back(std::move(e));
  EnforceEpochSeparation(keys);
  return table.entries[table.by_tag.at(tag)].dummy;
}

void Vault::EnforceEpochSeparation(const VaultKeys& keys) {
  if (epoch_ == 0) return;
  const EpochTable* prev = FindTable(epoch_ - 1);
  EpochTable& cur = Table(epoch_);
  if (prev == nullptr || prev->entries.size() != cur.entries.size()) return;
  std::map<std::int64_t, std::string> prev_map, cur_map;
  for (const auto& e : prev->entries) prev_map.emplace(Unseal(e, epoch_ - 1, keys), e.dummy);
  std::map<std::int64_t, std::size_t> cur_index;
  for (std::size_t i = 0; i < cur.entries.size(); ++i) {
    const auto id = Unseal(cur.entries[i], epoch_, keys);
    cur_map.emplace(id, cur.entries[i].dummy);
    cur_index.emplace(id, i);
  }
  if (prev_map != cur_map) return;

  // Identical mapping: re-draw the lowest id past its current counter.
  const auto [lowest, idx] = *cur_index.begin();
  Entry& e = cur.entries[idx];
  std::uint32_t counter = 0;
  while (DeriveDummy(keys.ek1, epoch_, lowest, counter) != e.dummy) ++counter;
  std::string dummy;
  do {
    dummy = DeriveDummy(keys.ek1, epoch_, lowest, ++counter);
  } while (cur.by_dummy.contains(dummy));
  e.dummy = dummy;
  e.sealed = static_cast<std::uint64_t>(lowest) ^ SealPad(keys.ek2, epoch_, dummy);
  cur.Reindex();
}

std::uint64_t Vault::Rotate() {
  ++epoch_;
  Table(epoch_);
  return epoch_;
}

std::size_t Vault::EpochSize(std::uint64_t epoch) const {
  const EpochTable* t = FindTable(epoch);
  return t ? t->entries.size() : 0;
}

std::vector<std::string> Vault::EpochDummies(std::uint64_t epoch) const {
  std::vector<std::string> out;
  if (const EpochTable* t = FindTable(epoch)) {
    for (const auto& e : t->entries) out.push_back(e.dummy);
  }
  return out;
}

void Vault::Audit(std::uint64_t epoch, std::string_view dummy, std::string_view outcome) {
  AuditEntry e;
  e.seq = audit_.size();
  e.timestamp = UtcNow();
  e.epoch = epoch;
  e.dummy = std::string(dummy);
  e.outcome = std::string(outcome);
  e.prev_hash = audit_.empty() ? std::string(kGenesisHash) : audit_.back().hash;
  e.hash = AuditHash(e);
  audit_.push_back(std::move(e));
}

bool Vault::VerifyAuditChain() const {
  std::string prev(kGenesisHash);
  for (std::size_t i = 0; i < audit_.size(); ++i) {
    const auto& e = audit_[i];
    if (e.seq != i || e.prev_hash != prev || AuditHash(e) != e.hash) return false;
    prev = e.hash;
  }
  return true;
}

std::int64_t Vault::Resolve(std::string_view dummy, std::optional<std::uint64_t> epoch,
                            const VaultKeys& keys, std::string_view passphrase) {
  const std::uint64_t queried = epoch.value_or(epoch_);
  // Credential and key failures are reported identically and before any lookup,
  // so they reveal nothing about the dummy.
  bool authorized = CredentialOk(passphrase);
  if (authorized) {
    try {
      CheckKeys(keys);
    } catch (const Error&) {
      authorized = false;
    }
  }
  if (!authorized) {
    Audit(queried, dummy, "denied");
    Fail(ErrorCode::kUnauthorized, "authorization failed");
  }
  const EpochTable* table = FindTable(queried);
  const std::string key(dummy);
  if (table == nullptr || !table->by_dummy.contains(key)) {
    if (!epoch) {
      for (const auto& t : tables_) {
        if (t.epoch < epoch_ && t.by_dummy.contains(key)) {
          Audit(queried, dummy, "stale_epoch");
          Fail(ErrorCode::kStaleEpoch, "dummy id '" + key + "' belongs to expired epoch " +
                                           std::to_string(t.epoch));
        }
      }
    }
    Audit(queried, dummy, "not_found");
    Fail(ErrorCode::kNotFound,
         "dummy id '" + key + "' not found in epoch " + std::to_string(queried));
  }
  const auto id = Unseal(table->entries[table->by_dummy.at(key)], queried, keys);
  Audit(queried, dummy, "resolved");
  return id;
}

Json Vault::ToJson() const {
  Json epochs = Json::array();
  for (const auto& t : tables_) {
    Json entries = Json::array();
    for (const auto& e : t.entries) {
      Bytes sealed;
      AppendU64(sealed, e.sealed);
      entries.push_back(Json{{"tag", e.tag}, {"dummy", e.dummy}, {"sealed", ToHex(sealed)}});
    }
    epochs.push_back(Json{{"epoch", t.epoch}, {"entries", std::move(entries)}});
  }
  Json audit = Json::array();
  for (const auto& e : audit_) {
    audit.push_back(Json{{"seq", e.seq},
                         {"timestamp", e.timestamp},
                         {"epoch", e.epoch},
                         {"dummy", e.dummy},
                         {"outcome", e.outcome},
                         {"prev_hash", e.prev_hash},
                         {"hash", e.hash}});
  }
  return Json{{"format", "gazeguard.vault"},
              {"version", 1},
              {"kdf", {{"name", "pbkdf2-hmac-sha256"},
                       {"iterations", kdf_iterations_},
                       {"salt", ToHex(salt_)}}},
              {"credential_verifier", ToHex(verifier_)},
              {"ek1_wrapped", ToHex(ek1_wrapped_)},
              {"ek1_check", ToHex(ek1_check_)},
              {"ek2_check", ToHex(ek2_check_)},
              {"epoch", epoch_},
              {"epochs", std::move(epochs)},
              {"audit_log", std::move(audit)}};
}

Vault Vault::FromJson(const Json& doc) {
  try {
    Require(doc.value("format", "") == "gazeguard.vault" && doc.value("version", 0) == 1,
            ErrorCode::kData, "not a version-1 vault document");
    Vault v;
    const Json& kdf = doc.at("kdf");
    v.kdf_iterations_ = kdf.at("iterations").get<int>();
    v.salt_ = HexField(kdf, "salt");
    v.verifier_ = HexField(doc, "credential_verifier");
    v.ek1_wrapped_ = HexField(doc, "ek1_wrapped");
    v.ek1_check_ = HexField(doc, "ek1_check");
    v.ek2_check_ = HexField(doc, "ek2_check");
    v.epoch_ = doc.at("epoch").get<std::uint64_t>();
    Require(v.kdf_iterations_ >= 1 && v.ek1_wrapped_.size() == kKeyBytes &&
                v.verifier_.size() == 32,
            ErrorCode::kData, "vault key material is malformed");
    for (const auto& t : doc.at("epochs")) {
      EpochTable table;
      table.epoch = t.at("epoch").get<std::uint64_t>();
      for (const auto& e : t.at("entries")) {
        const Bytes sealed = HexField(e, "sealed");
        Require(sealed.size() == 8, ErrorCode::kData, "malformed sealed id");
        table.entries.push_back(
            {e.at("tag").get<std::string>(), e.at("dummy").get<std::string>(), ReadU64(sealed)});
      }
      table.Reindex();
      v.tables_.push_back(std::move(table));
    }
    for (const auto& e : doc.at("audit_log")) {
      v.audit_.push_back({e.at("seq").get<std::uint64_t>(), e.at("timestamp").get<std::string>(),
                          e.at("epoch").get<std::uint64_t>(), e.at("dummy").get<std::string>(),
                          e.at("outcome").get<std::string>(),
                          e.at("prev_hash").get<std::string>(), e.at("hash").get<std::string>()});
    }
    Require(v.VerifyAuditChain(), ErrorCode::kData, "vault audit log chain is broken");
    return v;
  } catch (const Json::exception& e) {
    Fail(ErrorCode::kData, std::string("malformed vault document: ") + e.what());
  }
}

Vault Vault::Load(const std::filesystem::path& path) {
  Require(std::filesystem::exists(path), ErrorCode::kInvalidArgument,
          "vault is not initialized: " + path.string() + " does not exist");
  Json doc;
  try {
    doc = Json::parse(ReadFile(path));
  } catch (const Json::exception& e) {
    Fail(ErrorCode::kData, "vault file is not valid JSON: " + std::string(e.what()));
  }
  return FromJson(doc);
}

void Vault::Save(const std::filesystem::path& path) const {
  WriteFileAtomic(path, ToJson().dump(2) + "\n", /*owner_only=*/true);
}

}  // namespace gazeguard
