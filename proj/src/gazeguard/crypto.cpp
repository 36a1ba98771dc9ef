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

#include "gazeguard/crypto.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/rand.h>

#include "gazeguard/error.hpp"

namespace gazeguard {
namespace {

std::string Digest(const EVP_MD* md, std::string_view data) {
  unsigned char out[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  Require(EVP_Digest(data.data(), data.size(), out, &len, md, nullptr) == 1,
          ErrorCode::kInternal, "digest failed");
  return ToHex({out, len});
}

int HexValue(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string ToHex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

Bytes FromHex(std::string_view hex) {
  Require(hex.size() % 2 == 0, ErrorCode::kData, "hex string has odd length");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int hi = HexValue(hex[2 * i]);
    const int lo = HexValue(hex[2 * i + 1]);
    Require(hi >= 0 && lo >= 0, ErrorCode::kData, "invalid hex character");
    out[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return out;
}

std::string Md5Hex(std::string_view data) { return Digest(EVP_md5(), data); }

std::string Sha256Hex(std::string_view data) { return Digest(EVP_sha256(), data); }

Bytes HmacSha256(std::span<const std::uint8_t> key, std::span<const std::uint8_t> data) {
  Bytes out(32);
  unsigned int len = 0;
  Require(HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), data.data(), data.size(),
               out.data(), &len) != nullptr &&
              len == 32,
          ErrorCode::kInternal, "HMAC failed");
  return out;
}

Bytes Pbkdf2Sha256(std::string_view passphrase, std::span<const std::uint8_t> salt,
                   int iterations, std::size_t length) {
  Require(iterations >= 1, ErrorCode::kInvalidArgument, "PBKDF2 iterations must be >= 1");
  Bytes out(length);
  Require(PKCS5_PBKDF2_HMAC(passphrase.data(), static_cast<int>(passphrase.size()), salt.data(),
                            static_cast<int>(salt.size()), iterations, EVP_sha256(),
                            static_cast<int>(length), out.data()) == 1,
          ErrorCode::kInternal, "PBKDF2 failed");
  return out;
}

Bytes RandomBytes(std::size_t n) {
  Bytes out(n);
  Require(RAND_bytes(out.data(), static_cast<int>(n)) == 1, ErrorCode::kInternal,
          "system random source failed");
  return out;
}

bool ConstantTimeEqual(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  return a.size() == b.size() && CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

void AppendU32(Bytes& out, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

void AppendU64(Bytes& out, std::uint64_t v) {
  for (int s = 56; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

void AppendString(Bytes& out, std::string_view s) { out.insert(out.end(), s.begin(), s.end()); }

std::uint64_t ReadU64(std::span<const std::uint8_t> bytes) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 8; ++i) v = (v << 8) | bytes[i];
  return v;
}

}  // namespace gazeguard
