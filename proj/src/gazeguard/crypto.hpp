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

#ifndef GAZEGUARD_CRYPTO_HPP_
#define GAZEGUARD_CRYPTO_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gazeguard {

using Bytes = std::vector<std::uint8_t>;

std::string ToHex(std::span<const std::uint8_t> bytes);
/// Throws kData on odd length or non-hex characters.
Bytes FromHex(std::string_view hex);

std::string Md5Hex(std::string_view data);
std::string Sha256Hex(std::string_view data);
Bytes HmacSha256(std::span<const std::uint8_t> key, std::span<const std::uint8_t> data);
Bytes Pbkdf2Sha256(std::string_view passphrase, std::span<const std::uint8_t> salt,
                   int iterations, std::size_t length);
Bytes RandomBytes(std::size_t n);
bool ConstantTimeEqual(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

/// Big-endian append helpers for building MAC inputs.
void AppendU32(Bytes& out, std::uint32_t v);
void AppendU64(Bytes& out, std::uint64_t v);
void AppendString(Bytes& out, std::string_view s);
std::uint64_t ReadU64(std::span<const std::uint8_t> bytes);

}  // namespace gazeguard

#endif  // GAZEGUARD_CRYPTO_HPP_
