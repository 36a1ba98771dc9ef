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

#ifndef GAZEGUARD_IO_HPP_
#define GAZEGUARD_IO_HPP_

#include <filesystem>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace gazeguard {

using Json = nlohmann::ordered_json;

std::string ReadFile(const std::filesystem::path& path);

/// Writes via a sibling temp file and rename so readers never observe a
/// partially written artifact. `owner_only` restricts permissions to 0600.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view content,
                     bool owner_only = false);

void WriteJsonAtomic(const std::filesystem::path& path, const Json& doc);

/// Shortest decimal string that parses back to the same double.
std::string FormatDouble(double value);

/// Strict parse: the whole (trimmed) field must be a finite number.
std::optional<double> ParseDouble(std::string_view text);
std::optional<long long> ParseInt(std::string_view text);

std::string_view Trim(std::string_view text);

/// Splits one CSV line; supports double-quoted fields with "" escapes.
std::vector<std::string> SplitCsvLine(std::string_view line);

std::string CsvEscape(std::string_view field);

/// Config validation: throws kInvalidArgument if `obj` is not an object or has
/// a key outside `allowed`.
void RejectUnknownKeys(const Json& obj, std::initializer_list<std::string_view> allowed,
                       std::string_view where);

}  // namespace gazeguard

#endif  // GAZEGUARD_IO_HPP_
