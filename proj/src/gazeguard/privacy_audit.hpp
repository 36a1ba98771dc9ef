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

#ifndef GAZEGUARD_PRIVACY_AUDIT_HPP_
#define GAZEGUARD_PRIVACY_AUDIT_HPP_

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "gazeguard/io.hpp"

namespace gazeguard {

struct PrivacyViolation {
  std::string file;
  std::string location;
  std::string rule;
};

struct PrivacyAuditReport {
  std::vector<std::string> files_scanned;
  std::size_t true_ids_checked = 0;
  std::size_t label_tokens_checked = 0;
  std::vector<PrivacyViolation> violations;

  bool passed() const { return violations.empty(); }
  Json ToJson() const;
};

/// Scans every file under `dir` for true student ids in label positions:
/// JSON object keys and string values, CSV header cells, cells of id/label
/// columns and the row labels of confusion matrices, and the layout header of
/// weight checkpoints. Any "student_id" field name is also a violation, and
/// confusion-matrix labels must be dummy-formatted. Offending values are never
/// copied into the report.
PrivacyAuditReport AuditDirectory(const std::filesystem::path& dir,
                                  const std::set<std::string>& true_ids);

}  // namespace gazeguard

#endif  // GAZEGUARD_PRIVACY_AUDIT_HPP_
