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

#include "gazeguard/privacy_audit.hpp"

#include <algorithm>
#include <sstream>

#include "gazeguard/error.hpp"
#include "gazeguard/neural_net.hpp"
#include "gazeguard/vault.hpp"

namespace gazeguard {
namespace {

constexpr std::string_view kForbiddenField = "student_id";

class Scanner {
 public:
  Scanner(const std::set<std::string>& ids, PrivacyAuditReport& report)
      : ids_(ids), report_(report) {}

  void Label(const std::string& file, const std::string& where, const std::string& token) {
    ++report_.label_tokens_checked;
    if (ids_.contains(std::string(Trim(token)))) {
      report_.violations.push_back({file, where, "true id in label position"});
    }
    if (token.find(kForbiddenField) != std::string::npos) {
      report_.violations.push_back({file, where, "student_id field name"});
    }
  }

  void JsonValue(const std::string& file, const Json& v, const std::string& path) {
    if (v.is_object()) {
      for (const auto& item : v.items()) {
        Label(file, path + "/" + EscapePointer(item.key()) + " (key)", item.key());
        JsonValue(file, item.value(), path + "/" + EscapePointer(item.key()));
      }
    } else if (v.is_array()) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        JsonValue(file, v[i], path + "/" + std::to_string(i));
      }
    } else if (v.is_string()) {
      Label(file, path, v.get<std::string>());
    }
  }

  void Csv(const std::string& file, const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> header;
    std::vector<bool> label_column;
    bool confusion = false;
    for (std::size_t row = 0; std::getline(in, line); ++row) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto cells = SplitCsvLine(line);
      if (row == 0) {
        header = cells;
        confusion = !cells.empty() && cells[0] == "true\\pred";
        for (std::size_t c = 0; c < cells.size(); ++c) {
          const std::string where = "header col " + std::to_string(c + 1);
          Label(file, where, cells[c]);
          const bool is_label = cells[c].find("id") != std::string::npos ||
                                cells[c].find("label") != std::string::npos;
          label_column.push_back(is_label);
          if (confusion && c > 0 && !IsDummyFormatted(cells[c])) {
            report_.violations.push_back({file, where, "confusion label is not a dummy id"});
          }
        }
        continue;
      }
      for (std::size_t c = 0; c < cells.size(); ++c) {
        const bool first_of_confusion = confusion && c == 0;
        if (!first_of_confusion && !(c < label_column.size() && label_column[c])) continue;
        const std::string where = "row " + std::to_string(row + 1) + " col " +
                                  std::to_string(c + 1);
        Label(file, where, cells[c]);
        if (first_of_confusion && !IsDummyFormatted(cells[c])) {
          report_.violations.push_back({file, where, "confusion label is not a dummy id"});
        }
      }
    }
  }

 private:
  static std::string EscapePointer(const std::string& key) {
    std::string out;
    for (char ch : key) {
      if (ch == '~') {
        out += "~0";
      } else if (ch == '/') {
        out += "~1";
      } else {
        out.push_back(ch);
      }
    }
    return out;
  }

  const std::set<std::string>& ids_;
  PrivacyAuditReport& report_;
};

}  // namespace

Json PrivacyAuditReport::ToJson() const {
  Json v = Json::array();
  for (const auto& x : violations) {
    v.push_back(Json{{"file", x.file}, {"location", x.location}, {"rule", x.rule}});
  }
  return Json{{"format", "gazeguard.privacy_audit"},
              {"version", 1},
              {"passed", passed()},
              {"true_ids_checked", true_ids_checked},
              {"label_tokens_checked", label_tokens_checked},
              {"files_scanned", files_scanned},
              {"rules",
               {"no true id as a JSON key or string value",
                "no true id in CSV headers, id/label columns or confusion row labels",
                "no true id in weight checkpoint layout headers",
                "no student_id field name in any artifact",
                "confusion matrix labels match ^[a-z]+[0-9]{3}$"}},
              {"violations", std::move(v)}};
}

PrivacyAuditReport AuditDirectory(const std::filesystem::path& dir,
                                  const std::set<std::string>& true_ids) {
  Require(std::filesystem::is_directory(dir), ErrorCode::kNotFound,
          "audit directory does not exist: " + dir.string());
  PrivacyAuditReport report;
  report.true_ids_checked = true_ids.size();
  Scanner scan(true_ids, report);
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    const std::string rel = std::filesystem::relative(path, dir).generic_string();
    report.files_scanned.push_back(rel);
    const std::string text = ReadFile(path);
    const std::string ext = path.extension().string();
    if (ext == ".json") {
      Json doc;
      try {
        doc = Json::parse(text);
      } catch (const Json::exception&) {
        report.violations.push_back({rel, "", "unparsable JSON artifact"});
        continue;
      }
      scan.JsonValue(rel, doc, "");
    } else if (ext == ".csv") {
      scan.Csv(rel, text);
    } else if (ext == ".ggw") {
      try {
        const ModelWeights w = DeserializeWeights(text);
        for (const auto& s : w.layout) scan.Label(rel, "layout", s.name);
      } catch (const Error&) {
        report.violations.push_back({rel, "", "unparsable weights artifact"});
      }
    } else if (text.find(kForbiddenField) != std::string::npos) {
      report.violations.push_back({rel, "", "student_id field name"});
    }
  }
  return report;
}

}  // namespace gazeguard
