/*
 * Copyright 2026 The Actigate Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cli/cli_io.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>

#include "actigate/error.h"
#include "actigate/file_io.h"

namespace actigate::cli {

std::string CsvField(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::vector<std::string> SplitCsvLine(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) throw ValidationError("unterminated quote in CSV line");
  fields.push_back(std::move(cur));
  return fields;
}

std::string FormatDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string ScoresToCsv(const std::vector<ScoreRow>& rows) {
  std::string out = "id,score,label\n";
  for (const ScoreRow& r : rows) {
    out += CsvField(r.id) + "," + (r.score ? FormatDouble(*r.score) : "NA") + "," +
           std::to_string(r.label) + "\n";
  }
  return out;
}

std::vector<ScoreRow> ReadScoreCsv(const std::filesystem::path& path) {
  const std::string text = ReadFile(path);
  std::vector<ScoreRow> rows;
  std::size_t pos = 0;
  bool header = true;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto fields = SplitCsvLine(line);
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (header) {
      if (fields != std::vector<std::string>{"id", "score", "label"}) {
        throw ValidationError(where + ": expected header id,score,label");
      }
      header = false;
      continue;
    }
    if (fields.size() != 3) throw ValidationError(where + ": expected 3 fields");
    ScoreRow row;
    row.id = fields[0];
    if (fields[1] != "NA") {
      std::size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(fields[1], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != fields[1].size() || !std::isfinite(value)) {
        throw ValidationError(where + ": bad score '" + fields[1] + "'");
      }
      row.score = value;
    }
    if (fields[2] != "0" && fields[2] != "1") {
      throw ValidationError(where + ": label must be 0 or 1");
    }
    row.label = fields[2] == "1" ? 1 : 0;
    rows.push_back(std::move(row));
  }
  if (header) throw ValidationError(path.string() + ": empty score file");
  return rows;
}

std::string UtcTimestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace actigate::cli
