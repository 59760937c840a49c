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

#ifndef ACTIGATE_TOOLS_CLI_CLI_IO_H_
#define ACTIGATE_TOOLS_CLI_CLI_IO_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace actigate::cli {

// One row of a score CSV (id,score,label). `score` is empty for records the
// scorer could not handle; those rows carry "NA".
struct ScoreRow {
  std::string id;
  std::optional<double> score;
  int label = 0;
};

std::string CsvField(std::string_view field);
std::vector<std::string> SplitCsvLine(std::string_view line);

std::string ScoresToCsv(const std::vector<ScoreRow>& rows);
// Throws ValidationError on a malformed file, StorageError if unreadable.
std::vector<ScoreRow> ReadScoreCsv(const std::filesystem::path& path);

// Round-trippable decimal form of a double.
std::string FormatDouble(double v);

// Current UTC time as 2026-01-02T03:04:05Z.
std::string UtcTimestamp();

}  // namespace actigate::cli

#endif  // ACTIGATE_TOOLS_CLI_CLI_IO_H_
