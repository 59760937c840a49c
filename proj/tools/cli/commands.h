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

#ifndef ACTIGATE_TOOLS_CLI_COMMANDS_H_
#define ACTIGATE_TOOLS_CLI_COMMANDS_H_

#include <exception>
#include <string>
#include <vector>

namespace actigate::cli {

// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitValidation = 2,
  kExitIo = 3,
};

int ExitCodeFor(const std::exception& e);

// Runs one subcommand; `args` excludes the program name. Errors are reported
// on stderr and turned into exit codes, never thrown.
//
//   generate  synthetic activation store
//   train     probe checkpoint, history.csv, summary.json
//   score     scores.csv with the probe or the length-normalized baseline
//   gate      decisions.csv for one threshold
//   eval      sweep.csv, sweep.json, auroc.json
//   bench     bench.csv, bench.json with per (layer, context) latency
//
// Each successful run also writes run.json into its --out directory.
int RunCli(const std::vector<std::string>& args);

}  // namespace actigate::cli

#endif  // ACTIGATE_TOOLS_CLI_COMMANDS_H_
