/*
 * Copyright 2026 The jbal Authors.
 *
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


#ifndef JBAL_TOOLS_COMMANDS_H_
#define JBAL_TOOLS_COMMANDS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "config.h"

namespace jbal::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitExpectation = 3;

struct Options {
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::size_t workers = 1;
  bool force = false;
  std::optional<std::string> out;
};

// Resolved inputs of a single-run command.
struct RunContext {
  ExperimentConfig config;
  std::string hash;
  std::filesystem::path dir;
  CellSpec cell;
};

// Needs --config; --out overrides the configured directory and --seed the
// first replicate.
RunContext ResolveRun(const Options& opts);

// train.*, test_source.*, test_ideal.*, test_shift{i}.*
int CmdGen(const Options& opts);
// train_balanced.*
int CmdBalance(const Options& opts);
// model.txt, train_log.csv, train.json
int CmdTrain(const Options& opts);
// eval.json
int CmdEval(const Options& opts);

struct VerifyOptions {
  std::size_t grid = 50;
};
// Writes verify_<id>.json. Exit 0 when the expected outcome is observed,
// 3 otherwise; an unknown id is a UsageError.
int CmdVerify(const std::string& id, const Options& opts, const VerifyOptions& vopts);
std::vector<std::string> VerifyIds();

// results.csv, manifest.json, cells/<key>/metrics.json, plot_worst_group.csv and
// plot_shift_gap.csv.
int CmdGrid(const Options& opts);

// Writes through a temporary file and a rename.
void WriteFileAtomic(const std::filesystem::path& path, const std::string& text);
std::string ReadTextFile(const std::filesystem::path& path);

}  // namespace jbal::cli

#endif  // JBAL_TOOLS_COMMANDS_H_
