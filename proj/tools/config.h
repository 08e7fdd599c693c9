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

#ifndef JBAL_TOOLS_CONFIG_H_
#define JBAL_TOOLS_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jbal/balancing.h"
#include "jbal/datagen.h"
#include "jbal/errors.h"
#include "jbal/experiment.h"
#include "jbal/learner.h"

namespace jbal::cli {

// Bad command line or configuration; maps to exit status 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

enum class TestSetKind { kSource, kIdeal, kShift };
const char* TestSetName(TestSetKind kind);

struct ExperimentConfig {
  GenSpec gen;
  // Joint (Y, Z) balancing mechanism; unset trains on the generated data.
  std::optional<Mechanism> balance;
  TrainSpec train;
  std::vector<TestSetKind> eval_sets = {TestSetKind::kSource, TestSetKind::kIdeal,
                                        TestSetKind::kShift};
  EvalPlan eval;
  std::vector<std::uint64_t> replicates = {0};
  std::string output_dir = "jbal_out";
  // Grid axes.
  std::vector<double> strengths = {0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0};
  std::vector<bool> grid_balance = {false, true};
  Mechanism grid_mechanism = Mechanism::kSubsampleMajority;

  // Throws UsageError.
  void Validate() const;
  // Cell for one replicate seed, with balancing and strength as configured.
  CellSpec Cell(std::uint64_t seed) const;
};

// Sectioned key = value text. Every key is typed; unknown sections or keys,
// duplicates and malformed values throw UsageError naming the offender.
ExperimentConfig ParseConfig(std::string_view text);
ExperimentConfig LoadConfig(const std::string& path);

// Every key with its effective value, in a fixed order. Parsing the result
// gives back the same config.
std::string CanonicalConfig(const ExperimentConfig& config);

// 16 hex digits of 64-bit FNV-1a over the canonical text without
// output_dir.
std::string ConfigHash(const ExperimentConfig& config);

}  // namespace jbal::cli

#endif  // JBAL_TOOLS_CONFIG_H_
