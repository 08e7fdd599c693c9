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

#ifndef JBAL_EXPERIMENT_H_
#define JBAL_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jbal/balancing.h"
#include "jbal/datagen.h"
#include "jbal/learner.h"
#include "jbal/metrics.h"

namespace jbal {

// Jointly balances (Y, Z) of a dataset with the given mechanism. The seed is
// used only by resampling mechanisms.
Dataset BalanceDataset(const Dataset& data, Mechanism mechanism, std::uint64_t seed);

// P(Z=0) of the latent model, i.e. the P(Z | Y) row of the jointly balanced
// member of the shift family.
double BalancedZ0(const GenSpec& spec);

struct EvalPlan {
  std::size_t source_n = 2000;
  std::size_t ideal_n = 2000;
  std::size_t shift_points = 7;
  std::size_t shift_n = 2000;
  EvalLoss shift_loss = EvalLoss::kZeroOne;
  bool probe = true;
  EvalOptions options;
};

struct CellSpec {
  GenSpec gen;
  bool balanced = false;
  Mechanism mechanism = Mechanism::kSubsampleMajority;
  TrainSpec train;
  EvalPlan eval;
  // Replicate seed; every random stream of the cell derives from it.
  std::uint64_t seed = 0;
};

struct CellResult {
  std::size_t train_rows = 0;
  TrainResult training;
  // Fresh sample of the training distribution (Q when balanced).
  MetricsReport source;
  MetricsReport ideal;
  std::optional<RiskReport> shift;
};

// The stages of RunCell, for callers that persist intermediate artifacts.
// Each stage draws from its own seed stream of `cell.seed`.
GenSpec CellGenSpec(const CellSpec& cell);
Dataset CellTrainingData(const CellSpec& cell);
// Identity unless `cell.balanced`.
Dataset CellBalance(const Dataset& train, const CellSpec& cell);
TrainResult CellTrain(const Dataset& train, const CellSpec& cell);

struct CellTestsets {
  Dataset source;
  Dataset ideal;
  std::vector<Dataset> shift;
};
CellTestsets CellTestData(const CellSpec& cell);

// Fills source, ideal and shift of `out`. Empty test sets leave their
// report at its default value.
void EvaluateCell(const ModelParams& model, const CellTestsets& tests, const CellSpec& cell,
                  CellResult* out);

CellResult RunCell(const CellSpec& cell);

}  // namespace jbal

#endif  // JBAL_EXPERIMENT_H_
