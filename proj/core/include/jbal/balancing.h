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

#ifndef JBAL_BALANCING_H_
#define JBAL_BALANCING_H_

#include <cstdint>
#include <optional>
#include <string>

#include "jbal/joint_table.h"
#include "jbal/sample_batch.h"

namespace jbal {

enum class Mechanism { kExactReweight, kImportanceWeights, kSubsampleMajority, kUpsampleMinority };

const char* MechanismName(Mechanism m);
Mechanism ParseMechanism(const std::string& name);
bool Resamples(Mechanism m);

struct BalanceSpec {
  // Joint target when `z` is set, single-variable target otherwise.
  std::string y;
  std::optional<std::string> z;
  Mechanism mechanism = Mechanism::kExactReweight;
  // Required exactly when the mechanism resamples.
  std::optional<std::uint64_t> seed;

  static BalanceSpec Joint(std::string y, std::string z,
                           Mechanism m = Mechanism::kExactReweight,
                           std::optional<std::uint64_t> seed = std::nullopt) {
    return {std::move(y), std::move(z), m, seed};
  }
  static BalanceSpec Single(std::string var, Mechanism m = Mechanism::kExactReweight,
                            std::optional<std::uint64_t> seed = std::nullopt) {
    return {std::move(var), std::nullopt, m, seed};
  }
};

// Q = P * P(Y) P(Z) / P(Y, Z). Throws UnbalanceableSupport when a (y, z)
// cell has zero mass although both of its marginals are positive.
JointTable BalanceExact(const JointTable& table, const BalanceSpec& spec);

// Reweights so that the target variable is uniform, keeping every
// conditional given the target.
JointTable BalanceSingleExact(const JointTable& table, const BalanceSpec& spec);

// Finite-sample balancing by the spec's mechanism. ExactReweight is treated
// like ImportanceWeights. Throws UnbalanceableSupport naming the first empty
// target cell.
SampleBatch BalanceBatch(const SampleBatch& batch, const BalanceSpec& spec);

// Row selection and weights produced by BalanceBatch, for callers that carry
// extra per-row payload (feature matrices).
struct BalancePlan {
  std::vector<std::size_t> rows;
  std::vector<double> weights;
};
BalancePlan PlanBalance(const SampleBatch& batch, const BalanceSpec& spec);

struct BiasShift {
  double before = 0.0;
  double after = 0.0;
  double bound = 0.0;
  // |after| > |before|.
  bool worsens = false;
  // Sufficient condition for worsening: (E[Z] - 1/2) and
  // (P(Y=1) - 1/2)(E[Z|Y=0] - E[Z|Y=1]) share a strict sign.
  bool sign_condition = false;
};

// Bias of a binary Z around 1/2 before and after balancing a binary Y to
// uniform.
BiasShift BiasShiftSingle(double p_y1, double ez_given_y1, double ez_given_y0);

}  // namespace jbal

#endif  // JBAL_BALANCING_H_
