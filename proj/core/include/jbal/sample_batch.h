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

#ifndef JBAL_SAMPLE_BATCH_H_
#define JBAL_SAMPLE_BATCH_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "jbal/joint_table.h"

namespace jbal {

// Finite weighted sample of joint states. Rows are stored contiguously.
class SampleBatch {
 public:
  SampleBatch(std::vector<Variable> variables, std::vector<int> states,
              std::vector<double> weights);
  // Unit weights.
  SampleBatch(std::vector<Variable> variables, std::vector<int> states);

  const std::vector<Variable>& variables() const { return variables_; }
  std::size_t size() const { return weights_.size(); }
  std::size_t num_variables() const { return variables_.size(); }
  std::size_t IndexOf(std::string_view name) const;

  std::span<const int> Row(std::size_t i) const {
    return {states_.data() + i * variables_.size(), variables_.size()};
  }
  int At(std::size_t row, std::size_t var) const {
    return states_[row * variables_.size() + var];
  }
  // Column of one variable.
  std::vector<int> Column(std::string_view name) const;
  std::span<const double> weights() const { return weights_; }
  double TotalWeight() const;

  // Rows picked by index (repetition allowed), with the given weights.
  SampleBatch Select(std::span<const std::size_t> rows,
                     std::vector<double> weights) const;
  SampleBatch WithWeights(std::vector<double> weights) const;

 private:
  std::vector<Variable> variables_;
  std::vector<int> states_;
  std::vector<double> weights_;
};

// Draws `n` rows with replacement, with probability proportional to the
// current weights; the result has unit weights.
SampleBatch Resample(const SampleBatch& batch, std::size_t n, std::uint64_t seed);

}  // namespace jbal

#endif  // JBAL_SAMPLE_BATCH_H_
