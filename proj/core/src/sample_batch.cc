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

#include "jbal/sample_batch.h"

#include <cmath>
#include <string>

#include "jbal/errors.h"
#include "jbal/rng.h"

namespace jbal {

SampleBatch::SampleBatch(std::vector<Variable> variables, std::vector<int> states,
                         std::vector<double> weights)
    : variables_(std::move(variables)),
      states_(std::move(states)),
      weights_(std::move(weights)) {
  ValidateVariables(variables_);
  if (variables_.empty()) throw ArgumentError("sample batch without variables");
  if (states_.size() != weights_.size() * variables_.size()) {
    throw ArgumentError("sample batch: states and weights disagree on row count");
  }
  for (std::size_t r = 0; r < weights_.size(); ++r) {
    if (!(weights_[r] >= 0.0) || !std::isfinite(weights_[r])) {
      throw ArgumentError("sample batch: weight must be finite and non-negative");
    }
    for (std::size_t v = 0; v < variables_.size(); ++v) {
      const int s = At(r, v);
      if (s < 0 || s >= variables_[v].cardinality) {
        throw ArgumentError("sample batch: state out of range for '" +
                            variables_[v].name + "' in row " + std::to_string(r));
      }
    }
  }
}

SampleBatch::SampleBatch(std::vector<Variable> variables, std::vector<int> states)
    : SampleBatch(variables, states,
                  std::vector<double>(variables.empty() ? 0 : states.size() / variables.size(),
                                      1.0)) {}

std::size_t SampleBatch::IndexOf(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i].name == name) return i;
  }
  throw NameError("unknown variable '" + std::string(name) + "'");
}

std::vector<int> SampleBatch::Column(std::string_view name) const {
  const std::size_t v = IndexOf(name);
  std::vector<int> out(size());
  for (std::size_t r = 0; r < size(); ++r) out[r] = At(r, v);
  return out;
}

double SampleBatch::TotalWeight() const {
  double total = 0.0;
  for (double w : weights_) total += w;
  return total;
}

SampleBatch SampleBatch::Select(std::span<const std::size_t> rows,
                                std::vector<double> weights) const {
  if (weights.size() != rows.size()) throw ArgumentError("Select: weight count mismatch");
  std::vector<int> states;
  states.reserve(rows.size() * variables_.size());
  for (std::size_t r : rows) {
    if (r >= size()) throw ArgumentError("Select: row index out of range");
    const auto row = Row(r);
    states.insert(states.end(), row.begin(), row.end());
  }
  return SampleBatch(variables_, std::move(states), std::move(weights));
}

SampleBatch SampleBatch::WithWeights(std::vector<double> weights) const {
  return SampleBatch(variables_, states_, std::move(weights));
}

SampleBatch Resample(const SampleBatch& batch, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ArgumentError("Resample: n must be at least 1");
  std::vector<double> cumulative(batch.size());
  double acc = 0.0;
  for (std::size_t r = 0; r < batch.size(); ++r) {
    acc += batch.weights()[r];
    cumulative[r] = acc;
  }
  if (!(acc > 0.0)) throw ArgumentError("Resample: batch has no weight");
  Rng rng(seed);
  std::vector<std::size_t> rows(n);
  for (std::size_t& r : rows) r = rng.FromCumulative(cumulative);
  return batch.Select(rows, std::vector<double>(n, 1.0));
}

}  // namespace jbal
