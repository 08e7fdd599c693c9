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

#ifndef JBAL_JOINT_TABLE_H_
#define JBAL_JOINT_TABLE_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace jbal {

class SampleBatch;

struct Variable {
  std::string name;
  int cardinality = 2;

  friend bool operator==(const Variable&, const Variable&) = default;
};

// Validates names are unique and cardinalities >= 2.
void ValidateVariables(const std::vector<Variable>& variables);

// Exact joint distribution over an ordered list of discrete variables, stored
// as a dense row-major tensor (the first variable is the most significant
// index). Immutable once built.
class JointTable {
 public:
  static constexpr std::size_t kMaxCells = 10'000'000;
  static constexpr double kSumTolerance = 1e-12;

  // `probs` must be non-negative and sum to one within kSumTolerance.
  JointTable(std::vector<Variable> variables, std::vector<double> probs);

  // Normalizes non-negative `weights` with positive total mass.
  static JointTable FromWeights(std::vector<Variable> variables,
                                std::vector<double> weights);
  static JointTable Uniform(std::vector<Variable> variables);

  const std::vector<Variable>& variables() const { return variables_; }
  std::span<const double> probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }
  std::size_t num_variables() const { return variables_.size(); }
  std::vector<std::string> names() const;

  bool Contains(std::string_view name) const;
  // Position of `name`; throws NameError when absent.
  std::size_t IndexOf(std::string_view name) const;
  int Cardinality(std::string_view name) const {
    return variables_[IndexOf(name)].cardinality;
  }

  std::size_t Offset(std::span<const int> state) const;
  void Decode(std::size_t offset, std::span<int> state) const;
  double Prob(std::span<const int> state) const { return probs_[Offset(state)]; }
  double Prob(std::initializer_list<int> state) const {
    return Prob(std::span<const int>(state.begin(), state.size()));
  }
  double at(std::size_t offset) const { return probs_[offset]; }

 private:
  std::vector<Variable> variables_;
  std::vector<double> probs_;
  std::vector<std::size_t> strides_;
};

// Number of cells of the joint state space; throws ArgumentError past
// JointTable::kMaxCells.
std::size_t StateSpaceSize(const std::vector<Variable>& variables);

// Sum over every variable not listed in `keep`. The result keeps the relative
// order the variables have in `table`.
JointTable Marginalize(const JointTable& table, const std::vector<std::string>& keep);

// Same variables, permuted into `order` (which must list every variable).
JointTable Reorder(const JointTable& table, const std::vector<std::string>& order);

// Distribution of the non-evidence variables given `evidence`. Throws
// DegenerateEvidence when the evidence has probability zero.
JointTable Condition(const JointTable& table, const std::map<std::string, int>& evidence);

// Outer product of two tables over disjoint variables.
JointTable Product(const JointTable& left, const JointTable& right);

struct IndependenceReport {
  bool independent = true;
  double max_gap = 0.0;
  // Variables of the maximizing state, laid out as given..., a..., b...
  std::vector<std::string> variables;
  std::vector<int> state;
};

inline constexpr double kDefaultIndependenceTolerance = 1e-9;

// Tests A _||_ B | C by the largest absolute gap
//   |P(a, b | c) - P(a | c) P(b | c)|
// over all states; conditioning states with P(c) = 0 are skipped.
IndependenceReport IsIndependent(const JointTable& table,
                                 const std::vector<std::string>& a,
                                 const std::vector<std::string>& b,
                                 const std::vector<std::string>& given = {},
                                 double tol = kDefaultIndependenceTolerance);

SampleBatch Sample(const JointTable& table, std::size_t n, std::uint64_t seed);

// Weighted empirical distribution of a batch.
JointTable Empirical(const SampleBatch& batch);

// Text form: a header, the variable list, then one "indices, probability" line
// per cell in row-major order with 17 significant digits.
std::string SerializeJointTable(const JointTable& table);
JointTable ParseJointTable(std::string_view text);

}  // namespace jbal

#endif  // JBAL_JOINT_TABLE_H_
