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

#include "jbal/joint_table.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "jbal/errors.h"
#include "jbal/rng.h"
#include "jbal/sample_batch.h"

namespace jbal {
namespace {

// Neumaier-compensated sum; keeps the normalization check meaningful for
// large tables.
double StableSum(std::span<const double> values) {
  double sum = 0.0;
  double compensation = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      compensation += (sum - t) + v;
    } else {
      compensation += (v - t) + sum;
    }
    sum = t;
  }
  return sum + compensation;
}

std::vector<std::size_t> Strides(const std::vector<Variable>& variables) {
  std::vector<std::size_t> strides(variables.size());
  std::size_t stride = 1;
  for (std::size_t i = variables.size(); i-- > 0;) {
    strides[i] = stride;
    stride *= static_cast<std::size_t>(variables[i].cardinality);
  }
  return strides;
}

// Positions of `names` inside `table`, validating existence and uniqueness.
std::vector<std::size_t> Positions(const JointTable& table,
                                   const std::vector<std::string>& names) {
  std::vector<std::size_t> positions;
  positions.reserve(names.size());
  std::set<std::string_view> seen;
  for (const std::string& name : names) {
    if (!seen.insert(name).second) {
      throw ArgumentError("variable '" + name + "' listed twice");
    }
    positions.push_back(table.IndexOf(name));
  }
  return positions;
}

// Advances a mixed-radix counter; returns false after the last state.
bool NextState(std::vector<int>& state, const std::vector<Variable>& variables) {
  for (std::size_t i = state.size(); i-- > 0;) {
    if (++state[i] < variables[i].cardinality) return true;
    state[i] = 0;
  }
  return false;
}

std::string FormatDouble(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

}  // namespace

void ValidateVariables(const std::vector<Variable>& variables) {
  std::set<std::string_view> names;
  for (const Variable& v : variables) {
    if (v.name.empty()) throw NameError("variable with empty name");
    if (v.cardinality < 2) {
      throw ArgumentError("variable '" + v.name + "' has cardinality " +
                          std::to_string(v.cardinality) + " < 2");
    }
    if (!names.insert(v.name).second) {
      throw NameError("duplicate variable name '" + v.name + "'");
    }
  }
}

std::size_t StateSpaceSize(const std::vector<Variable>& variables) {
  std::size_t cells = 1;
  for (const Variable& v : variables) {
    cells *= static_cast<std::size_t>(v.cardinality);
    if (cells > JointTable::kMaxCells) {
      throw ArgumentError("joint state space exceeds " +
                          std::to_string(JointTable::kMaxCells) + " cells");
    }
  }
  return cells;
}

JointTable::JointTable(std::vector<Variable> variables, std::vector<double> probs)
    : variables_(std::move(variables)), probs_(std::move(probs)) {
  ValidateVariables(variables_);
  const std::size_t cells = StateSpaceSize(variables_);
  if (probs_.size() != cells) {
    throw ArgumentError("joint table has " + std::to_string(probs_.size()) +
                        " cells, expected " + std::to_string(cells));
  }
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw ArgumentError("joint table cell is negative or not finite");
    }
  }
  const double total = StableSum(probs_);
  if (std::abs(total - 1.0) > kSumTolerance) {
    throw ArgumentError("joint table sums to " + FormatDouble(total) + ", not 1");
  }
  strides_ = Strides(variables_);
}

JointTable JointTable::FromWeights(std::vector<Variable> variables,
                                   std::vector<double> weights) {
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ArgumentError("weights must be finite and non-negative");
    }
  }
  const double total = StableSum(weights);
  if (!(total > 0.0)) throw ArgumentError("weights have no mass");
  for (double& w : weights) w /= total;
  return JointTable(std::move(variables), std::move(weights));
}

JointTable JointTable::Uniform(std::vector<Variable> variables) {
  ValidateVariables(variables);
  const std::size_t cells = StateSpaceSize(variables);
  return JointTable(std::move(variables),
                    std::vector<double>(cells, 1.0 / static_cast<double>(cells)));
}

std::vector<std::string> JointTable::names() const {
  std::vector<std::string> out;
  out.reserve(variables_.size());
  for (const Variable& v : variables_) out.push_back(v.name);
  return out;
}

bool JointTable::Contains(std::string_view name) const {
  return std::any_of(variables_.begin(), variables_.end(),
                     [&](const Variable& v) { return v.name == name; });
}

std::size_t JointTable::IndexOf(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i].name == name) return i;
  }
  throw NameError("unknown variable '" + std::string(name) + "'");
}

std::size_t JointTable::Offset(std::span<const int> state) const {
  if (state.size() != variables_.size()) {
    throw ArgumentError("state has wrong number of indices");
  }
  std::size_t offset = 0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state[i] < 0 || state[i] >= variables_[i].cardinality) {
      throw ArgumentError("state index out of range for '" + variables_[i].name + "'");
    }
    offset += strides_[i] * static_cast<std::size_t>(state[i]);
  }
  return offset;
}

void JointTable::Decode(std::size_t offset, std::span<int> state) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    state[i] = static_cast<int>(offset / strides_[i]);
    offset %= strides_[i];
  }
}

JointTable Marginalize(const JointTable& table, const std::vector<std::string>& keep) {
  if (keep.empty()) throw ArgumentError("Marginalize: empty keep set");
  std::vector<std::size_t> positions = Positions(table, keep);
  std::sort(positions.begin(), positions.end());
  if (positions.size() == table.num_variables()) return table;

  std::vector<Variable> kept;
  for (std::size_t p : positions) kept.push_back(table.variables()[p]);
  const std::vector<std::size_t> kept_strides = Strides(kept);
  std::vector<double> out(StateSpaceSize(kept), 0.0);

  std::vector<int> state(table.num_variables(), 0);
  for (std::size_t cell = 0; cell < table.size(); ++cell) {
    std::size_t target = 0;
    for (std::size_t k = 0; k < positions.size(); ++k) {
      target += kept_strides[k] * static_cast<std::size_t>(state[positions[k]]);
    }
    out[target] += table.at(cell);
    NextState(state, table.variables());
  }
  return JointTable::FromWeights(std::move(kept), std::move(out));
}

JointTable Reorder(const JointTable& table, const std::vector<std::string>& order) {
  if (order.size() != table.num_variables()) {
    throw ArgumentError("Reorder: order must list every variable exactly once");
  }
  const std::vector<std::size_t> positions = Positions(table, order);
  std::vector<Variable> vars;
  for (std::size_t p : positions) vars.push_back(table.variables()[p]);
  const std::vector<std::size_t> strides = Strides(vars);
  std::vector<double> out(table.size());
  std::vector<int> state(table.num_variables(), 0);
  for (std::size_t cell = 0; cell < table.size(); ++cell) {
    std::size_t target = 0;
    for (std::size_t k = 0; k < positions.size(); ++k) {
      target += strides[k] * static_cast<std::size_t>(state[positions[k]]);
    }
    out[target] = table.at(cell);
    NextState(state, table.variables());
  }
  return JointTable(std::move(vars), std::move(out));
}

JointTable Condition(const JointTable& table, const std::map<std::string, int>& evidence) {
  std::vector<int> fixed(table.num_variables(), -1);
  for (const auto& [name, value] : evidence) {
    const std::size_t pos = table.IndexOf(name);
    if (value < 0 || value >= table.variables()[pos].cardinality) {
      throw ArgumentError("evidence state out of range for '" + name + "'");
    }
    fixed[pos] = value;
  }
  std::vector<Variable> rest;
  std::vector<std::size_t> rest_positions;
  for (std::size_t i = 0; i < table.num_variables(); ++i) {
    if (fixed[i] < 0) {
      rest.push_back(table.variables()[i]);
      rest_positions.push_back(i);
    }
  }
  const std::vector<std::size_t> strides = Strides(rest);
  std::vector<double> out(StateSpaceSize(rest), 0.0);
  std::vector<int> state(table.num_variables(), 0);
  double mass = 0.0;
  for (std::size_t cell = 0; cell < table.size(); ++cell) {
    bool match = true;
    for (std::size_t i = 0; i < state.size() && match; ++i) {
      match = fixed[i] < 0 || fixed[i] == state[i];
    }
    if (match) {
      std::size_t target = 0;
      for (std::size_t k = 0; k < rest_positions.size(); ++k) {
        target += strides[k] * static_cast<std::size_t>(state[rest_positions[k]]);
      }
      out[target] += table.at(cell);
      mass += table.at(cell);
    }
    NextState(state, table.variables());
  }
  if (!(mass > 0.0)) throw DegenerateEvidence("conditioning on a zero-probability event");
  return JointTable::FromWeights(std::move(rest), std::move(out));
}

JointTable Product(const JointTable& left, const JointTable& right) {
  std::vector<Variable> vars = left.variables();
  vars.insert(vars.end(), right.variables().begin(), right.variables().end());
  ValidateVariables(vars);
  std::vector<double> out;
  out.reserve(StateSpaceSize(vars));
  for (double l : left.probs()) {
    for (double r : right.probs()) out.push_back(l * r);
  }
  return JointTable::FromWeights(std::move(vars), std::move(out));
}

IndependenceReport IsIndependent(const JointTable& table,
                                 const std::vector<std::string>& a,
                                 const std::vector<std::string>& b,
                                 const std::vector<std::string>& given, double tol) {
  if (a.empty() || b.empty()) throw ArgumentError("IsIndependent: empty variable set");
  if (!(tol > 0.0)) throw ArgumentError("IsIndependent: tolerance must be positive");
  std::vector<std::string> all = given;
  all.insert(all.end(), a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  {
    std::set<std::string_view> seen;
    for (const std::string& name : all) {
      if (!seen.insert(name).second) {
        throw ArgumentError("IsIndependent: variable sets overlap at '" + name + "'");
      }
    }
  }
  const JointTable joint = Reorder(Marginalize(table, all), all);

  std::size_t given_cells = 1;
  for (const std::string& name : given) given_cells *= joint.Cardinality(name);
  std::size_t a_cells = 1;
  for (const std::string& name : a) a_cells *= joint.Cardinality(name);
  std::size_t b_cells = 1;
  for (const std::string& name : b) b_cells *= joint.Cardinality(name);

  IndependenceReport report;
  report.variables = all;
  std::size_t best_cell = 0;
  std::vector<double> pa(a_cells);
  std::vector<double> pb(b_cells);
  for (std::size_t g = 0; g < given_cells; ++g) {
    const std::size_t base = g * a_cells * b_cells;
    std::fill(pa.begin(), pa.end(), 0.0);
    std::fill(pb.begin(), pb.end(), 0.0);
    double pg = 0.0;
    for (std::size_t i = 0; i < a_cells; ++i) {
      for (std::size_t j = 0; j < b_cells; ++j) {
        const double p = joint.at(base + i * b_cells + j);
        pa[i] += p;
        pb[j] += p;
        pg += p;
      }
    }
    if (!(pg > 0.0)) continue;
    for (std::size_t i = 0; i < a_cells; ++i) {
      for (std::size_t j = 0; j < b_cells; ++j) {
        const double pab = joint.at(base + i * b_cells + j) / pg;
        const double gap = std::abs(pab - (pa[i] / pg) * (pb[j] / pg));
        if (gap > report.max_gap) {
          report.max_gap = gap;
          best_cell = base + i * b_cells + j;
        }
      }
    }
  }
  report.state.assign(joint.num_variables(), 0);
  joint.Decode(best_cell, report.state);
  report.independent = report.max_gap <= tol;
  return report;
}

SampleBatch Sample(const JointTable& table, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ArgumentError("Sample: n must be at least 1");
  std::vector<double> cumulative(table.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    acc += table.at(i);
    cumulative[i] = acc;
  }
  Rng rng(seed);
  std::vector<int> states(n * table.num_variables());
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t cell = rng.FromCumulative(cumulative);
    table.Decode(cell, std::span<int>(states.data() + r * table.num_variables(),
                                      table.num_variables()));
  }
  return SampleBatch(table.variables(), std::move(states));
}

JointTable Empirical(const SampleBatch& batch) {
  JointTable shape = JointTable::Uniform(batch.variables());
  std::vector<double> weights(shape.size(), 0.0);
  for (std::size_t r = 0; r < batch.size(); ++r) {
    weights[shape.Offset(batch.Row(r))] += batch.weights()[r];
  }
  return JointTable::FromWeights(batch.variables(), std::move(weights));
}

std::string SerializeJointTable(const JointTable& table) {
  std::ostringstream out;
  out << "jbal-joint-table 1\n";
  out << "variables " << table.num_variables() << "\n";
  for (const Variable& v : table.variables()) out << v.name << " " << v.cardinality << "\n";
  out << "cells " << table.size() << "\n";
  std::vector<int> state(table.num_variables());
  for (std::size_t cell = 0; cell < table.size(); ++cell) {
    table.Decode(cell, state);
    for (std::size_t i = 0; i < state.size(); ++i) {
      if (i > 0) out << ' ';
      out << state[i];
    }
    out << ", " << FormatDouble(table.at(cell)) << "\n";
  }
  return out.str();
}

JointTable ParseJointTable(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  auto next_line = [&](const char* what) {
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      return;
    }
    throw ParseError(std::string("joint table: missing ") + what);
  };
  next_line("header");
  if (line != "jbal-joint-table 1") throw ParseError("joint table: bad header '" + line + "'");
  next_line("variable count");
  std::size_t count = 0;
  {
    std::istringstream fields(line);
    std::string key;
    if (!(fields >> key >> count) || key != "variables") {
      throw ParseError("joint table: expected 'variables <count>'");
    }
  }
  std::vector<Variable> vars;
  for (std::size_t i = 0; i < count; ++i) {
    next_line("variable");
    std::istringstream fields(line);
    Variable v;
    if (!(fields >> v.name >> v.cardinality)) {
      throw ParseError("joint table: bad variable line '" + line + "'");
    }
    vars.push_back(v);
  }
  ValidateVariables(vars);
  const std::size_t cells = StateSpaceSize(vars);
  next_line("cell count");
  {
    std::istringstream fields(line);
    std::string key;
    std::size_t declared = 0;
    if (!(fields >> key >> declared) || key != "cells" || declared != cells) {
      throw ParseError("joint table: bad cell count line '" + line + "'");
    }
  }
  JointTable shape = JointTable::Uniform(vars);
  std::vector<double> probs(cells, 0.0);
  std::vector<bool> seen(cells, false);
  std::vector<int> state(vars.size());
  for (std::size_t c = 0; c < cells; ++c) {
    next_line("cell");
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) throw ParseError("joint table: bad cell line '" + line + "'");
    std::istringstream idx(line.substr(0, comma));
    for (int& s : state) {
      if (!(idx >> s)) throw ParseError("joint table: bad cell indices '" + line + "'");
    }
    const std::string value_text = line.substr(comma + 1);
    const char* begin = value_text.data();
    while (*begin == ' ') ++begin;
    double value = 0.0;
    const auto result = std::from_chars(begin, value_text.data() + value_text.size(), value);
    if (result.ec != std::errc()) throw ParseError("joint table: bad probability '" + line + "'");
    const std::size_t offset = shape.Offset(state);
    if (seen[offset]) throw ParseError("joint table: duplicate cell '" + line + "'");
    seen[offset] = true;
    probs[offset] = value;
  }
  return JointTable(std::move(vars), std::move(probs));
}

}  // namespace jbal
