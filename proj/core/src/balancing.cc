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

#include "jbal/balancing.h"

#include <algorithm>
#include <cmath>

#include "jbal/errors.h"
#include "jbal/rng.h"

namespace jbal {
namespace {

void ValidateSpec(const BalanceSpec& spec) {
  if (spec.y.empty()) throw ArgumentError("balance spec without target variable");
  if (spec.z && *spec.z == spec.y) throw ArgumentError("balance targets must differ");
  if (Resamples(spec.mechanism) && !spec.seed) {
    throw ArgumentError(std::string("mechanism ") + MechanismName(spec.mechanism) +
                        " needs a seed");
  }
  if (!Resamples(spec.mechanism) && spec.seed) {
    throw ArgumentError(std::string("mechanism ") + MechanismName(spec.mechanism) +
                        " does not take a seed");
  }
}

std::string CellName(const std::string& y, int ys, const std::string& z, int zs) {
  std::string out = y + "=" + std::to_string(ys);
  if (!z.empty()) out += ", " + z + "=" + std::to_string(zs);
  return out;
}

}  // namespace

const char* MechanismName(Mechanism m) {
  switch (m) {
    case Mechanism::kExactReweight: return "exact";
    case Mechanism::kImportanceWeights: return "importance";
    case Mechanism::kSubsampleMajority: return "subsample";
    case Mechanism::kUpsampleMinority: return "upsample";
  }
  return "?";
}

Mechanism ParseMechanism(const std::string& name) {
  if (name == "exact") return Mechanism::kExactReweight;
  if (name == "importance") return Mechanism::kImportanceWeights;
  if (name == "subsample") return Mechanism::kSubsampleMajority;
  if (name == "upsample") return Mechanism::kUpsampleMinority;
  throw ArgumentError("unknown balancing mechanism '" + name +
                      "' (expected exact, importance, subsample or upsample)");
}

bool Resamples(Mechanism m) {
  return m == Mechanism::kSubsampleMajority || m == Mechanism::kUpsampleMinority;
}

JointTable BalanceExact(const JointTable& table, const BalanceSpec& spec) {
  if (!spec.z) throw ArgumentError("BalanceExact needs a joint (y, z) target");
  const std::size_t iy = table.IndexOf(spec.y);
  const std::size_t iz = table.IndexOf(*spec.z);
  if (iy == iz) throw ArgumentError("balance targets must differ");
  const int cy = table.variables()[iy].cardinality;
  const int cz = table.variables()[iz].cardinality;
  std::vector<double> pyz(static_cast<std::size_t>(cy * cz), 0.0);
  std::vector<int> state(table.num_variables());
  for (std::size_t cell = 0; cell < table.size(); ++cell) {
    table.Decode(cell, state);
    pyz[static_cast<std::size_t>(state[iy] * cz + state[iz])] += table.at(cell);
  }
  std::vector<double> py(static_cast<std::size_t>(cy), 0.0);
  std::vector<double> pz(static_cast<std::size_t>(cz), 0.0);
  for (int y = 0; y < cy; ++y) {
    for (int z = 0; z < cz; ++z) {
      py[y] += pyz[y * cz + z];
      pz[z] += pyz[y * cz + z];
    }
  }
  std::vector<double> ratio(pyz.size(), 0.0);
  for (int y = 0; y < cy; ++y) {
    for (int z = 0; z < cz; ++z) {
      const double target = py[y] * pz[z];
      const double mass = pyz[y * cz + z];
      if (mass > 0.0) {
        ratio[y * cz + z] = target / mass;
      } else if (target > 0.0) {
        throw UnbalanceableSupport("cell (" + CellName(spec.y, y, *spec.z, z) +
                                   ") has zero mass but positive marginals");
      }
    }
  }
  std::vector<double> q(table.size());
  for (std::size_t cell = 0; cell < table.size(); ++cell) {
    table.Decode(cell, state);
    q[cell] = table.at(cell) * ratio[static_cast<std::size_t>(state[iy] * cz + state[iz])];
  }
  return JointTable::FromWeights(table.variables(), std::move(q));
}

JointTable BalanceSingleExact(const JointTable& table, const BalanceSpec& spec) {
  if (spec.z) throw ArgumentError("BalanceSingleExact needs a single-variable target");
  const std::size_t iy = table.IndexOf(spec.y);
  const int cy = table.variables()[iy].cardinality;
  std::vector<double> py(static_cast<std::size_t>(cy), 0.0);
  std::vector<int> state(table.num_variables());
  for (std::size_t cell = 0; cell < table.size(); ++cell) {
    table.Decode(cell, state);
    py[state[iy]] += table.at(cell);
  }
  for (int y = 0; y < cy; ++y) {
    if (!(py[y] > 0.0)) {
      throw UnbalanceableSupport("state " + CellName(spec.y, y, "", 0) + " has zero mass");
    }
  }
  std::vector<double> q(table.size());
  for (std::size_t cell = 0; cell < table.size(); ++cell) {
    table.Decode(cell, state);
    q[cell] = table.at(cell) / (static_cast<double>(cy) * py[state[iy]]);
  }
  return JointTable::FromWeights(table.variables(), std::move(q));
}

BalancePlan PlanBalance(const SampleBatch& batch, const BalanceSpec& spec) {
  ValidateSpec(spec);
  if (batch.size() == 0) throw ArgumentError("cannot balance an empty batch");
  const std::size_t iy = batch.IndexOf(spec.y);
  const bool joint = spec.z.has_value();
  const std::size_t iz = joint ? batch.IndexOf(*spec.z) : 0;
  const int cy = batch.variables()[iy].cardinality;
  const int cz = joint ? batch.variables()[iz].cardinality : 1;
  const std::string zname = joint ? *spec.z : "";
  auto cell_of = [&](std::size_t r) {
    return static_cast<std::size_t>(batch.At(r, iy) * cz + (joint ? batch.At(r, iz) : 0));
  };

  const std::size_t cells = static_cast<std::size_t>(cy * cz);
  std::vector<std::vector<std::size_t>> members(cells);
  std::vector<double> mass(cells, 0.0);
  for (std::size_t r = 0; r < batch.size(); ++r) {
    members[cell_of(r)].push_back(r);
    mass[cell_of(r)] += batch.weights()[r];
  }
  for (std::size_t c = 0; c < cells; ++c) {
    if (members[c].empty() || !(mass[c] > 0.0)) {
      throw UnbalanceableSupport("cell (" + CellName(spec.y, static_cast<int>(c) / cz, zname,
                                                     static_cast<int>(c) % cz) +
                                 ") is empty");
    }
  }

  BalancePlan plan;
  switch (spec.mechanism) {
    case Mechanism::kExactReweight:
    case Mechanism::kImportanceWeights: {
      double total = 0.0;
      std::vector<double> my(static_cast<std::size_t>(cy), 0.0);
      std::vector<double> mz(static_cast<std::size_t>(cz), 0.0);
      for (std::size_t c = 0; c < cells; ++c) {
        total += mass[c];
        my[c / cz] += mass[c];
        mz[c % cz] += mass[c];
      }
      plan.rows.resize(batch.size());
      plan.weights.resize(batch.size());
      for (std::size_t r = 0; r < batch.size(); ++r) {
        const std::size_t c = cell_of(r);
        // Joint: n(y) n(z) / (n n(y,z)); single: n / (K n(y)).
        const double factor = joint ? my[c / cz] * mz[c % cz] / (total * mass[c])
                                    : total / (static_cast<double>(cy) * mass[c]);
        plan.rows[r] = r;
        plan.weights[r] = batch.weights()[r] * factor;
      }
      break;
    }
    case Mechanism::kSubsampleMajority: {
      std::size_t target = batch.size();
      for (const auto& m : members) target = std::min(target, m.size());
      Rng rng(*spec.seed);
      for (std::size_t c = 0; c < cells; ++c) {
        std::vector<std::size_t> pool = members[c];
        Rng cell_rng = rng.Split(c);
        cell_rng.Shuffle(pool);
        plan.rows.insert(plan.rows.end(), pool.begin(), pool.begin() + target);
      }
      std::sort(plan.rows.begin(), plan.rows.end());
      for (std::size_t r : plan.rows) plan.weights.push_back(batch.weights()[r]);
      break;
    }
    case Mechanism::kUpsampleMinority: {
      std::size_t target = 0;
      for (const auto& m : members) target = std::max(target, m.size());
      Rng rng(*spec.seed);
      plan.rows.resize(batch.size());
      for (std::size_t r = 0; r < batch.size(); ++r) plan.rows[r] = r;
      for (std::size_t c = 0; c < cells; ++c) {
        Rng cell_rng = rng.Split(c);
        for (std::size_t k = members[c].size(); k < target; ++k) {
          plan.rows.push_back(members[c][cell_rng.UniformInt(members[c].size())]);
        }
      }
      for (std::size_t r : plan.rows) plan.weights.push_back(batch.weights()[r]);
      break;
    }
  }
  return plan;
}

SampleBatch BalanceBatch(const SampleBatch& batch, const BalanceSpec& spec) {
  BalancePlan plan = PlanBalance(batch, spec);
  return batch.Select(plan.rows, std::move(plan.weights));
}

BiasShift BiasShiftSingle(double p_y1, double ez_given_y1, double ez_given_y0) {
  for (double v : {p_y1, ez_given_y1, ez_given_y0}) {
    if (!(v >= 0.0 && v <= 1.0)) throw ArgumentError("bias shift inputs must lie in [0, 1]");
  }
  BiasShift out;
  const double ez = p_y1 * ez_given_y1 + (1.0 - p_y1) * ez_given_y0;
  out.before = ez - 0.5;
  out.after = 0.5 * (ez_given_y1 + ez_given_y0) - 0.5;
  out.bound = std::abs(p_y1 - 0.5) * std::abs(ez_given_y1 - ez_given_y0);
  out.worsens = std::abs(out.after) > std::abs(out.before);
  const double shift = (p_y1 - 0.5) * (ez_given_y0 - ez_given_y1);
  out.sign_condition = out.before * shift > 0.0;
  return out;
}

}  // namespace jbal
