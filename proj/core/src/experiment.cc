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

#include "jbal/experiment.h"

#include "jbal/errors.h"
#include "jbal/propcheck.h"
#include "jbal/rng.h"
#include "jbal/sample_batch.h"

namespace jbal {
namespace {

enum Stream : std::uint64_t {
  kGenStream = 10,
  kBalanceStream,
  kTrainStream,
  kIdealStream,
  kShiftStream,
  kProbeStream,
  kSourceStream,
};

}  // namespace

Dataset BalanceDataset(const Dataset& data, Mechanism mechanism, std::uint64_t seed) {
  data.Validate();
  std::vector<int> states;
  states.reserve(2 * data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    states.push_back(data.y[i]);
    states.push_back(data.z[i]);
  }
  const SampleBatch batch({{"Y", 2}, {"Z", 2}}, std::move(states), data.weights);
  const BalanceSpec spec = BalanceSpec::Joint(
      "Y", "Z", mechanism, Resamples(mechanism) ? std::optional<std::uint64_t>(seed) : std::nullopt);
  BalancePlan plan = PlanBalance(batch, spec);
  return data.Select(plan.rows, std::move(plan.weights));
}

double BalancedZ0(const GenSpec& spec) {
  return Marginalize(LatentJoint(spec), {"Z"}).at(0);
}

GenSpec CellGenSpec(const CellSpec& cell) {
  GenSpec gen = cell.gen;
  gen.seed = DeriveSeed(cell.seed, kGenStream);
  return gen;
}

Dataset CellTrainingData(const CellSpec& cell) { return Generate(CellGenSpec(cell)); }

Dataset CellBalance(const Dataset& train, const CellSpec& cell) {
  if (!cell.balanced) return train;
  return BalanceDataset(train, cell.mechanism, DeriveSeed(cell.seed, kBalanceStream));
}

TrainResult CellTrain(const Dataset& train, const CellSpec& cell) {
  TrainSpec ts = cell.train;
  ts.seed = DeriveSeed(cell.seed, kTrainStream);
  return Train(train, ts);
}

CellTestsets CellTestData(const CellSpec& cell) {
  const GenSpec gen = CellGenSpec(cell);
  CellTestsets out;
  if (cell.balanced) {
    const double z0 = BalancedZ0(gen);
    const std::array<double, 2> row = {z0, 1.0 - z0};
    const std::array<std::array<double, 2>, 2> balanced = {row, row};
    out.source = ShiftTestsets(gen, {balanced}, cell.eval.source_n,
                               DeriveSeed(cell.seed, kSourceStream)).front();
  } else {
    GenSpec fresh = gen;
    fresh.n = cell.eval.source_n;
    fresh.seed = DeriveSeed(cell.seed, kSourceStream);
    out.source = Generate(fresh);
  }
  out.ideal = IdealTestset(gen, cell.eval.ideal_n, DeriveSeed(cell.seed, kIdealStream));
  if (cell.eval.shift_points >= 2) {
    out.shift = ShiftTestsets(gen, DefaultShiftGrid(cell.eval.shift_points), cell.eval.shift_n,
                              DeriveSeed(cell.seed, kShiftStream));
  }
  return out;
}

void EvaluateCell(const ModelParams& model, const CellTestsets& tests, const CellSpec& cell,
                  CellResult* out) {
  const EvalPlan& plan = cell.eval;
  const double thr = plan.options.threshold;
  out->source = {};
  out->ideal = {};
  if (tests.source.size() > 0) {
    out->source = Evaluate(model, tests.source, plan.options);
    out->source.risk_gaps["source"] = Risk(model, tests.source, plan.shift_loss, thr);
  }
  if (tests.ideal.size() > 0) {
    out->ideal = Evaluate(model, tests.ideal, plan.options);
    if (plan.probe) {
      out->ideal.encoding =
          ProbeEncoding(model, tests.ideal, ProbeTarget::kZ, DeriveSeed(cell.seed, kProbeStream));
    }
    out->ideal.risk_gaps["ideal"] = Risk(model, tests.ideal, plan.shift_loss, thr);
  }
  out->shift.reset();
  if (tests.shift.size() >= 2) {
    out->shift = RiskInvarianceReport(model, tests.shift, plan.shift_loss, thr);
    for (std::size_t i = 0; i < out->shift->risks.size(); ++i) {
      out->ideal.risk_gaps["shift" + std::to_string(i)] = out->shift->risks[i];
    }
  }
}

CellResult RunCell(const CellSpec& cell) {
  const Dataset train = CellBalance(CellTrainingData(cell), cell);
  CellResult out;
  out.train_rows = train.size();
  out.training = CellTrain(train, cell);
  EvaluateCell(out.training.params, CellTestData(cell), cell, &out);
  return out;
}

}  // namespace jbal
