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

// Acceptance run: one PASS/FAIL line per criterion with its measured values,
// tolerances and wall-clock limit. Exits nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <string>
#include <vector>

#include "jbal/balancing.h"
#include "jbal/errors.h"
#include "jbal/experiment.h"
#include "jbal/propcheck.h"
#include "jbal/templates.h"
#include "test_util.h"

namespace jbal {
namespace {

using namespace jbal::testing;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool Run(int id, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = dt < limit_s;
  const bool pass = o.pass && in_time;
  std::printf("criterion %d: %s | %s | runtime %.2fs (limit %.0fs%s)\n", id, pass ? "PASS" : "FAIL",
              o.detail.c_str(), dt, limit_s, in_time ? "" : ", exceeded");
  std::fflush(stdout);
  return pass;
}

Outcome ExactBalancing() {
  Rng rng(1);
  BalanceGaps worst;
  for (int i = 0; i < 100; ++i) {
    const BalanceGaps g = CheckBalance(RandomPositiveJoint(rng));
    worst.independence = std::max(worst.independence, g.independence);
    worst.conditional = std::max(worst.conditional, g.conditional);
    worst.idempotence = std::max(worst.idempotence, g.idempotence);
  }
  const bool pass = worst.independence < 1e-12 && worst.conditional < 1e-12 && worst.idempotence < 1e-12;
  return {pass, Fmt("100 joints: max Y-Z gap %.2e, max P(X|Y,Z) change %.2e, max idempotence "
                    "change %.2e (tol 1e-12)",
                    worst.independence, worst.conditional, worst.idempotence)};
}

Outcome NonFactorization() {
  bool pass = true;
  std::string detail;
  for (CounterexampleId id : {CounterexampleId::kC1, CounterexampleId::kC2, CounterexampleId::kC3,
                              CounterexampleId::kC4}) {
    try {
      const Counterexample c = BalancingCounterexample(id, 0);
      const double gap = c.report.violations.front().gap;
      pass = pass && gap > 1e-6;
      detail += Fmt("%s gap %.3g; ", CounterexampleName(id), gap);
    } catch (const CounterexampleNotFound&) {
      pass = false;
      detail += Fmt("%s no violation found; ", CounterexampleName(id));
    }
  }
  const GraphTemplate a = MakeTemplate(GraphId::kA);
  const JointTable q = BalanceExact(ObservedJoint(a), BalanceSpec::Joint("Y", "Z"));
  const FactorizationReport r = FactorizesAccordingTo(q, ObservedSkeletonWithoutConfounding(a), 1e-9);
  pass = pass && r.factorizes;
  detail += Fmt("graph A control %s (tol 1e-9); threshold 1e-6",
                r.factorizes ? "factorizes" : "violates");
  return {pass, detail};
}

Outcome ChiSquareReplication() {
  int ok = 0;
  double worst_yz = 1.0, worst_xz = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ResamplingTestResult r = SimulateResamplingTest(10000, seed);
    ok += r.p_value_yz > 0.05 && r.p_value_xz < 0.001;
    worst_yz = std::min(worst_yz, r.p_value_yz);
    worst_xz = std::max(worst_xz, r.p_value_xz);
  }
  return {ok >= 18, Fmt("%d/20 runs accept Y-Z (p > 0.05) and reject X-Z (p < 0.001), need 18; "
                        "min p(Y,Z) %.3g, max p(X,Z) %.3g",
                        ok, worst_yz, worst_xz)};
}

Outcome BiasShiftBound() {
  const BiasGridResult g = ScanBiasShiftGrid(100);
  const BiasShift w = BiasShiftSingle(0.25, 1.0, 1.0 / 3.0);
  const double after_value = w.after + 0.5;
  const bool pass = g.identity_slack <= 1e-12 && g.bound_slack <= 1e-12 &&
                    g.sign_without_worsening == 0 && std::abs(w.after - 1.0 / 6.0) <= 1e-12 &&
                    std::abs(after_value - 2.0 / 3.0) <= 1e-12;
  return {pass, Fmt("100^3 grid: identity slack %.2e, bound slack %.2e, sign-condition misses %zu; "
                    "worked example after-bias %.15f (E[Z] %.15f)",
                    g.identity_slack, g.bound_slack, g.sign_without_worsening, w.after, after_value)};
}

// E[f | Z=z] for the entangled model, by enumeration of (Y, Z, X).
std::array<double, 2> EntangledEnumeration(double p, double q) {
  double joint[2][2][2];
  for (int y = 0; y < 2; ++y)
    for (int z = 0; z < 2; ++z) {
      const double px1 = (y == 1 || z == 1) ? p : q;
      joint[y][z][1] = 0.25 * px1;
      joint[y][z][0] = 0.25 * (1.0 - px1);
    }
  double f[2] = {0, 0};
  for (int x = 0; x < 2; ++x) {
    const double den = joint[0][0][x] + joint[0][1][x] + joint[1][0][x] + joint[1][1][x];
    if (den > 0) f[x] = (joint[1][0][x] + joint[1][1][x]) / den;
  }
  std::array<double, 2> e{};
  for (int z = 0; z < 2; ++z) {
    double num = 0, den = 0;
    for (int y = 0; y < 2; ++y)
      for (int x = 0; x < 2; ++x) {
        num += joint[y][z][x] * f[x];
        den += joint[y][z][x];
      }
    e[z] = num / den;
  }
  return e;
}

Outcome EntangledClosedForm() {
  const EntangledGap g = EntangledGapClosedForm(1.0, 0.0);
  const bool exact = g.e_f_given_z1 == 2.0 / 3.0 && g.e_f_given_z0 == 1.0 / 3.0;
  double worst = 0.0;
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j <= 20; ++j) {
      const double p = i / 20.0, q = j / 20.0;
      const EntangledGap c = EntangledGapClosedForm(p, q);
      const auto e = EntangledEnumeration(p, q);
      worst = std::max({worst, std::abs(c.e_f_given_z1 - e[1]), std::abs(c.e_f_given_z0 - e[0])});
    }
  }
  return {exact && worst <= 1e-12,
          Fmt("(p,q)=(1,0) gives (%.17g, %.17g); 21x21 grid max deviation %.2e (tol 1e-12)",
              g.e_f_given_z1, g.e_f_given_z0, worst)};
}

Outcome RiskInvariance() {
  Rng rng(6);
  double worst_gap = 0.0;
  std::size_t instances = 0;
  std::vector<GraphTemplate> spurious = {MakeTemplate(GraphId::kA)};
  for (int i = 0; i < 50; ++i) spurious.push_back(RandomTemplate(GraphId::kA, rng));
  for (const GraphTemplate& t : spurious) {
    const JointTable q = BalanceExact(ObservedJoint(t), BalanceSpec::Joint("Y", "Z"));
    const ShiftFamily family{q, DefaultShiftGrid()};
    const TablePredictor f = BayesPredictor(q, CovariatesWith(q, t.labels, Component::kXZperp));
    for (Loss loss : {Loss::kSquared, Loss::kLogLoss, Loss::kZeroOne}) {
      worst_gap = std::max(worst_gap, RiskInvarianceGap(f, family, loss).sup_gap);
    }
    ++instances;
  }
  std::size_t checks = 0, violations = 0, outside = 0;
  for (GraphId id : {GraphId::kA, GraphId::kB, GraphId::kC, GraphId::kD}) {
    for (int i = 0; i < 10; ++i) {
      const GraphTemplate t = i == 0 ? MakeTemplate(id) : RandomTemplate(id, rng);
      const JointTable q = BalanceExact(ObservedJoint(t), BalanceSpec::Joint("Y", "Z"));
      const ShiftFamily family{q, DefaultShiftGrid()};
      std::vector<std::string> all;
      for (const auto& [name, c] : t.labels) all.push_back(name);
      const std::vector<std::vector<std::string>> input_sets = {
          all, CovariatesWith(q, t.labels, Component::kXZperp)};
      for (const auto& inputs : input_sets) {
        for (double size : {0.0, 0.01, 0.05, 0.1, 0.2, 0.4}) {
          const ApproximationBoundResult r =
              CheckApproximationBound(PerturbedPredictor(q, inputs, size, rng), family, t.labels);
          if (!r.assumption_holds) {
            ++outside;
            continue;
          }
          ++checks;
          violations += !r.bound_holds;
        }
      }
    }
  }
  return {worst_gap < 1e-9 && violations == 0,
          Fmt("%zu balanced graph-A instances x 3 losses: max risk gap %.2e over 7 shifts (tol "
              "1e-9); approximation bound violated in %zu of %zu perturbed predictors (%zu more skipped: "
              "Bayes on X_Z^perp not risk-invariant there)",
              instances, worst_gap, violations, checks, outside)};
}

Outcome FairnessUnderBalancing() {
  Rng rng(7);
  std::size_t instances = 0, failures = 0;
  double worst = 0.0;
  while (instances < 50) {
    const GraphTemplate t = RandomTemplate(GraphId::kA, rng);
    const JointTable p = ObservedJoint(t);
    bool premise = true;
    std::vector<FairnessTransferReport> reports;
    for (FairnessCriterion c : {FairnessCriterion::kDemographicParity,
                                FairnessCriterion::kPredictiveParity,
                                FairnessCriterion::kEqualizedOdds}) {
      reports.push_back(CheckFairnessTransfer(p, t.labels, c, std::nullopt, 1e-12));
      premise = premise && reports.back().premise_holds;
    }
    if (!premise) continue;
    ++instances;
    for (const FairnessTransferReport& r : reports) {
      failures += !r.conclusion_holds;
      worst = std::max(worst, r.conclusion_gap);
    }
  }
  const JointTable x = XorCounterexample();
  const double wz = IsIndependent(x, {"W"}, {"Z"}, {}).max_gap;
  const double yz = IsIndependent(x, {"Y"}, {"Z"}, {}).max_gap;
  const double yz_w = IsIndependent(x, {"Y"}, {"Z"}, {"W"}).max_gap;
  const bool xor_ok = wz == 0.0 && yz == 0.0 && yz_w > 0.0;
  return {failures == 0 && xor_ok,
          Fmt("%zu premise-satisfying instances x 3 criteria: %zu failures, max gap %.2e (tol "
              "1e-12); XOR: W-Z gap %g, Y-Z gap %g, Y-Z given W gap %g",
              instances, failures, worst, wz, yz, yz_w)};
}

struct Means {
  double ideal_acc = 0, ideal_wg = 0, eo = 0, enc = 0, source_acc = 0;
  std::vector<double> shift_gap;
};

CellSpec Cell(GraphId g, bool balanced, MmdMode mode = MmdMode::kNone, double strength = 0.0) {
  CellSpec c;
  c.gen = GenSpec::Defaults(g);
  c.balanced = balanced;
  c.train.mmd.mode = mode;
  c.train.mmd.strength = strength;
  return c;
}

Means RunSeeds(CellSpec cell, int seeds = 5) {
  std::vector<std::future<CellResult>> jobs;
  for (int s = 0; s < seeds; ++s) {
    cell.seed = static_cast<std::uint64_t>(s);
    jobs.push_back(std::async(std::launch::async, RunCell, cell));
  }
  Means m;
  for (auto& j : jobs) {
    const CellResult r = j.get();
    m.ideal_acc += r.ideal.accuracy / seeds;
    m.ideal_wg += r.ideal.worst_group / seeds;
    m.eo += r.ideal.equalized_odds / seeds;
    m.enc += r.ideal.encoding.value_or(0.0) / seeds;
    m.source_acc += r.source.accuracy / seeds;
    m.shift_gap.push_back(r.shift ? r.shift->max_gap : 0.0);
  }
  return m;
}

Outcome TableTwo() {
  const Means a_p = RunSeeds(Cell(GraphId::kA, false));
  const Means a_q = RunSeeds(Cell(GraphId::kA, true));
  const Means c_q = RunSeeds(Cell(GraphId::kC, true));
  const Means d_q = RunSeeds(Cell(GraphId::kD, true));
  const bool confounded = a_p.ideal_wg < 0.6 && a_p.enc > 0.8;
  const bool balanced = std::abs(a_q.source_acc - a_q.ideal_acc) < 0.05 &&
                        a_q.ideal_acc - a_q.ideal_wg <= 0.1 && a_q.eo < 0.1 &&
                        std::abs(a_q.enc - 0.5) <= 0.1;
  const bool c_fails = c_q.eo > 0.05 || c_q.ideal_acc - c_q.ideal_wg > 0.1;
  const bool d_fails = d_q.ideal_acc - d_q.ideal_wg >= 0.2;
  return {confounded && balanced && c_fails && d_fails,
          Fmt("5-seed means. A on P*: ideal WG %.3f (< 0.6), encoding %.3f (> 0.8). A on Q: "
              "acc Q %.3f vs ideal %.3f (diff < 0.05), ideal WG %.3f (within 0.1), EO %.3f "
              "(< 0.1), encoding %.3f (within 0.1 of 0.5). C on Q: EO %.3f (> 0.05) or WG gap %.3f "
              "(> 0.1). D on Q: WG gap %.3f (>= 0.2)",
              a_p.ideal_wg, a_p.enc, a_q.source_acc, a_q.ideal_acc, a_q.ideal_wg, a_q.eo, a_q.enc,
              c_q.eo, c_q.ideal_acc - c_q.ideal_wg, d_q.ideal_acc - d_q.ideal_wg)};
}

Outcome RegularizerInteraction() {
  constexpr double kMedium = 4.0;
  const Means d0 = RunSeeds(Cell(GraphId::kD, true));
  const Means d1 = RunSeeds(Cell(GraphId::kD, true, MmdMode::kConditional, kMedium));
  const Means c0 = RunSeeds(Cell(GraphId::kC, true));
  const Means c1 = RunSeeds(Cell(GraphId::kC, true, MmdMode::kConditional, kMedium));
  const Means bp = RunSeeds(Cell(GraphId::kB, false, MmdMode::kMarginal, kMedium));
  const Means bq = RunSeeds(Cell(GraphId::kB, true, MmdMode::kMarginal, kMedium));
  int larger = 0;
  for (std::size_t s = 0; s < bp.shift_gap.size(); ++s) larger += bq.shift_gap[s] > bp.shift_gap[s];
  const bool i = d1.ideal_wg - d0.ideal_wg >= 0.1;
  const bool ii = c0.ideal_wg - c1.ideal_wg >= 0.1;
  const bool iii = larger >= 4;
  return {i && ii && iii,
          Fmt("strength %.0f, 5-seed means. (i) D: ideal WG %.3f -> %.3f, rise %.3f (>= 0.1) %s. "
              "(ii) C: ideal WG %.3f -> %.3f, drop %.3f (>= 0.1) %s. (iii) B: shift-risk gap Q > "
              "P* in %d/5 seeds (>= 4), means Q %.3f P* %.3f %s",
              kMedium, d0.ideal_wg, d1.ideal_wg, d1.ideal_wg - d0.ideal_wg, i ? "ok" : "not met",
              c0.ideal_wg, c1.ideal_wg, c0.ideal_wg - c1.ideal_wg, ii ? "ok" : "not met", larger,
              [&] { double s = 0; for (double v : bq.shift_gap) s += v; return s / 5; }(),
              [&] { double s = 0; for (double v : bp.shift_gap) s += v; return s / 5; }(),
              iii ? "ok" : "not met")};
}

Outcome Numerics() {
  Rng rng(10);
  double worst = 0.0;
  int modes[3] = {0, 0, 0};
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 2 + rng.UniformInt(4);
    const Dataset data = RandomDataset(rng, 24 + rng.UniformInt(24), d);
    TrainSpec s;
    s.arch = trial % 2 ? Architecture::kMlp : Architecture::kLinear;
    s.l2 = 0.02 * rng.Uniform();
    s.mmd.mode = static_cast<MmdMode>(trial % 3);
    ++modes[trial % 3];
    s.mmd.strength = 0.5 + 4 * rng.Uniform();
    s.mmd.bandwidth = 0.3 + rng.Uniform();
    s.mmd.on_representation = trial % 4 == 3;
    const ModelParams p = InitModel(s.arch, d, 3 + rng.UniformInt(4), trial);
    worst = std::max(worst, GradientRelativeError(p, data, s));
  }
  // Reproducibility: training directly and through a whole experiment cell.
  bool same = true;
  for (int k = 0; k < 6; ++k) {
    const Dataset data = RandomDataset(rng, 400, 4);
    TrainSpec s;
    s.arch = k % 2 ? Architecture::kMlp : Architecture::kLinear;
    s.mmd.mode = static_cast<MmdMode>(k % 3);
    s.mmd.strength = 2.0;
    s.epochs = 5;
    s.batch_size = 64;
    s.seed = 100 + k;
    const TrainResult a = Train(data, s);
    const TrainResult b = Train(data, s);
    same = same && a.params == b.params && a.bandwidth == b.bandwidth;
    for (std::size_t e = 0; e < a.log.size(); ++e) same = same && a.log[e].loss == b.log[e].loss;
  }
  for (Mechanism m : {Mechanism::kSubsampleMajority, Mechanism::kUpsampleMinority,
                      Mechanism::kImportanceWeights}) {
    CellSpec c = Cell(GraphId::kB, true, MmdMode::kConditional, 2.0);
    c.mechanism = m;
    c.gen.n = 3000;
    c.train.epochs = 3;
    c.seed = 9;
    const CellResult a = RunCell(c);
    const CellResult b = RunCell(c);
    same = same && a.training.params == b.training.params && a.ideal.accuracy == b.ideal.accuracy &&
           a.ideal.encoding == b.ideal.encoding && a.shift->risks == b.shift->risks;
  }
  return {worst <= 1e-4 && same,
          Fmt("20 gradient cases (%d none, %d marginal, %d conditional): max relative error %.2e "
              "(tol 1e-4); repeated training runs %s",
              modes[0], modes[1], modes[2], worst, same ? "bitwise identical" : "differ")};
}

}  // namespace
}  // namespace jbal

int main() {
  using namespace jbal;
  int failed = 0;
  failed += !Run(1, 5, ExactBalancing);
  failed += !Run(2, 5, NonFactorization);
  failed += !Run(3, 10, ChiSquareReplication);
  failed += !Run(4, 10, BiasShiftBound);
  failed += !Run(5, 1, EntangledClosedForm);
  failed += !Run(6, 10, RiskInvariance);
  failed += !Run(7, 5, FairnessUnderBalancing);
  failed += !Run(8, 300, TableTwo);
  failed += !Run(9, 600, RegularizerInteraction);
  failed += !Run(10, 30, Numerics);
  std::printf("%d of 10 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
