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


// Proposition checks behind `jbal verify <id>`.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>

#include <json.hpp>

#include "commands.h"
#include "jbal/balancing.h"
#include "jbal/errors.h"
#include "jbal/propcheck.h"
#include "jbal/rng.h"
#include "jbal/templates.h"

namespace jbal::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

struct Check {
  bool confirmed = false;
  std::string expected;
  Json details;
};

struct Args {
  std::uint64_t seed = 0;
  std::size_t grid = 50;
};

Json StatementJson(const FactorizationViolation& v) {
  Json j;
  j["a"] = v.statement.a;
  j["b"] = v.statement.b;
  j["given"] = v.statement.given;
  j["gap"] = v.gap;
  return j;
}

JointTable BalancedObserved(const GraphTemplate& t) {
  return BalanceExact(ObservedJoint(t), BalanceSpec::Joint(kY, kZ));
}

Check FindCounterexample(CounterexampleId id, const Args& a) {
  Check c;
  c.expected = "joint balancing of the source graph leaves an independence of the "
               "unconfounded skeleton violated";
  try {
    const Counterexample ce = BalancingCounterexample(id, a.seed);
    c.details["seed_used"] = ce.seed_used;
    c.details["attempts"] = ce.attempts;
    c.details["statements_checked"] = ce.report.statements_checked;
    Json v = Json::array();
    for (std::size_t i = 0; i < ce.report.violations.size() && i < 10; ++i) {
      v.push_back(StatementJson(ce.report.violations[i]));
    }
    c.details["violations"] = v;
    c.details["violation_count"] = ce.report.violations.size();
    c.confirmed = !ce.report.violations.empty();
  } catch (const CounterexampleNotFound& e) {
    c.details["error"] = e.what();
    c.details["attempts"] = kCounterexampleRetries;
  }
  c.details["threshold"] = kGenericViolation;
  return c;
}

Check SkeletonControl(const Args&) {
  const GraphTemplate t = MakeTemplate(GraphId::kA);
  const FactorizationReport r =
      FactorizesAccordingTo(BalancedObserved(t), ObservedSkeletonWithoutConfounding(t), 1e-9);
  Check c;
  c.expected = "balanced graph A factorizes according to its unconfounded skeleton";
  c.confirmed = r.factorizes;
  c.details["statements_checked"] = r.statements_checked;
  c.details["violation_count"] = r.violations.size();
  c.details["tolerance"] = 1e-9;
  return c;
}

Check BiasBound(const Args& a) {
  if (a.grid < 2) throw UsageError("--grid must be at least 2");
  const double step = 1.0 / static_cast<double>(a.grid - 1);
  double identity = 0.0, bound = 0.0;
  std::size_t violations = 0, sign_misses = 0, points = 0;
  for (std::size_t i = 0; i < a.grid; ++i) {
    for (std::size_t j = 0; j < a.grid; ++j) {
      for (std::size_t k = 0; k < a.grid; ++k) {
        const double p = i * step, e1 = j * step, e0 = k * step;
        const BiasShift s = BiasShiftSingle(p, e1, e0);
        const double change = s.after - s.before;
        const double id_slack = std::abs(change - (p - 0.5) * (e0 - e1));
        const double b_slack = std::abs(change) - s.bound;
        identity = std::max(identity, id_slack);
        bound = std::max(bound, b_slack);
        violations += id_slack > 1e-12 || b_slack > 1e-12;
        sign_misses += s.sign_condition && !s.worsens;
        ++points;
      }
    }
  }
  Check c;
  c.expected = "bias-change identity and bound hold at every grid point";
  c.confirmed = violations == 0 && sign_misses == 0;
  c.details["grid"] = a.grid;
  c.details["points"] = points;
  c.details["violations"] = violations;
  c.details["sign_condition_misses"] = sign_misses;
  c.details["max_identity_slack"] = identity;
  c.details["max_bound_slack"] = bound;
  return c;
}

Check BiasExample(const Args&) {
  const BiasShift s = BiasShiftSingle(0.25, 1.0, 1.0 / 3.0);
  Check c;
  c.expected = "P(Y=1)=1/4, E[Z|Y=1]=1, E[Z|Y=0]=1/3 moves the bias of Z to +1/6";
  c.confirmed = std::abs(s.after - 1.0 / 6.0) <= 1e-12;
  c.details["before"] = s.before;
  c.details["after"] = s.after;
  c.details["e_z_after"] = s.after + 0.5;
  c.details["worsens"] = s.worsens;
  return c;
}

Check Entangled(const Args&) {
  const EntangledGap g = EntangledGapClosedForm(1.0, 0.0);
  Check c;
  c.expected = "E[f | Z=1] = 2/3 and E[f | Z=0] = 1/3 at (p, q) = (1, 0)";
  c.confirmed = std::abs(g.e_f_given_z1 - 2.0 / 3.0) <= 1e-12 &&
                std::abs(g.e_f_given_z0 - 1.0 / 3.0) <= 1e-12;
  c.details["e_f_given_z1"] = g.e_f_given_z1;
  c.details["e_f_given_z0"] = g.e_f_given_z0;
  return c;
}

Check FairnessTransfer(const Args& a) {
  Rng rng(a.seed);
  std::size_t instances = 0, draws = 0, failures = 0;
  double worst = 0.0;
  while (instances < 50) {
    if (++draws > 10000) throw Error("too few premise-satisfying draws");
    const GraphTemplate t = RandomTemplate(GraphId::kA, rng);
    const JointTable p = ObservedJoint(t);
    std::vector<FairnessTransferReport> reports;
    bool premise = true;
    for (FairnessCriterion f : {FairnessCriterion::kDemographicParity,
                                FairnessCriterion::kPredictiveParity,
                                FairnessCriterion::kEqualizedOdds}) {
      reports.push_back(CheckFairnessTransfer(p, t.labels, f, std::nullopt, 1e-12));
      premise = premise && reports.back().premise_holds;
    }
    if (!premise) continue;
    ++instances;
    for (const FairnessTransferReport& r : reports) {
      failures += !r.conclusion_holds;
      worst = std::max(worst, r.conclusion_gap);
    }
  }
  Check c;
  c.expected = "every premise-satisfying graph A instance meets all three criteria after balancing";
  c.confirmed = failures == 0;
  c.details["instances"] = instances;
  c.details["draws"] = draws;
  c.details["failures"] = failures;
  c.details["max_conclusion_gap"] = worst;
  return c;
}

Check Xor(const Args&) {
  const JointTable x = XorCounterexample();
  const double wz = IsIndependent(x, {"W"}, {kZ}, {}).max_gap;
  const double yz = IsIndependent(x, {kY}, {kZ}, {}).max_gap;
  const double yz_w = IsIndependent(x, {kY}, {kZ}, {"W"}).max_gap;
  Check c;
  c.expected = "W and Y are each independent of Z, yet Y depends on Z given W";
  c.confirmed = wz <= 1e-12 && yz <= 1e-12 && yz_w > 1e-6;
  c.details["w_z_gap"] = wz;
  c.details["y_z_gap"] = yz;
  c.details["y_z_given_w_gap"] = yz_w;
  return c;
}

Check ChiSquare(const Args& a) {
  const ResamplingTestResult r = SimulateResamplingTest(10000, a.seed);
  Check c;
  c.expected = "after resampling, chi-squared accepts Y-Z (p > 0.05) and rejects X-Z (p < 0.001)";
  c.confirmed = r.p_value_yz > 0.05 && r.p_value_xz < 0.001;
  c.details["n"] = 10000;
  c.details["statistic_yz"] = r.statistic_yz;
  c.details["p_value_yz"] = r.p_value_yz;
  c.details["statistic_xz"] = r.statistic_xz;
  c.details["p_value_xz"] = r.p_value_xz;
  return c;
}

Check InvarianceConditionsA(const Args& a) {
  Rng rng(a.seed);
  std::size_t instances = 0, failures = 0;
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const GraphTemplate t = i == 0 ? MakeTemplate(GraphId::kA) : RandomTemplate(GraphId::kA, rng);
    const InvarianceConditionsResult r = CheckInvarianceConditions(BalancedObserved(t), t.labels);
    failures += !r.holds;
    worst = std::max({worst, r.cond1_gap, r.cond2_gap});
    ++instances;
  }
  Check c;
  c.expected = "both independence conditions hold for balanced graph A instances";
  c.confirmed = failures == 0;
  c.details["instances"] = instances;
  c.details["failures"] = failures;
  c.details["max_gap"] = worst;
  return c;
}

Check InvarianceA(const Args& a) {
  Rng rng(a.seed);
  double worst = 0.0;
  std::size_t instances = 0;
  for (int i = 0; i < 20; ++i) {
    const GraphTemplate t = i == 0 ? MakeTemplate(GraphId::kA) : RandomTemplate(GraphId::kA, rng);
    const JointTable q = BalancedObserved(t);
    const ShiftFamily family{q, DefaultShiftGrid()};
    const TablePredictor f = BayesPredictor(q, CovariatesWith(q, t.labels, Component::kXZperp));
    for (Loss loss : {Loss::kSquared, Loss::kLogLoss, Loss::kZeroOne}) {
      worst = std::max(worst, RiskInvarianceGap(f, family, loss).sup_gap);
    }
    ++instances;
  }
  Check c;
  c.expected = "the Bayes predictor on X_Z^perp has the same risk across the shift grid";
  c.confirmed = worst < 1e-9;
  c.details["instances"] = instances;
  c.details["shift_points"] = DefaultShiftGrid().size();
  c.details["max_risk_gap"] = worst;
  c.details["tolerance"] = 1e-9;
  return c;
}

Check ApproximationBound(const Args& a) {
  Rng rng(a.seed);
  std::size_t checks = 0, violations = 0, outside = 0;
  double worst_excess = -1.0;
  for (GraphId id : {GraphId::kA, GraphId::kB, GraphId::kC, GraphId::kD}) {
    for (int i = 0; i < 5; ++i) {
      const GraphTemplate t = i == 0 ? MakeTemplate(id) : RandomTemplate(id, rng);
      const JointTable q = BalancedObserved(t);
      const ShiftFamily family{q, DefaultShiftGrid()};
      std::vector<std::string> all;
      for (const auto& [name, comp] : t.labels) all.push_back(name);
      for (const auto& inputs : {all, CovariatesWith(q, t.labels, Component::kXZperp)}) {
        for (double size : {0.0, 0.05, 0.2}) {
          TablePredictor f = BayesPredictor(q, inputs);
          for (double& s : f.score) s = std::clamp(s + size * (2 * rng.Uniform() - 1), 0.0, 1.0);
          const ApproximationBoundResult r = CheckApproximationBound(f, family, t.labels);
          if (!r.assumption_holds) {
            ++outside;
            continue;
          }
          ++checks;
          violations += !r.bound_holds;
          worst_excess = std::max(worst_excess, r.gap - r.epsilon);
        }
      }
    }
  }
  Check c;
  c.expected = "risk gap <= epsilon wherever Bayes on X_Z^perp is risk-invariant";
  c.confirmed = violations == 0 && checks > 0;
  c.details["checks"] = checks;
  c.details["violations"] = violations;
  c.details["skipped_assumption_fails"] = outside;
  c.details["max_gap_minus_epsilon"] = worst_excess;
  return c;
}

Check CausalB(const Args&) {
  const GraphTemplate t = MakeTemplate(GraphId::kB);
  const CausalDependence d = CausalTaskDependence(ObservedJoint(t), t.labels);
  Check c;
  c.expected = "X_Z^perp is independent of Z before balancing and dependent after";
  c.confirmed = d.gap_p < 1e-9 && d.gap_q > 1e-6;
  c.details["gap_before"] = d.gap_p;
  c.details["gap_after"] = d.gap_q;
  return c;
}

using CheckFn = std::function<Check(const Args&)>;

const std::map<std::string, CheckFn>& Registry() {
  static const std::map<std::string, CheckFn> registry = {
      {"prop4-C1", [](const Args& a) { return FindCounterexample(CounterexampleId::kC1, a); }},
      {"prop4-C2", [](const Args& a) { return FindCounterexample(CounterexampleId::kC2, a); }},
      {"prop4-C3", [](const Args& a) { return FindCounterexample(CounterexampleId::kC3, a); }},
      {"prop4-C4", [](const Args& a) { return FindCounterexample(CounterexampleId::kC4, a); }},
      {"prop4-control", SkeletonControl},
      {"appendixA1-bound", BiasBound},
      {"appendixA1-example", BiasExample},
      {"appendixA2", Entangled},
      {"appendixB", FairnessTransfer},
      {"appendixB-xor", Xor},
      {"appendixC1", ChiSquare},
      {"corollary2-a", InvarianceConditionsA},
      {"prop1-a", InvarianceA},
      {"prop3", ApproximationBound},
      {"causal-dependence-b", CausalB},
  };
  return registry;
}

}  // namespace

std::vector<std::string> VerifyIds() {
  std::vector<std::string> ids;
  for (const auto& [id, fn] : Registry()) ids.push_back(id);
  return ids;
}

int CmdVerify(const std::string& id, const Options& opts, const VerifyOptions& vopts) {
  const auto it = Registry().find(id);
  if (it == Registry().end()) {
    std::string known;
    for (const std::string& k : VerifyIds()) known += (known.empty() ? "" : ", ") + k;
    throw UsageError("unknown proposition id '" + id + "' (known: " + known + ")");
  }
  fs::path dir = "jbal_out";
  std::string hash;
  if (opts.config_path) {
    const ExperimentConfig config = LoadConfig(*opts.config_path);
    dir = config.output_dir;
    hash = ConfigHash(config);
  }
  if (opts.out) dir = *opts.out;
  const Args args{opts.seed.value_or(0), vopts.grid};
  const Check c = it->second(args);
  Json doc;
  doc["id"] = id;
  doc["seed"] = args.seed;
  if (!hash.empty()) doc["config_hash"] = hash;
  doc["expected"] = c.expected;
  doc["confirmed"] = c.confirmed;
  doc["details"] = c.details;
  const fs::path path = dir / ("verify_" + id + ".json");
  WriteFileAtomic(path, doc.dump(2) + "\n");
  std::printf("verify %s: %s (%s)\n", id.c_str(), c.confirmed ? "confirmed" : "NOT confirmed",
              path.string().c_str());
  return c.confirmed ? kExitOk : kExitExpectation;
}

}  // namespace jbal::cli
