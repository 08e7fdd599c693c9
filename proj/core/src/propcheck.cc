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

#include "jbal/propcheck.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "jbal/balancing.h"
#include "jbal/chi_square.h"
#include "jbal/errors.h"
#include "jbal/rng.h"
#include "jbal/sample_batch.h"

namespace jbal {
namespace {

double NormalCdf(double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); }

// Positions of `names` in `table`.
std::vector<std::size_t> PositionsOf(const JointTable& table,
                                     const std::vector<std::string>& names) {
  std::vector<std::size_t> out;
  for (const std::string& n : names) out.push_back(table.IndexOf(n));
  return out;
}

std::vector<std::string> Concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

void RequireBinary(const JointTable& table, const char* name) {
  if (table.Cardinality(name) != 2) {
    throw ArgumentError(std::string("variable ") + name + " must be binary");
  }
}

JointTable BalanceYZ(const JointTable& table) {
  return BalanceExact(table, BalanceSpec::Joint(kY, kZ));
}

double Gap(const JointTable& table, const std::vector<std::string>& a,
           const std::vector<std::string>& b, const std::vector<std::string>& given) {
  return IsIndependent(table, a, b, given).max_gap;
}

}  // namespace

std::vector<std::string> CovariatesWith(const JointTable& table, const DecompositionLabel& labels,
                                        Component c) {
  std::vector<std::string> out;
  for (const Variable& v : table.variables()) {
    const auto it = labels.find(v.name);
    if (it != labels.end() && it->second == c) out.push_back(v.name);
  }
  return out;
}

void ValidateLabels(const JointTable& table, const DecompositionLabel& labels) {
  if (!table.Contains(kY) || !table.Contains(kZ)) {
    throw NameError("table must contain Y and Z");
  }
  for (const auto& [name, component] : labels) {
    if (name == kY || name == kZ) throw LabelError("Y and Z cannot carry a covariate label");
    if (!table.Contains(name)) throw LabelError("label for unknown covariate '" + name + "'");
  }
  for (const Variable& v : table.variables()) {
    if (v.name == kY || v.name == kZ) continue;
    if (!labels.count(v.name)) throw LabelError("covariate '" + v.name + "' is not labeled");
  }
}

InvarianceConditionsResult CheckInvarianceConditions(const JointTable& table, const DecompositionLabel& labels,
                                 double tol) {
  ValidateLabels(table, labels);
  const auto xz = CovariatesWith(table, labels, Component::kXZperp);
  std::vector<std::string> rest = CovariatesWith(table, labels, Component::kXYperp);
  rest = Concat(rest, CovariatesWith(table, labels, Component::kXYandZ));
  rest = Concat(rest, CovariatesWith(table, labels, Component::kXV));
  InvarianceConditionsResult out;
  if (!rest.empty()) out.cond1_gap = Gap(table, rest, Concat({kY}, xz), {kZ});
  if (!xz.empty()) out.cond2_gap = Gap(table, xz, {kZ}, {kY});
  out.cond1 = out.cond1_gap <= tol;
  out.cond2 = out.cond2_gap <= tol;
  out.holds = out.cond1 && out.cond2;
  return out;
}

std::size_t TablePredictor::Offset(std::span<const int> input_state) const {
  std::size_t offset = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    offset = offset * static_cast<std::size_t>(inputs[i].cardinality) +
             static_cast<std::size_t>(input_state[i]);
  }
  return offset;
}

TablePredictor BayesPredictor(const JointTable& table, const std::vector<std::string>& inputs) {
  if (inputs.empty()) throw ArgumentError("Bayes predictor needs at least one input");
  RequireBinary(table, kY);
  if (std::find(inputs.begin(), inputs.end(), kY) != inputs.end()) {
    throw ArgumentError("Y cannot be an input of its own predictor");
  }
  const JointTable joint = Reorder(Marginalize(table, Concat(inputs, {kY})), Concat(inputs, {kY}));
  TablePredictor out;
  for (const std::string& n : inputs) out.inputs.push_back({n, table.Cardinality(n)});
  const std::size_t states = joint.size() / 2;
  out.score.assign(states, 0.0);
  out.reachable.assign(states, false);
  for (std::size_t s = 0; s < states; ++s) {
    const double p0 = joint.at(2 * s);
    const double p1 = joint.at(2 * s + 1);
    if (p0 + p1 > 0.0) {
      out.score[s] = p1 / (p0 + p1);
      out.reachable[s] = true;
    }
  }
  return out;
}

TablePredictor ConstantPredictor(const JointTable& table, const std::vector<std::string>& inputs,
                                 double score) {
  TablePredictor out;
  std::size_t states = 1;
  for (const std::string& n : inputs) {
    out.inputs.push_back({n, table.Cardinality(n)});
    states *= static_cast<std::size_t>(table.Cardinality(n));
  }
  out.score.assign(states, score);
  out.reachable.assign(states, true);
  return out;
}

EntangledGap EntangledGapClosedForm(double p, double q) {
  if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0)) {
    throw ArgumentError("p and q must lie in [0, 1]");
  }
  EntangledGap out;
  const double px1 = 0.75 * p + 0.25 * q;
  out.f1 = px1 > 0.0 ? 0.5 * p / px1 : 0.0;
  out.f0 = px1 < 1.0 ? 0.5 * (1.0 - p) / (1.0 - px1) : 0.0;
  // Terms whose weight is zero are dropped; their f value is undefined.
  auto mix = [&](double w1, double w0) {
    double v = 0.0;
    if (w1 > 0.0) v += w1 * out.f1;
    if (w0 > 0.0) v += w0 * out.f0;
    return v;
  };
  out.e_f_given_z1 = mix(p, 1.0 - p);
  out.e_f_given_z0 = mix(0.5 * p + 0.5 * q, 0.5 * (1.0 - p) + 0.5 * (1.0 - q));
  return out;
}

JointTable EntangledJoint(double p, double q) {
  std::vector<double> probs;
  for (int y = 0; y < 2; ++y) {
    for (int z = 0; z < 2; ++z) {
      const double px1 = (y == 1 || z == 1) ? p : q;
      probs.push_back(0.25 * (1.0 - px1));
      probs.push_back(0.25 * px1);
    }
  }
  return JointTable({{kY, 2}, {kZ, 2}, {"X", 2}}, std::move(probs));
}

std::vector<std::array<std::array<double, 2>, 2>> DefaultShiftGrid(std::size_t points, double lo,
                                                                   double hi) {
  if (points == 0) throw ArgumentError("shift grid needs at least one point");
  if (!(lo >= 0.0 && hi <= 1.0 && lo <= hi)) throw ArgumentError("bad shift grid range");
  std::vector<std::array<std::array<double, 2>, 2>> grid;
  for (std::size_t i = 0; i < points; ++i) {
    const double s = points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) /
                                                 static_cast<double>(points - 1);
    grid.push_back({{{s, 1.0 - s}, {1.0 - s, s}}});
  }
  return grid;
}

JointTable ShiftedTable(const JointTable& base,
                        const std::array<std::array<double, 2>, 2>& z_given_y) {
  RequireBinary(base, kY);
  RequireBinary(base, kZ);
  for (const auto& row : z_given_y) {
    if (!(row[0] >= 0.0 && row[1] >= 0.0) || std::abs(row[0] + row[1] - 1.0) > 1e-12) {
      throw ArgumentError("shift conditional rows must be distributions");
    }
  }
  const std::size_t iy = base.IndexOf(kY);
  const std::size_t iz = base.IndexOf(kZ);
  double pyz[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  std::vector<int> state(base.num_variables());
  for (std::size_t c = 0; c < base.size(); ++c) {
    base.Decode(c, state);
    pyz[state[iy]][state[iz]] += base.at(c);
  }
  const double py[2] = {pyz[0][0] + pyz[0][1], pyz[1][0] + pyz[1][1]};
  for (int y = 0; y < 2; ++y) {
    for (int z = 0; z < 2; ++z) {
      if (pyz[y][z] <= 0.0 && py[y] * z_given_y[y][z] > 0.0) {
        throw UnbalanceableSupport("shifted family needs P*(X | Y, Z) on an empty (Y, Z) cell");
      }
    }
  }
  std::vector<double> out(base.size());
  for (std::size_t c = 0; c < base.size(); ++c) {
    base.Decode(c, state);
    const int y = state[iy];
    const int z = state[iz];
    out[c] = pyz[y][z] > 0.0 ? base.at(c) / pyz[y][z] * z_given_y[y][z] * py[y] : 0.0;
  }
  return JointTable::FromWeights(base.variables(), std::move(out));
}

const char* LossName(Loss loss) {
  switch (loss) {
    case Loss::kSquared: return "squared";
    case Loss::kZeroOne: return "zero_one";
    case Loss::kLogLoss: return "logloss";
  }
  return "?";
}

double ExactRisk(const TablePredictor& predictor, const JointTable& table, Loss loss) {
  std::vector<std::string> names;
  for (const Variable& v : predictor.inputs) names.push_back(v.name);
  const std::vector<std::size_t> positions = PositionsOf(table, names);
  const std::size_t iy = table.IndexOf(kY);
  std::vector<int> state(table.num_variables());
  std::vector<int> input(positions.size());
  double risk = 0.0;
  for (std::size_t c = 0; c < table.size(); ++c) {
    const double p = table.at(c);
    if (p <= 0.0) continue;
    table.Decode(c, state);
    for (std::size_t k = 0; k < positions.size(); ++k) input[k] = state[positions[k]];
    const std::size_t offset = predictor.Offset(input);
    if (!predictor.reachable[offset]) {
      throw CoverageError("predictor undefined on a reachable input state");
    }
    const double f = predictor.score[offset];
    const double y = state[iy];
    double l = 0.0;
    switch (loss) {
      case Loss::kSquared: l = (f - y) * (f - y); break;
      case Loss::kZeroOne: l = ((f >= 0.5) != (y == 1.0)) ? 1.0 : 0.0; break;
      case Loss::kLogLoss: {
        const double fc = std::clamp(f, 1e-15, 1.0 - 1e-15);
        l = -(y * std::log(fc) + (1.0 - y) * std::log(1.0 - fc));
        break;
      }
    }
    risk += p * l;
  }
  return risk;
}

RiskInvarianceResult RiskInvarianceGap(const TablePredictor& predictor, const ShiftFamily& family,
                                       Loss loss) {
  if (family.grid.empty()) throw ArgumentError("shift family grid is empty");
  RiskInvarianceResult out;
  for (const auto& element : family.grid) {
    out.risks.push_back(ExactRisk(predictor, ShiftedTable(family.base, element), loss));
  }
  for (std::size_t i = 0; i < out.risks.size(); ++i) {
    for (std::size_t j = i + 1; j < out.risks.size(); ++j) {
      const double gap = std::abs(out.risks[i] - out.risks[j]);
      if (gap > out.sup_gap) {
        out.sup_gap = gap;
        out.argmax_first = i;
        out.argmax_second = j;
      }
    }
  }
  return out;
}

ApproximationBoundResult CheckApproximationBound(const TablePredictor& fitted, const ShiftFamily& family,
                            const DecompositionLabel& labels) {
  ValidateLabels(family.base, labels);
  const auto xz = CovariatesWith(family.base, labels, Component::kXZperp);
  std::vector<std::string> names;
  for (const Variable& v : fitted.inputs) names.push_back(v.name);
  const std::vector<std::size_t> fitted_pos = PositionsOf(family.base, names);
  const std::vector<std::size_t> xz_pos = PositionsOf(family.base, xz);
  const std::size_t iy = family.base.IndexOf(kY);

  ApproximationBoundResult out;
  double sup = 0.0;
  std::vector<int> state(family.base.num_variables());
  std::vector<int> input(fitted_pos.size());
  for (const auto& element : family.grid) {
    const JointTable t = ShiftedTable(family.base, element);
    // Mass and Y=1 mass per fitted level and per X_Z^perp state.
    std::map<double, std::pair<double, double>> by_level;
    std::map<std::vector<int>, std::pair<double, double>> by_xz;
    std::vector<double> level_of(t.size(), 0.0);
    for (std::size_t c = 0; c < t.size(); ++c) {
      const double p = t.at(c);
      if (p <= 0.0) continue;
      t.Decode(c, state);
      for (std::size_t k = 0; k < fitted_pos.size(); ++k) input[k] = state[fitted_pos[k]];
      const std::size_t offset = fitted.Offset(input);
      if (!fitted.reachable[offset]) {
        throw CoverageError("fitted predictor undefined on a reachable input state");
      }
      level_of[c] = fitted.score[offset];
      std::vector<int> key;
      for (std::size_t k : xz_pos) key.push_back(state[k]);
      auto& lv = by_level[level_of[c]];
      auto& xv = by_xz[key];
      lv.first += p;
      xv.first += p;
      if (state[iy] == 1) {
        lv.second += p;
        xv.second += p;
      }
    }
    for (std::size_t c = 0; c < t.size(); ++c) {
      if (t.at(c) <= 0.0) continue;
      t.Decode(c, state);
      std::vector<int> key;
      for (std::size_t k : xz_pos) key.push_back(state[k]);
      const auto& lv = by_level.at(level_of[c]);
      const auto& xv = by_xz.at(key);
      sup = std::max(sup, std::abs(lv.second / lv.first - xv.second / xv.first));
    }
  }
  out.epsilon = 2.0 * sup;
  out.gap = RiskInvarianceGap(fitted, family, Loss::kSquared).sup_gap;
  out.bound_holds = out.gap <= out.epsilon + 1e-9;
  out.reference_gap = RiskInvarianceGap(BayesPredictor(family.base, xz), family, Loss::kSquared).sup_gap;
  out.assumption_holds = out.reference_gap <= 1e-9;
  return out;
}

const char* CounterexampleName(CounterexampleId id) {
  switch (id) {
    case CounterexampleId::kC1: return "C1";
    case CounterexampleId::kC2: return "C2";
    case CounterexampleId::kC3: return "C3";
    case CounterexampleId::kC4: return "C4";
  }
  return "?";
}

CounterexampleId ParseCounterexampleId(const std::string& name) {
  if (name == "C1") return CounterexampleId::kC1;
  if (name == "C2") return CounterexampleId::kC2;
  if (name == "C3") return CounterexampleId::kC3;
  if (name == "C4") return CounterexampleId::kC4;
  throw ArgumentError("unknown counterexample '" + name + "' (expected C1..C4)");
}

Cbn CounterexampleSource(CounterexampleId id, std::uint64_t seed) {
  Rng rng(seed);
  Cbn net;
  auto add = [&](const std::string& name, std::vector<std::string> parents) {
    const std::size_t rows = std::size_t{1} << parents.size();
    net.AddNode({name, 2}, std::move(parents), RandomCptRows(rows, 2, rng));
  };
  switch (id) {
    case CounterexampleId::kC1:  // Z -> X -> Y, Z <- U -> Y
      add("U", {});
      add("Z", {"U"});
      add("X", {"Z"});
      add("Y", {"X", "U"});
      break;
    case CounterexampleId::kC2:  // X -> Y, Z <- U -> Y
      add("U", {});
      add("X", {});
      add("Z", {"U"});
      add("Y", {"X", "U"});
      break;
    case CounterexampleId::kC3:  // Z -> X -> Y
      add("Z", {});
      add("X", {"Z"});
      add("Y", {"X"});
      break;
    case CounterexampleId::kC4:  // Y -> X, Z <- U -> Y, Z -> W -> X
      add("U", {});
      add("Z", {"U"});
      add("W", {"Z"});
      add("Y", {"U"});
      add("X", {"Y", "W"});
      break;
  }
  return net;
}

Dag CounterexampleSkeleton(CounterexampleId id) {
  const Variable x{"X", 2}, y{"Y", 2}, z{"Z", 2}, w{"W", 2};
  switch (id) {
    case CounterexampleId::kC1: return Dag({z, x, y}, {{"Z", "X"}, {"X", "Y"}});
    case CounterexampleId::kC2: return Dag({x, z, y}, {{"X", "Y"}});
    case CounterexampleId::kC3: return Dag({z, x, y}, {{"X", "Y"}});
    case CounterexampleId::kC4:
      return Dag({z, w, y, x}, {{"Y", "X"}, {"Z", "W"}, {"W", "X"}});
  }
  throw ArgumentError("unknown counterexample");
}

Counterexample BalancingCounterexample(CounterexampleId id, std::uint64_t seed) {
  const Dag g0 = CounterexampleSkeleton(id);
  double best_gap = 0.0;
  for (std::size_t attempt = 0; attempt < kCounterexampleRetries; ++attempt) {
    const std::uint64_t s = seed + attempt;
    Cbn source = CounterexampleSource(id, s);
    std::vector<std::string> observed;
    for (const Variable& v : source.nodes()) {
      if (v.name != "U") observed.push_back(v.name);
    }
    JointTable q = BalanceYZ(Marginalize(Joint(source), observed));
    FactorizationReport report = FactorizesAccordingTo(q, g0, kGenericViolation);
    if (!report.factorizes) {
      return {id, s, attempt + 1, std::move(source), std::move(q), g0, std::move(report)};
    }
    // Strongest sub-threshold gap, for the error message.
    for (const IndependenceStatement& st : ImpliedIndependencies(g0)) {
      best_gap = std::max(best_gap, IsIndependent(q, st.a, st.b, st.given).max_gap);
    }
  }
  throw CounterexampleNotFound(std::string("no factorization violation for ") +
                               CounterexampleName(id) + " within " +
                               std::to_string(kCounterexampleRetries) +
                               " seeds (largest gap " + std::to_string(best_gap) + ")");
}

const char* CriterionName(FairnessCriterion c) {
  switch (c) {
    case FairnessCriterion::kDemographicParity: return "demographic_parity";
    case FairnessCriterion::kPredictiveParity: return "predictive_parity";
    case FairnessCriterion::kEqualizedOdds: return "equalized_odds";
  }
  return "?";
}

FairnessTransferReport CheckFairnessTransfer(const JointTable& table, const DecompositionLabel& labels,
                               FairnessCriterion criterion,
                               std::optional<RegularizerSurrogate> regularizer, double tol) {
  ValidateLabels(table, labels);
  const auto xz = CovariatesWith(table, labels, Component::kXZperp);
  if (xz.empty()) throw LabelError("no covariate labeled XZperp");
  FairnessTransferReport out{criterion, regularizer};
  const JointTable q = BalanceYZ(table);
  if (!regularizer) {
    out.premise_gap = Gap(table, xz, {kZ}, {kY});
    out.guaranteed = true;
  } else {
    const double yz = Gap(q, {kY}, {kZ}, {});
    const double reg = *regularizer == RegularizerSurrogate::kConditional
                           ? Gap(q, xz, {kZ}, {kY})
                           : Gap(q, xz, {kZ}, {});
    out.premise_gap = std::max(yz, reg);
    out.guaranteed = *regularizer == RegularizerSurrogate::kConditional ||
                     criterion == FairnessCriterion::kDemographicParity;
  }
  out.premise_holds = out.premise_gap <= tol;
  switch (criterion) {
    case FairnessCriterion::kDemographicParity:
      out.conclusion_gap = Gap(q, xz, {kZ}, {});
      break;
    case FairnessCriterion::kPredictiveParity:
      out.conclusion_gap = Gap(q, {kY}, {kZ}, xz);
      break;
    case FairnessCriterion::kEqualizedOdds:
      out.conclusion_gap = Gap(q, xz, {kZ}, {kY});
      break;
  }
  out.conclusion_holds = out.conclusion_gap <= tol;
  return out;
}

JointTable XorCounterexample() {
  std::vector<double> probs(8, 0.0);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int c = 0; c < 2; ++c) {
        const int w = a == b;
        const int y = a == c;
        const int z = b == c;
        probs[static_cast<std::size_t>(w * 4 + y * 2 + z)] += 0.125;
      }
    }
  }
  return JointTable({{"W", 2}, {kY, 2}, {kZ, 2}}, std::move(probs));
}

CausalDependence CausalTaskDependence(const JointTable& table, const DecompositionLabel& labels) {
  ValidateLabels(table, labels);
  const auto xz = CovariatesWith(table, labels, Component::kXZperp);
  if (xz.empty()) throw LabelError("no covariate labeled XZperp");
  return {Gap(table, xz, {kZ}, {}), Gap(BalanceYZ(table), xz, {kZ}, {})};
}

Cbn ResamplingSimulationNetwork() {
  Cbn net;
  net.AddNode({"X", 2}, {}, {0.5, 0.5});
  const double u1 = 1.0 - NormalCdf(0.3);
  net.AddNode({"U", 2}, {}, {1.0 - u1, u1});
  std::vector<double> y;
  for (int x = 0; x < 2; ++x) {
    for (int u = 0; u < 2; ++u) {
      const double p1 = 1.0 - NormalCdf(1.0 - 2.0 * x + 2.0 * u);
      y.push_back(1.0 - p1);
      y.push_back(p1);
    }
  }
  net.AddNode({kY, 2}, {"X", "U"}, y);
  std::vector<double> z;
  for (int u = 0; u < 2; ++u) {
    const double p1 = NormalCdf(2.0 * u - 0.2);
    z.push_back(1.0 - p1);
    z.push_back(p1);
  }
  net.AddNode({kZ, 2}, {"U"}, z);
  return net;
}

ResamplingTestResult SimulateResamplingTest(std::size_t n, std::uint64_t seed) {
  const Cbn net = ResamplingSimulationNetwork();
  const SampleBatch raw = SampleCbn(net, n, DeriveSeed(seed, 0));
  const std::size_t iy = raw.IndexOf(kY);
  const std::size_t iz = raw.IndexOf(kZ);
  double cy[2] = {0, 0}, cz[2] = {0, 0}, cyz[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t r = 0; r < raw.size(); ++r) {
    const int y = raw.At(r, iy);
    const int z = raw.At(r, iz);
    cy[y] += 1;
    cz[z] += 1;
    cyz[y][z] += 1;
  }
  const double nn = static_cast<double>(n);
  std::vector<double> w(raw.size());
  for (std::size_t r = 0; r < raw.size(); ++r) {
    const int y = raw.At(r, iy);
    const int z = raw.At(r, iz);
    w[r] = (cz[z] / nn) * (cy[y] / nn) / (cyz[y][z] / nn);
  }
  const SampleBatch balanced = Resample(raw.WithWeights(std::move(w)), n, DeriveSeed(seed, 1));
  const ChiSquareOptions yates{true};
  const ChiSquareResult yz = ChiSquareIndependence(balanced, kZ, kY, yates);
  const ChiSquareResult xz = ChiSquareIndependence(balanced, kZ, "X", yates);
  return {yz.p_value, xz.p_value, yz.statistic, xz.statistic};
}

std::vector<ThresholdSimulationRow> SimulateSingleBalanceThresholds(
    std::size_t n, const std::vector<double>& thresholds, std::uint64_t seed) {
  if (n < 2) throw ArgumentError("threshold simulation needs n >= 2");
  std::vector<ThresholdSimulationRow> rows;
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    Rng rng(DeriveSeed(seed, i));
    double count[2] = {0, 0};
    double z1[2] = {0, 0};
    double sy = 0, sz = 0, syy = 0, szz = 0, syz = 0;
    for (std::size_t r = 0; r < n; ++r) {
      const double u = rng.Normal(0.0, 0.1);
      const int y = u + rng.Normal(0.05, 0.02) > 0.0;
      const int z = u + rng.Normal(0.05, 0.02) > thresholds[i];
      count[y] += 1;
      z1[y] += z;
      sy += y;
      sz += z;
      syy += y * y;
      szz += z * z;
      syz += y * z;
    }
    const double nn = static_cast<double>(n);
    ThresholdSimulationRow row;
    row.threshold = thresholds[i];
    row.p_y1 = sy / nn;
    row.p_z1_before = sz / nn;
    row.p_z1_after = (count[0] > 0 && count[1] > 0)
                         ? 0.5 * z1[0] / count[0] + 0.5 * z1[1] / count[1]
                         : std::nan("");
    const double cov = syz / nn - (sy / nn) * (sz / nn);
    const double vy = syy / nn - (sy / nn) * (sy / nn);
    const double vz = szz / nn - (sz / nn) * (sz / nn);
    row.correlation = (vy > 0 && vz > 0) ? cov / std::sqrt(vy * vz) : 0.0;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace jbal
