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

#ifndef JBAL_PROPCHECK_H_
#define JBAL_PROPCHECK_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jbal/cbn.h"
#include "jbal/joint_table.h"
#include "jbal/templates.h"

namespace jbal {

// Outcome and auxiliary-factor variable names used by every checker.
inline constexpr const char* kY = "Y";
inline constexpr const char* kZ = "Z";

// Covariate names carrying a given component, in table order.
std::vector<std::string> CovariatesWith(const JointTable& table, const DecompositionLabel& labels,
                                        Component c);

// Throws LabelError unless every variable other than Y and Z is labeled and
// every label names a table variable.
void ValidateLabels(const JointTable& table, const DecompositionLabel& labels);

struct InvarianceConditionsResult {
  bool holds = false;
  bool cond1 = false;
  bool cond2 = false;
  double cond1_gap = 0.0;
  double cond2_gap = 0.0;
};

// cond1: R _||_ {Y, X_Z^perp} | Z with R = X_Y^perp + X_{Y and Z} + X_V;
// cond2: X_Z^perp _||_ Z | Y. Empty sides make a condition hold trivially.
InvarianceConditionsResult CheckInvarianceConditions(const JointTable& table, const DecompositionLabel& labels,
                                 double tol = kDefaultIndependenceTolerance);

// Score table over the joint states of a set of input variables.
struct TablePredictor {
  std::vector<Variable> inputs;
  // P(Y=1 | input state), row-major over `inputs`.
  std::vector<double> score;
  // False for states of zero probability under the table the predictor was
  // derived from.
  std::vector<bool> reachable;

  std::size_t Offset(std::span<const int> input_state) const;
};

// Exact posterior of a binary Y given `inputs`.
TablePredictor BayesPredictor(const JointTable& table, const std::vector<std::string>& inputs);

// Predictor with a fixed score on every input state.
TablePredictor ConstantPredictor(const JointTable& table, const std::vector<std::string>& inputs,
                                 double score);

struct EntangledGap {
  double e_f_given_z1 = 0.0;
  double e_f_given_z0 = 0.0;
  double f1 = 0.0;
  double f0 = 0.0;
};

// Closed-form E[f(X) | Z] for the OR(Y, Z) construction with
// P(X=1 | Y or Z) = p, P(X=1 | neither) = q and independent fair Y, Z.
EntangledGap EntangledGapClosedForm(double p, double q);

// The same construction as an explicit table over (Y, Z, X).
JointTable EntangledJoint(double p, double q);

// P'(X, Y, Z) = P*(X | Y, Z) P'(Z | Y) P*(Y) for each grid element.
struct ShiftFamily {
  JointTable base;
  // Each element holds P'(Z=z | Y=y) at [y][z].
  std::vector<std::array<std::array<double, 2>, 2>> grid;
};

// Grid of `points` conditionals with P'(Z=0 | Y=0) = s, P'(Z=0 | Y=1) = 1 - s
// for s evenly spaced in [lo, hi].
std::vector<std::array<std::array<double, 2>, 2>> DefaultShiftGrid(std::size_t points = 7,
                                                                   double lo = 0.05,
                                                                   double hi = 0.95);

JointTable ShiftedTable(const JointTable& base, const std::array<std::array<double, 2>, 2>& z_given_y);

enum class Loss { kSquared, kZeroOne, kLogLoss };

const char* LossName(Loss loss);

double ExactRisk(const TablePredictor& predictor, const JointTable& table, Loss loss);

struct RiskInvarianceResult {
  std::vector<double> risks;
  double sup_gap = 0.0;
  std::size_t argmax_first = 0;
  std::size_t argmax_second = 0;
};

// Throws CoverageError when the predictor is unreachable on a state with
// positive probability under some grid element.
RiskInvarianceResult RiskInvarianceGap(const TablePredictor& predictor, const ShiftFamily& family,
                                       Loss loss);

struct ApproximationBoundResult {
  double epsilon = 0.0;
  double gap = 0.0;
  bool bound_holds = false;
  // Risk gap of the Bayes predictor on X_Z^perp. The bound is only
  // guaranteed when that predictor is itself risk-invariant.
  double reference_gap = 0.0;
  bool assumption_holds = false;
};

// epsilon = 2 sup |E_P'[Y | fitted(X)] - E_P'[Y | X_Z^perp]| over the grid
// and all reachable states, conditioning on the level sets of the fitted
// score; gap is the squared-loss risk gap.
ApproximationBoundResult CheckApproximationBound(const TablePredictor& fitted, const ShiftFamily& family,
                            const DecompositionLabel& labels);

enum class CounterexampleId { kC1, kC2, kC3, kC4 };

const char* CounterexampleName(CounterexampleId id);
CounterexampleId ParseCounterexampleId(const std::string& name);

struct Counterexample {
  CounterexampleId id;
  std::uint64_t seed_used = 0;
  std::size_t attempts = 0;
  Cbn source;
  JointTable q;
  Dag skeleton_g0;
  FactorizationReport report;
};

inline constexpr double kGenericViolation = 1e-6;
inline constexpr std::size_t kCounterexampleRetries = 16;

// Source graph of an example with seeded random CPTs.
Cbn CounterexampleSource(CounterexampleId id, std::uint64_t seed);
// Observed skeleton after removing the undesired path.
Dag CounterexampleSkeleton(CounterexampleId id);

// Balances the observed joint of the source network and checks it against
// the mutilated skeleton, trying seeds seed, seed+1, ... Throws
// CounterexampleNotFound when no violation above kGenericViolation appears.
Counterexample BalancingCounterexample(CounterexampleId id, std::uint64_t seed);

enum class FairnessCriterion { kDemographicParity, kPredictiveParity, kEqualizedOdds };
enum class RegularizerSurrogate { kConditional, kMarginal };

const char* CriterionName(FairnessCriterion c);

struct FairnessTransferReport {
  FairnessCriterion criterion;
  std::optional<RegularizerSurrogate> regularizer;
  bool premise_holds = false;
  double premise_gap = 0.0;
  bool conclusion_holds = false;
  double conclusion_gap = 0.0;
  // Whether the premise guarantees the conclusion.
  bool guaranteed = false;
};

// Without a regularizer the premise is X_Z^perp _||_ Z | Y in the table (P*)
// and the conclusion is checked in its joint balancing Q. With a regularizer
// surrogate W = X_Z^perp, the premise is the regularizer constraint in Q
// (W _||_ Z | Y, or W _||_ Z) together with Y _||_ Z.
FairnessTransferReport CheckFairnessTransfer(const JointTable& table, const DecompositionLabel& labels,
                               FairnessCriterion criterion,
                               std::optional<RegularizerSurrogate> regularizer = std::nullopt,
                               double tol = kDefaultIndependenceTolerance);

// W = 1{A=B}, Y = 1{A=C}, Z = 1{B=C} for independent fair bits A, B, C.
JointTable XorCounterexample();

struct CausalDependence {
  double gap_p = 0.0;
  double gap_q = 0.0;
};

// Dependence gap of (X_Z^perp, Z) before and after joint balancing.
CausalDependence CausalTaskDependence(const JointTable& table, const DecompositionLabel& labels);

// Discretization of the simulation Z <- U -> Y <- X with standard normal
// noise: X = 1{e1 > 0}, U = 1{e2 > 0.3}, Y = 1{e3 > 1 - 2X + 2U},
// Z = 1{e4 < 2U - 0.2}.
Cbn ResamplingSimulationNetwork();

struct ResamplingTestResult {
  double p_value_yz = 0.0;
  double p_value_xz = 0.0;
  double statistic_yz = 0.0;
  double statistic_xz = 0.0;
};

// Samples n rows, resamples n rows with probability proportional to
// p(z) p(y) / p(z, y) estimated on the sample, and runs the Yates-corrected
// chi-squared tests of (Y, Z) and (X, Z).
ResamplingTestResult SimulateResamplingTest(std::size_t n, std::uint64_t seed);

struct ThresholdSimulationRow {
  double threshold = 0.0;
  double correlation = 0.0;
  double p_y1 = 0.0;
  double p_z1_before = 0.0;
  double p_z1_after = 0.0;
};

// U ~ N(0, 0.1^2) drives Y = 1{U + e > 0} and Z = 1{U + e' > t} with
// e, e' ~ N(0.05, 0.02^2); reports P(Z=1) before and after balancing Y.
std::vector<ThresholdSimulationRow> SimulateSingleBalanceThresholds(
    std::size_t n, const std::vector<double>& thresholds, std::uint64_t seed);

}  // namespace jbal

#endif  // JBAL_PROPCHECK_H_
