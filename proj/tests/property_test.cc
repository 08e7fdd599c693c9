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

// Randomized invariants over seeded instances.

#include <cmath>

#include <gtest/gtest.h>

#include "jbal/balancing.h"
#include "jbal/cbn.h"
#include "jbal/errors.h"
#include "jbal/joint_table.h"
#include "jbal/learner.h"
#include "jbal/mmd.h"
#include "jbal/propcheck.h"
#include "jbal/templates.h"
#include "test_util.h"

namespace jbal {
namespace {

using namespace jbal::testing;

Cbn RandomNetwork(Rng& rng, int n) {
  Cbn net;
  std::vector<std::string> names;
  std::vector<int> card;
  for (int i = 0; i < n; ++i) {
    names.push_back("N" + std::to_string(i));
    card.push_back(2 + static_cast<int>(rng.UniformInt(2)));
    std::vector<std::string> parents;
    std::size_t rows = 1;
    for (int j = 0; j < i; ++j) {
      if (rng.Bernoulli(0.4)) {
        parents.push_back(names[j]);
        rows *= static_cast<std::size_t>(card[j]);
      }
    }
    net.AddNode({names[i], card[i]}, parents, RandomCptRows(rows, card[i], rng));
  }
  return net;
}

TEST(BalanceProperty, ExactJointBalancing) {
  Rng rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    const BalanceGaps g = CheckBalance(RandomPositiveJoint(rng));
    EXPECT_LT(g.independence, 1e-12);
    EXPECT_LT(g.conditional, 1e-12);
    EXPECT_LT(g.idempotence, 1e-12);
  }
}

TEST(BalanceProperty, MarginalsAreKept) {
  Rng rng(102);
  for (int trial = 0; trial < 50; ++trial) {
    const JointTable p = RandomPositiveJoint(rng);
    const JointTable q = BalanceExact(p, BalanceSpec::Joint("Y", "Z"));
    for (const char* v : {"Y", "Z"}) {
      const JointTable a = Marginalize(p, {v});
      const JointTable b = Marginalize(q, {v});
      for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.at(i), b.at(i), 1e-14);
    }
  }
}

TEST(BalanceProperty, ImportanceWeightsBalanceTheSample) {
  Rng rng(103);
  for (int trial = 0; trial < 20; ++trial) {
    const JointTable p = RandomPositiveJoint(rng);
    const SampleBatch b = Sample(p, 2000, 1000 + trial);
    const SampleBatch q =
        BalanceBatch(b, BalanceSpec::Joint("Y", "Z", Mechanism::kImportanceWeights));
    EXPECT_LT(IsIndependent(Empirical(q), {"Y"}, {"Z"}, {}).max_gap, 1e-12);
  }
}

TEST(BalanceProperty, SubsamplingBalancesCounts) {
  Rng rng(104);
  for (int trial = 0; trial < 20; ++trial) {
    const JointTable p = RandomPositiveJoint(rng);
    const SampleBatch b = Sample(p, 3000, 2000 + trial);
    const SampleBatch q =
        BalanceBatch(b, BalanceSpec::Joint("Y", "Z", Mechanism::kSubsampleMajority, trial));
    // Integer cell counts can only approximate the product of marginals.
    EXPECT_LT(IsIndependent(Empirical(q), {"Y"}, {"Z"}, {}).max_gap, 0.01);
  }
}

TEST(JointTableProperty, ConditionCommutesWithMarginalize) {
  Rng rng(105);
  for (int trial = 0; trial < 50; ++trial) {
    const JointTable p = RandomPositiveJoint(rng);
    const int y = static_cast<int>(rng.UniformInt(static_cast<std::uint64_t>(p.Cardinality("Y"))));
    const JointTable a = Condition(Marginalize(p, {"X", "Y"}), {{"Y", y}});
    const JointTable b = Marginalize(Condition(p, {{"Y", y}}), {"X"});
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.at(i), b.at(i), 1e-14);
  }
}

TEST(CbnProperty, DSeparationImpliesIndependence) {
  Rng rng(106);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + static_cast<int>(rng.UniformInt(3));
    const Cbn net = RandomNetwork(rng, n);
    const JointTable joint = Joint(net);
    const auto names = net.dag().names();
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        for (int k = -1; k < n; ++k) {
          if (k == i || k == j) continue;
          std::vector<std::string> given;
          if (k >= 0) given.push_back(names[k]);
          if (DSeparated(net.dag(), {names[i]}, {names[j]}, given)) {
            EXPECT_TRUE(IsIndependent(joint, {names[i]}, {names[j]}, given, 1e-12).independent);
          }
        }
      }
    }
    EXPECT_TRUE(FactorizesAccordingTo(joint, net.dag(), 1e-12).factorizes);
  }
}

TEST(BiasShiftProperty, IdentityAndBoundOnGrid) {
  const BiasGridResult r = ScanBiasShiftGrid(41);
  EXPECT_LE(r.identity_slack, 1e-12);
  EXPECT_LE(r.bound_slack, 1e-12);
  EXPECT_EQ(r.sign_without_worsening, 0u);
}

TEST(InvarianceConditionsProperty, SpuriousTemplatesSatisfyBothConditions) {
  Rng rng(107);
  for (int trial = 0; trial < 100; ++trial) {
    const GraphTemplate t = RandomTemplate(GraphId::kA, rng);
    EXPECT_TRUE(CheckInvarianceConditions(ObservedJoint(t), t.labels).holds);
  }
}

TEST(RiskInvarianceProperty, BayesOnCausalPart) {
  Rng rng(108);
  for (int trial = 0; trial < 50; ++trial) {
    const GraphTemplate t = RandomTemplate(GraphId::kA, rng);
    const JointTable q = BalanceExact(ObservedJoint(t), BalanceSpec::Joint("Y", "Z"));
    const ShiftFamily family{q, DefaultShiftGrid()};
    const auto xz = CovariatesWith(q, t.labels, Component::kXZperp);
    EXPECT_LT(RiskInvarianceGap(BayesPredictor(q, xz), family, Loss::kSquared).sup_gap, 1e-9);
  }
}

TEST(ApproximationBoundProperty, BoundNeverViolated) {
  Rng rng(109);
  for (GraphId id : {GraphId::kA, GraphId::kB, GraphId::kC, GraphId::kD}) {
    for (int trial = 0; trial < 15; ++trial) {
      const GraphTemplate t = RandomTemplate(id, rng);
      const JointTable q = BalanceExact(ObservedJoint(t), BalanceSpec::Joint("Y", "Z"));
      const ShiftFamily family{q, DefaultShiftGrid()};
      std::vector<std::string> all;
      for (const auto& [name, c] : t.labels) all.push_back(name);
      for (const auto& inputs : {all, CovariatesWith(q, t.labels, Component::kXZperp)}) {
       for (double size : {0.0, 0.05, 0.2}) {
        const ApproximationBoundResult r = CheckApproximationBound(PerturbedPredictor(q, inputs, size, rng), family, t.labels);
        if (r.assumption_holds) {
          EXPECT_TRUE(r.bound_holds) << GraphName(id) << " eps " << r.epsilon << " gap " << r.gap;
        }
       }
      }
    }
  }
}

TEST(FairnessTransferProperty, PremiseImpliesConclusion) {
  Rng rng(110);
  for (int trial = 0; trial < 50; ++trial) {
    const GraphTemplate t = RandomTemplate(GraphId::kA, rng);
    const JointTable p = ObservedJoint(t);
    for (FairnessCriterion c : {FairnessCriterion::kDemographicParity,
                                FairnessCriterion::kPredictiveParity,
                                FairnessCriterion::kEqualizedOdds}) {
      const FairnessTransferReport r = CheckFairnessTransfer(p, t.labels, c, std::nullopt, 1e-12);
      ASSERT_TRUE(r.premise_holds);
      EXPECT_TRUE(r.conclusion_holds) << CriterionName(c) << " " << r.conclusion_gap;
    }
  }
}

TEST(FairnessTransferProperty, GuaranteedCasesWithRegularizer) {
  Rng rng(111);
  for (GraphId id : {GraphId::kA, GraphId::kB, GraphId::kC, GraphId::kD}) {
    for (int trial = 0; trial < 10; ++trial) {
      const GraphTemplate t = RandomTemplate(id, rng);
      const JointTable p = ObservedJoint(t);
      for (auto reg : {RegularizerSurrogate::kConditional, RegularizerSurrogate::kMarginal}) {
        for (FairnessCriterion c : {FairnessCriterion::kDemographicParity,
                                    FairnessCriterion::kPredictiveParity,
                                    FairnessCriterion::kEqualizedOdds}) {
          const FairnessTransferReport r = CheckFairnessTransfer(p, t.labels, c, reg);
          if (r.guaranteed && r.premise_holds) EXPECT_TRUE(r.conclusion_holds);
        }
      }
    }
  }
}

TEST(CounterexampleProperty, SeedsOfCounterexamples) {
  for (CounterexampleId id : {CounterexampleId::kC1, CounterexampleId::kC2, CounterexampleId::kC3}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      EXPECT_NO_THROW(BalancingCounterexample(id, seed)) << CounterexampleName(id) << " seed " << seed;
    }
  }
}

TEST(EntangledProperty, ClosedFormOverGrid) {
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j <= 20; ++j) {
      const double p = i / 20.0, q = j / 20.0;
      if (p == 0.0 && q == 0.0) continue;
      const JointTable t = EntangledJoint(p, q);
      const TablePredictor f = BayesPredictor(t, {"X"});
      const EntangledGap g = EntangledGapClosedForm(p, q);
      EXPECT_NEAR(f.score[1], g.f1, 1e-12);
    }
  }
}

TEST(GradientProperty, RandomCases) {
  Rng rng(112);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 2 + rng.UniformInt(3);
    const Dataset data = RandomDataset(rng, 20 + rng.UniformInt(20), d);
    TrainSpec s;
    s.arch = trial % 2 ? Architecture::kMlp : Architecture::kLinear;
    s.l2 = 0.01 * rng.Uniform();
    s.mmd.mode = static_cast<MmdMode>(trial % 3);
    s.mmd.strength = 4 * rng.Uniform();
    s.mmd.bandwidth = 0.3 + rng.Uniform();
    s.mmd.on_representation = trial % 5 == 0;
    const ModelParams p = InitModel(s.arch, d, 3 + rng.UniformInt(4), trial);
    EXPECT_LT(GradientRelativeError(p, data, s), 1e-4) << "case " << trial;
  }
}

TEST(TrainingProperty, PenaltyReducesGroupDiscrepancy) {
  Rng rng(113);
  Dataset d = RandomDataset(rng, 800, 3);
  // Give the third column a strong group signal.
  for (std::size_t i = 0; i < d.size(); ++i) d.x(i, 2) = (d.z[i] ? 1.5 : -1.5) + rng.Normal();
  TrainSpec s;
  s.epochs = 15;
  s.seed = 4;
  s.mmd.mode = MmdMode::kMarginal;
  s.mmd.bandwidth = 0.25;
  auto discrepancy = [&](double strength) {
    TrainSpec t = s;
    t.mmd.strength = strength;
    const Eigen::VectorXd f = Scores(Train(d, t).params, d.x);
    std::vector<double> a, b;
    for (std::size_t i = 0; i < d.size(); ++i) (d.z[i] ? a : b).push_back(f(i));
    return Mmd2(a, b, 0.25);
  };
  EXPECT_LT(discrepancy(20.0), 0.5 * discrepancy(0.0));
}

}  // namespace
}  // namespace jbal
