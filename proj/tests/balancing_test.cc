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
#include <map>

#include <gtest/gtest.h>

#include "jbal/errors.h"
#include "jbal/rng.h"
#include "jbal/templates.h"

namespace jbal {
namespace {

JointTable Yz(double a, double b, double c, double d) {
  return JointTable({{"Y", 2}, {"Z", 2}}, {a, b, c, d});
}

SampleBatch CellBatch(const std::map<std::pair<int, int>, int>& counts) {
  std::vector<int> states;
  for (const auto& [cell, n] : counts) {
    for (int i = 0; i < n; ++i) {
      states.push_back(cell.first);
      states.push_back(cell.second);
    }
  }
  return SampleBatch({{"Y", 2}, {"Z", 2}}, states);
}

std::map<std::pair<int, int>, double> CellMass(const SampleBatch& b) {
  std::map<std::pair<int, int>, double> out;
  for (std::size_t i = 0; i < b.size(); ++i) out[{b.At(i, 0), b.At(i, 1)}] += b.weights()[i];
  return out;
}

TEST(BalanceSpecTest, Mechanisms) {
  EXPECT_EQ(ParseMechanism(MechanismName(Mechanism::kUpsampleMinority)),
            Mechanism::kUpsampleMinority);
  EXPECT_THROW(ParseMechanism("bogus"), ArgumentError);
  EXPECT_TRUE(Resamples(Mechanism::kSubsampleMajority));
  EXPECT_FALSE(Resamples(Mechanism::kImportanceWeights));
}

TEST(BalanceExactTest, AlreadyIndependent) {
  const JointTable p = Yz(0.12, 0.18, 0.28, 0.42);
  const JointTable q = BalanceExact(p, BalanceSpec::Joint("Y", "Z"));
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(q.at(i), p.at(i), 1e-16);
}

TEST(BalanceExactTest, SymmetricTableBecomesUniform) {
  const JointTable q = BalanceExact(Yz(0.4, 0.1, 0.1, 0.4), BalanceSpec::Joint("Y", "Z"));
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(q.at(i), 0.25, 1e-15);
}

TEST(BalanceExactTest, ConfoundedTemplate) {
  const JointTable p = ObservedJoint(MakeTemplate(GraphId::kA));
  const JointTable q = BalanceExact(p, BalanceSpec::Joint("Y", "Z"));
  const JointTable yz = Marginalize(q, {"Y", "Z"});
  const double y0_z0 = yz.Prob({0, 0}) / (yz.Prob({0, 0}) + yz.Prob({1, 0}));
  const double y0_z1 = yz.Prob({0, 1}) / (yz.Prob({0, 1}) + yz.Prob({1, 1}));
  EXPECT_NEAR(y0_z0, y0_z1, 1e-14);
}

TEST(BalanceExactTest, MatchesFormulaCellwise) {
  // Independent oracle: Q = P * P(y) P(z) / P(y, z) over (X, Y, Z).
  Rng rng(9);
  std::vector<double> w(12);
  for (double& x : w) x = 0.05 + rng.Uniform();
  const JointTable p = JointTable::FromWeights({{"X", 3}, {"Y", 2}, {"Z", 2}}, w);
  const JointTable q = BalanceExact(p, BalanceSpec::Joint("Y", "Z"));
  double py[2] = {}, pz[2] = {}, pyz[2][2] = {};
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z) {
        const double v = p.Prob({x, y, z});
        py[y] += v;
        pz[z] += v;
        pyz[y][z] += v;
      }
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z)
        EXPECT_NEAR(q.Prob({x, y, z}), p.Prob({x, y, z}) * py[y] * pz[z] / pyz[y][z], 1e-15);
}

TEST(BalanceExactTest, UnbalanceableSupport) {
  EXPECT_THROW(BalanceExact(Yz(0.5, 0.0, 0.25, 0.25), BalanceSpec::Joint("Y", "Z")),
               UnbalanceableSupport);
  EXPECT_THROW(BalanceExact(Yz(0.5, 0.0, 0.25, 0.25), BalanceSpec::Joint("Y", "Q")), NameError);
}

TEST(BalanceSingleTest, WorkedExample) {
  // P(Y=1) = 1/4, E[Z | Y=1] = 1, E[Z | Y=0] = 1/3.
  const JointTable p = Yz(0.75 * 2.0 / 3.0, 0.75 / 3.0, 0.0, 0.25);
  const JointTable q = BalanceSingleExact(p, BalanceSpec::Single("Y"));
  const JointTable z = Marginalize(q, {"Z"});
  EXPECT_NEAR(z.at(1), 2.0 / 3.0, 1e-15);
  const JointTable y = Marginalize(q, {"Y"});
  EXPECT_NEAR(y.at(0), 0.5, 1e-15);
}

TEST(BalanceSingleTest, IdentityAndIndependence) {
  const JointTable p = Yz(0.1, 0.4, 0.2, 0.3);
  const JointTable q = BalanceSingleExact(p, BalanceSpec::Single("Y"));
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(q.at(i), p.at(i), 1e-16);
  const JointTable ind = Yz(0.3 * 0.2, 0.3 * 0.8, 0.7 * 0.2, 0.7 * 0.8);
  const JointTable qi = BalanceSingleExact(ind, BalanceSpec::Single("Y"));
  EXPECT_NEAR(Marginalize(qi, {"Z"}).at(0), 0.2, 1e-15);
  EXPECT_THROW(BalanceSingleExact(Yz(0.5, 0.5, 0.0, 0.0), BalanceSpec::Single("Y")),
               UnbalanceableSupport);
}

TEST(BalanceBatchTest, SubsampleToMinimum) {
  const SampleBatch b = CellBatch({{{0, 0}, 40}, {{0, 1}, 10}, {{1, 0}, 10}, {{1, 1}, 40}});
  const SampleBatch out =
      BalanceBatch(b, BalanceSpec::Joint("Y", "Z", Mechanism::kSubsampleMajority, 3));
  for (const auto& [cell, mass] : CellMass(out)) EXPECT_EQ(mass, 10.0);
  EXPECT_EQ(out.size(), 40u);
}

TEST(BalanceBatchTest, SubsampleKeepsBalancedMultiset) {
  const SampleBatch b = CellBatch({{{0, 0}, 7}, {{0, 1}, 7}, {{1, 0}, 7}, {{1, 1}, 7}});
  const SampleBatch out =
      BalanceBatch(b, BalanceSpec::Joint("Y", "Z", Mechanism::kSubsampleMajority, 3));
  EXPECT_EQ(CellMass(out), CellMass(b));
}

TEST(BalanceBatchTest, ImportanceWeights) {
  const SampleBatch b = CellBatch({{{0, 0}, 40}, {{0, 1}, 10}, {{1, 0}, 10}, {{1, 1}, 40}});
  const SampleBatch out = BalanceBatch(b, BalanceSpec::Joint("Y", "Z", Mechanism::kImportanceWeights));
  EXPECT_NEAR(out.weights()[0], 50.0 * 50.0 / (100.0 * 40.0), 1e-15);
  EXPECT_NEAR(out.weights()[40], 2.5, 1e-15);
  for (const auto& [cell, mass] : CellMass(out)) EXPECT_NEAR(mass, 25.0, 1e-12);
}

TEST(BalanceBatchTest, UpsampleToMaximum) {
  const SampleBatch b = CellBatch({{{0, 0}, 40}, {{0, 1}, 10}, {{1, 0}, 13}, {{1, 1}, 40}});
  const SampleBatch out =
      BalanceBatch(b, BalanceSpec::Joint("Y", "Z", Mechanism::kUpsampleMinority, 5));
  for (const auto& [cell, mass] : CellMass(out)) EXPECT_EQ(mass, 40.0);
}

TEST(BalanceBatchTest, SeedRules) {
  const SampleBatch b = CellBatch({{{0, 0}, 4}, {{0, 1}, 2}, {{1, 0}, 2}, {{1, 1}, 4}});
  EXPECT_THROW(BalanceBatch(b, BalanceSpec::Joint("Y", "Z", Mechanism::kSubsampleMajority)),
               ArgumentError);
  EXPECT_THROW(BalanceBatch(b, BalanceSpec::Joint("Y", "Z", Mechanism::kImportanceWeights, 1)),
               ArgumentError);
  const auto s = BalanceSpec::Joint("Y", "Z", Mechanism::kUpsampleMinority, 8);
  const SampleBatch x = BalanceBatch(b, s), y = BalanceBatch(b, s);
  ASSERT_EQ(x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(x.At(i, 0), y.At(i, 0));
}

TEST(BalanceBatchTest, EmptyCellIsNamed) {
  const SampleBatch b = CellBatch({{{0, 0}, 4}, {{0, 1}, 2}, {{1, 1}, 4}});
  try {
    BalanceBatch(b, BalanceSpec::Joint("Y", "Z", Mechanism::kImportanceWeights));
    FAIL();
  } catch (const UnbalanceableSupport& e) {
    EXPECT_NE(std::string(e.what()).find("Y=1"), std::string::npos) << e.what();
  }
}

TEST(BiasShiftTest, WorkedExample) {
  const BiasShift s = BiasShiftSingle(0.25, 1.0, 1.0 / 3.0);
  EXPECT_NEAR(s.before, 0.0, 1e-15);
  EXPECT_NEAR(s.after, 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(s.bound, 1.0 / 6.0, 1e-15);
  EXPECT_TRUE(s.worsens);
}

TEST(BiasShiftTest, BalancedLabelsChangeNothing) {
  const BiasShift s = BiasShiftSingle(0.5, 0.9, 0.2);
  EXPECT_NEAR(s.after, s.before, 1e-15);
  EXPECT_EQ(s.bound, 0.0);
  EXPECT_FALSE(s.worsens);
}

TEST(BiasShiftTest, MatchesExactBalancing) {
  // Oracle: build the (Y, Z) table and balance it exactly.
  const double p1 = 0.3, e1 = 0.8, e0 = 0.45;
  const JointTable p = Yz((1 - p1) * (1 - e0), (1 - p1) * e0, p1 * (1 - e1), p1 * e1);
  const double after = Marginalize(BalanceSingleExact(p, BalanceSpec::Single("Y")), {"Z"}).at(1);
  const BiasShift s = BiasShiftSingle(p1, e1, e0);
  EXPECT_NEAR(s.after, after - 0.5, 1e-15);
  EXPECT_NEAR(s.before, Marginalize(p, {"Z"}).at(1) - 0.5, 1e-15);
}

}  // namespace
}  // namespace jbal
