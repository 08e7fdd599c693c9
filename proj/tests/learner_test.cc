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

#include "jbal/learner.h"

#include <cmath>

#include <gtest/gtest.h>

#include "jbal/errors.h"
#include "jbal/metrics.h"
#include "test_util.h"

namespace jbal {
namespace {

using testing::GradientRelativeError;
using testing::RandomDataset;

TrainSpec Penalized(MmdMode mode, bool on_rep = false) {
  TrainSpec s;
  s.l2 = 0.01;
  s.mmd.mode = mode;
  s.mmd.strength = 2.0;
  s.mmd.bandwidth = 0.7;
  s.mmd.on_representation = on_rep;
  return s;
}

TEST(LearnerGradientTest, AllModesAndArchitectures) {
  Rng rng(21);
  const Dataset data = RandomDataset(rng, 40, 3);
  for (Architecture arch : {Architecture::kLinear, Architecture::kMlp}) {
    for (MmdMode mode : {MmdMode::kNone, MmdMode::kMarginal, MmdMode::kConditional}) {
      for (bool on_rep : {false, true}) {
        const ModelParams p = InitModel(arch, 3, 5, 3);
        EXPECT_LT(GradientRelativeError(p, data, Penalized(mode, on_rep)), 1e-4)
            << ArchitectureName(arch) << " " << MmdModeName(mode) << " rep=" << on_rep;
      }
    }
  }
}

TEST(LearnerGradientTest, SingleSampleLogistic) {
  ModelParams p = InitModel(Architecture::kLinear, 2, 1, 0);
  p.layers[0].weight << 0.3, -0.2;
  p.layers[0].bias << 0.1;
  Dataset d;
  d.x.resize(1, 2);
  d.x << 1.5, 2.0;
  d.y = {1};
  d.z = {0};
  d.weights = {1.0};
  TrainSpec s;
  s.l2 = 0.5;
  const LossValue v = ComputeLoss(p, d, s);
  const double t = 0.3 * 1.5 - 0.2 * 2.0 + 0.1;
  const double sig = 1.0 / (1.0 + std::exp(-t));
  EXPECT_NEAR(v.ce, std::log1p(std::exp(-t)), 1e-15);
  EXPECT_NEAR(v.l2, 0.5 * (0.09 + 0.04), 1e-15);
  EXPECT_NEAR(v.gradient.layers[0].weight(0, 0), (sig - 1) * 1.5 + 2 * 0.5 * 0.3, 1e-15);
  EXPECT_NEAR(v.gradient.layers[0].weight(0, 1), (sig - 1) * 2.0 - 2 * 0.5 * 0.2, 1e-15);
  EXPECT_NEAR(v.gradient.layers[0].bias(0), sig - 1, 1e-15);
}

TEST(LearnerLossTest, UndersizedStrataAreSkipped) {
  Rng rng(2);
  Dataset d = RandomDataset(rng, 12, 2);
  for (std::size_t i = 0; i < d.size(); ++i) d.z[i] = d.y[i] == 0 ? 0 : static_cast<int>(i % 2);
  const ModelParams p = InitModel(Architecture::kLinear, 2, 1, 0);
  const LossValue v = ComputeLoss(p, d, Penalized(MmdMode::kConditional));
  EXPECT_EQ(v.skipped_strata, 1u);
  EXPECT_THROW(ComputeLoss(p, d, std::span<const std::size_t>{}, Penalized(MmdMode::kMarginal)),
               ArgumentError);
  TrainSpec unresolved = Penalized(MmdMode::kMarginal);
  unresolved.mmd.bandwidth = 0.0;
  EXPECT_THROW(ComputeLoss(p, d, unresolved), ArgumentError);
}

TEST(LearnerTrainTest, ZeroLearningRateKeepsParameters) {
  Rng rng(3);
  const Dataset d = RandomDataset(rng, 100, 4);
  TrainSpec s;
  s.learning_rate = 0.0;
  s.epochs = 3;
  s.seed = 8;
  const ModelParams init = InitModel(Architecture::kLinear, 4, 1, 5);
  EXPECT_EQ(Train(d, s, init).params, init);
}

TEST(LearnerTrainTest, SeparableData) {
  Rng rng(4);
  Dataset d = RandomDataset(rng, 1000, 2);
  for (std::size_t i = 0; i < d.size(); ++i) d.y[i] = d.x(i, 0) + d.x(i, 1) > 0 ? 1 : 0;
  for (Architecture arch : {Architecture::kLinear, Architecture::kMlp}) {
    TrainSpec s;
    s.arch = arch;
    s.epochs = 40;
    s.l2 = 0.0;
    s.seed = 1;
    const TrainResult r = Train(d, s);
    EXPECT_GT(Evaluate(r.params, d).accuracy, 0.99) << ArchitectureName(arch);
    EXPECT_LT(r.log.back().loss, r.log.front().loss);
  }
}

TEST(LearnerTrainTest, BitwiseReproducible) {
  Rng rng(5);
  const Dataset d = RandomDataset(rng, 300, 3);
  TrainSpec s = Penalized(MmdMode::kConditional);
  s.arch = Architecture::kMlp;
  s.mmd.bandwidth = 0.0;
  s.epochs = 4;
  s.batch_size = 64;
  s.seed = 77;
  const TrainResult a = Train(d, s);
  const TrainResult b = Train(d, s);
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.bandwidth, b.bandwidth);
  EXPECT_GT(a.bandwidth, 0.0);
  ASSERT_EQ(a.log.size(), 5u);
  for (std::size_t e = 0; e < a.log.size(); ++e) EXPECT_EQ(a.log[e].loss, b.log[e].loss);
  s.seed = 78;
  EXPECT_FALSE(Train(d, s).params == a.params);
}

TEST(LearnerTrainTest, InvalidSpecs) {
  Rng rng(6);
  const Dataset d = RandomDataset(rng, 20, 2);
  TrainSpec s;
  s.batch_size = 0;
  EXPECT_THROW(Train(d, s), ArgumentError);
  s = TrainSpec();
  s.momentum = 1.0;
  EXPECT_THROW(Train(d, s), ArgumentError);
  s = TrainSpec();
  s.mmd.strength = -1.0;
  EXPECT_THROW(Train(d, s), ArgumentError);
  EXPECT_THROW(Train(d, TrainSpec(), InitModel(Architecture::kLinear, 3, 1, 0)), ArgumentError);
}

TEST(LearnerTrainTest, DivergenceIsReported) {
  Rng rng(7);
  Dataset d = RandomDataset(rng, 50, 2);
  d.x *= 1e150;
  TrainSpec s;
  s.learning_rate = 1e10;
  EXPECT_THROW(Train(d, s), NumericsError);
}

TEST(LearnerModelTest, SerializationRoundTrip) {
  const ModelParams p = InitModel(Architecture::kMlp, 4, 3, 9);
  const ModelParams back = ParseModel(SerializeModel(p));
  EXPECT_EQ(back, p);
  EXPECT_EQ(back.NumParameters(), 4u * 3 + 3 + 3 + 1);
  EXPECT_THROW(ParseModel("jbal-model 2\n"), ParseError);
  EXPECT_THROW(ParseModel("jbal-model 1\nactivation relu\nlayers 1\nweight 1 2\n0.5\n"), ParseError);
}

TEST(LearnerModelTest, Shapes) {
  const ModelParams lin = InitModel(Architecture::kLinear, 6, 9, 1);
  EXPECT_EQ(lin.layers.size(), 1u);
  EXPECT_EQ(lin.input_dim(), 6u);
  RowMatrix x = RowMatrix::Zero(3, 6);
  EXPECT_EQ(Representation(lin, x).cols(), 1);
  const ModelParams mlp = InitModel(Architecture::kMlp, 6, 9, 1);
  EXPECT_EQ(Representation(mlp, x).cols(), 9);
  const Eigen::VectorXd s = Scores(mlp, x);
  EXPECT_TRUE(((s.array() > 0) && (s.array() < 1)).all());
  EXPECT_THROW(ParseArchitecture("cnn"), ArgumentError);
  EXPECT_EQ(ParseMmdMode("conditional"), MmdMode::kConditional);
}

TEST(LearnerTrainLogTest, Csv) {
  std::vector<EpochLog> log(2);
  log[1].epoch = 1;
  log[1].loss = 0.25;
  log[1].skipped_strata = 3;
  const std::string csv = SerializeTrainLog(log);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "epoch,loss,ce,l2,mmd,skipped_strata");
  EXPECT_NE(csv.find("1,0.25,"), std::string::npos);
}

TEST(ProbeTest, DetectsEncodedGroup) {
  Rng rng(8);
  Dataset d = RandomDataset(rng, 2000, 2);
  for (std::size_t i = 0; i < d.size(); ++i) d.x(i, 1) = (d.z[i] ? 1.0 : -1.0) + 0.3 * rng.Normal();
  ModelParams p = InitModel(Architecture::kLinear, 2, 1, 0);
  p.layers[0].weight << 0.0, 1.0;
  EXPECT_GT(ProbeEncoding(p, d, ProbeTarget::kZ, 1), 0.95);
  // A score built from a column unrelated to Z given Y still carries Z
  // through Y; rebuild Z independently to get chance level.
  for (std::size_t i = 0; i < d.size(); ++i) d.z[i] = rng.Uniform() < 0.5;
  p.layers[0].weight << 1.0, 0.0;
  EXPECT_NEAR(ProbeEncoding(p, d, ProbeTarget::kZ, 1), 0.5, 0.06);
  EXPECT_THROW(ProbeEncoding(p, d, ProbeTarget::kV, 1), ArgumentError);
  for (int& z : d.z) z = 1;
  EXPECT_THROW(ProbeEncoding(p, d, ProbeTarget::kZ, 1), DegenerateTarget);
}

}  // namespace
}  // namespace jbal
