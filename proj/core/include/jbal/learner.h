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

#ifndef JBAL_LEARNER_H_
#define JBAL_LEARNER_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jbal/datagen.h"

namespace jbal {

enum class Activation { kIdentity, kRelu };
enum class Architecture { kLinear, kMlp };

const char* ActivationName(Activation a);
const char* ArchitectureName(Architecture a);
Architecture ParseArchitecture(const std::string& name);

struct Layer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

// A linear model is one 1 x d layer; the hidden-layer model has two layers
// with `activation` applied between them.
struct ModelParams {
  std::vector<Layer> layers;
  Activation activation = Activation::kRelu;

  std::size_t input_dim() const;
  // Throws ArgumentError when shapes do not chain from `input_dim` to 1.
  void Validate(std::size_t input_dim) const;
  std::size_t NumParameters() const;
  // Flat copy in layer order (weight row-major, then bias) and back.
  Eigen::VectorXd Flatten() const;
  void Unflatten(const Eigen::VectorXd& flat);
};

bool operator==(const ModelParams& a, const ModelParams& b);

ModelParams InitModel(Architecture arch, std::size_t input_dim, std::size_t hidden,
                      std::uint64_t seed);

Eigen::VectorXd Logits(const ModelParams& params, const RowMatrix& x);
Eigen::VectorXd Scores(const ModelParams& params, const RowMatrix& x);

// Hidden activations of the two-layer model; the score pre-activation (one
// column) of a linear model.
RowMatrix Representation(const ModelParams& params, const RowMatrix& x);

enum class MmdMode { kNone, kMarginal, kConditional };
const char* MmdModeName(MmdMode m);
MmdMode ParseMmdMode(const std::string& name);

struct MmdSpec {
  MmdMode mode = MmdMode::kNone;
  double strength = 0.0;
  // 0 selects the median heuristic on the first training batch.
  double bandwidth = 0.0;
  // Penalize the representation instead of the score.
  bool on_representation = false;
};

struct TrainSpec {
  Architecture arch = Architecture::kLinear;
  std::size_t hidden = 16;
  std::size_t epochs = 20;
  std::size_t batch_size = 256;
  double learning_rate = 0.05;
  double momentum = 0.9;
  double l2 = 1e-4;
  MmdSpec mmd;
  std::uint64_t seed = 0;

  void Validate() const;
};

struct LossValue {
  double value = 0.0;
  double ce = 0.0;
  double l2 = 0.0;
  double mmd = 0.0;
  std::size_t skipped_strata = 0;
  ModelParams gradient;
};

// Loss on the rows `rows` of `data`. `spec.mmd.bandwidth` must already be
// positive when a penalty is active. Throws NumericsError on a non-finite
// value.
LossValue ComputeLoss(const ModelParams& params, const Dataset& data,
                      std::span<const std::size_t> rows, const TrainSpec& spec);
LossValue ComputeLoss(const ModelParams& params, const Dataset& data, const TrainSpec& spec);

struct EpochLog {
  std::size_t epoch = 0;
  double loss = 0.0;
  double ce = 0.0;
  double l2 = 0.0;
  double mmd = 0.0;
  std::size_t skipped_strata = 0;
};

struct TrainResult {
  ModelParams params;
  // Row 0 evaluates the initial parameters; row e averages the batches of
  // epoch e.
  std::vector<EpochLog> log;
  double bandwidth = 0.0;
};

TrainResult Train(const Dataset& data, const TrainSpec& spec);
TrainResult Train(const Dataset& data, const TrainSpec& spec, ModelParams init);

enum class ProbeTarget { kZ, kV };

// Held-out accuracy of a logistic regression from the frozen representation
// to the target on a seeded 70/30 split.
double ProbeEncoding(const ModelParams& params, const Dataset& data, ProbeTarget target,
                     std::uint64_t seed);

std::string SerializeModel(const ModelParams& params);
ModelParams ParseModel(const std::string& text);

std::string SerializeTrainLog(const std::vector<EpochLog>& log);

}  // namespace jbal

#endif  // JBAL_LEARNER_H_
