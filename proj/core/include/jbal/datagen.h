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

#ifndef JBAL_DATAGEN_H_
#define JBAL_DATAGEN_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "jbal/joint_table.h"
#include "jbal/templates.h"

namespace jbal {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Parameters of a tabular surrogate. Every channel is a block of columns
// whose mean is +/- (separation / 2) along the block diagonal direction,
// keyed by one binary latent, plus isotropic Gaussian noise.
struct GenSpec {
  GraphId graph = GraphId::kA;
  std::size_t n = 30000;
  double p_y1 = 0.5;
  // Graphs A, C, D: P(Z=0 | Y=0) and P(Z=0 | Y=1).
  double p_z0_given_y0 = 0.95;
  double p_z0_given_y1 = 0.10;
  // Graph C: P(V=0 | Y=0), P(V=0 | Y=1), and the within-Y coupling of V to
  // Z (0 keeps V independent of Z given Y; the largest admissible value
  // depends on the other probabilities).
  double p_v0_given_y0 = 0.2;
  double p_v0_given_y1 = 0.9;
  double v_coupling = 0.11;
  // Graph B: Y copies the confounder U with probability `u_association`
  // (otherwise the core class C); Z copies U with probability `lambda`
  // (otherwise a fair coin).
  double u_association = 0.4;
  double lambda = 0.8;
  std::size_t dim_core = 8;
  std::size_t dim_aux = 8;
  std::size_t dim_v = 0;
  double sep_core = 1.5;
  double sep_aux = 5.0;
  double sep_v = 4.0;
  double noise_core = 1.0;
  double noise_aux = 1.0;
  double noise_v = 1.0;
  // Probability that the observed label differs from the core class
  // (anti-causal graphs) or that the core class is flipped before it
  // drives Y (graph B).
  double label_noise = 0.02;
  std::uint64_t seed = 0;

  // Defaults adjusted per graph (dim_v = 8 for C).
  static GenSpec Defaults(GraphId graph);
};

// Throws SpecError on invalid combinations.
void ValidateGenSpec(const GenSpec& spec);

struct ChannelSlice {
  std::string name;
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const ChannelSlice&, const ChannelSlice&) = default;
};

struct Dataset {
  std::vector<int> y;
  std::vector<int> z;
  std::optional<std::vector<int>> v;
  RowMatrix x;
  std::vector<double> weights;
  std::vector<ChannelSlice> channels;

  std::size_t size() const { return y.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(x.cols()); }
  // Throws ArgumentError when lengths or slices are inconsistent. An empty
  // channel list leaves the columns unlabeled.
  void Validate() const;
  // Rows by index (repetition allowed) with the given weights.
  Dataset Select(const std::vector<std::size_t>& rows, std::vector<double> new_weights) const;
  const ChannelSlice& Channel(const std::string& name) const;
};

// Exact joint of the binary latents of a surrogate: always Y, Z and the
// core class C; U for graph B, V for graph C, E = OR(Y, Z) for graph D.
JointTable LatentJoint(const GenSpec& spec);

Dataset Generate(const GenSpec& spec);

// P(Z | Y) uniform (and P(V | Y) uniform for graph C, with V independent of
// Z); graph D additionally replaces the entangled channel by zero-mean noise.
Dataset IdealTestset(const GenSpec& spec, std::size_t n, std::uint64_t seed);

// One dataset per grid element, only P(Z | Y) changed. Element i uses the
// seed stream (seed, i).
std::vector<Dataset> ShiftTestsets(const GenSpec& spec,
                                   const std::vector<std::array<std::array<double, 2>, 2>>& grid,
                                   std::size_t n, std::uint64_t seed);

// Delimited text with header y,z[,v],weight,x0..x{d-1}; values written with
// 17 significant digits.
std::string SerializeDatasetCsv(const Dataset& data);
Dataset ParseDatasetCsv(const std::string& text, std::vector<ChannelSlice> channels);

// Sidecar document recording the GenSpec and the channel layout.
// A nonempty `config_hash` is recorded as provenance and ignored on parse.
std::string SerializeDatasetMetadata(const GenSpec& spec, const std::vector<ChannelSlice>& channels,
                                     std::string_view config_hash = {});
void ParseDatasetMetadata(const std::string& text, GenSpec* spec,
                          std::vector<ChannelSlice>* channels);

void WriteDataset(const std::string& path_prefix, const GenSpec& spec, const Dataset& data,
                  std::string_view config_hash = {});
Dataset ReadDataset(const std::string& path_prefix, GenSpec* spec = nullptr);

}  // namespace jbal

#endif  // JBAL_DATAGEN_H_
