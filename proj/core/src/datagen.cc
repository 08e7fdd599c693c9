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

#include "jbal/datagen.h"

#include <cmath>
#include <string>

#include "jbal/errors.h"
#include "jbal/propcheck.h"
#include "jbal/rng.h"
#include "jbal/sample_batch.h"

namespace jbal {
namespace {

void CheckProbability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw SpecError(std::string(what) + " must lie in [0, 1]");
  }
}

void CheckNonNegative(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw SpecError(std::string(what) + " must be finite and non-negative");
  }
}

// P(V=0 | y, z) for graph C. The coupling moves mass between the two Z
// strata of each Y so that P(V | Y) is unchanged.
double VGivenYZ(const GenSpec& spec, int y, int z) {
  const double base = y == 0 ? spec.p_v0_given_y0 : spec.p_v0_given_y1;
  const double pz0 = y == 0 ? spec.p_z0_given_y0 : spec.p_z0_given_y1;
  const double shift = z == 0 ? spec.v_coupling * (1.0 - pz0) : -spec.v_coupling * pz0;
  return base + shift;
}

enum Latent { kLy = 0, kLz = 1, kLc = 2, kLextra = 3 };

const char* ExtraName(GraphId graph) {
  switch (graph) {
    case GraphId::kB:
      return "U";
    case GraphId::kC:
      return "V";
    case GraphId::kD:
      return "E";
    case GraphId::kA:
      break;
  }
  return nullptr;
}

struct Block {
  std::size_t begin;
  std::size_t dim;
  double sep;
  double noise;
};

// Fills rows of `x` from the latent states; key < 0 means a zero mean.
void FillBlock(RowMatrix& x, const Block& block, const std::vector<int>& key, Rng rng) {
  if (block.dim == 0) return;
  const double scale = 0.5 * block.sep / std::sqrt(static_cast<double>(block.dim));
  for (std::size_t i = 0; i < key.size(); ++i) {
    const double mean = key[i] < 0 ? 0.0 : (key[i] == 1 ? scale : -scale);
    for (std::size_t j = 0; j < block.dim; ++j) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(block.begin + j)) =
          mean + block.noise * rng.Normal();
    }
  }
}

std::vector<ChannelSlice> Layout(const GenSpec& spec) {
  std::vector<ChannelSlice> out;
  out.push_back({"core", 0, spec.dim_core});
  out.push_back({spec.graph == GraphId::kD ? "entangled" : "aux", spec.dim_core,
                 spec.dim_core + spec.dim_aux});
  if (spec.dim_v > 0) {
    out.push_back({"v", spec.dim_core + spec.dim_aux, spec.dim_core + spec.dim_aux + spec.dim_v});
  }
  return out;
}

// Draws features for sampled latents. `zero_aux` replaces the second channel
// with zero-mean noise.
Dataset Materialize(const GenSpec& spec, const SampleBatch& latents, std::uint64_t seed,
                    bool zero_aux) {
  Dataset out;
  const std::size_t n = latents.size();
  out.y = latents.Column("Y");
  out.z = latents.Column("Z");
  const std::vector<int> c = latents.Column("C");
  std::vector<int> aux_key = spec.graph == GraphId::kD ? latents.Column("E") : out.z;
  if (zero_aux) aux_key.assign(n, -1);
  if (spec.graph == GraphId::kC) out.v = latents.Column("V");
  out.channels = Layout(spec);
  out.x = RowMatrix::Zero(static_cast<Eigen::Index>(n),
                          static_cast<Eigen::Index>(spec.dim_core + spec.dim_aux + spec.dim_v));
  out.weights.assign(n, 1.0);
  const Rng rng(DeriveSeed(seed, 1));
  FillBlock(out.x, {0, spec.dim_core, spec.sep_core, spec.noise_core}, c, rng.Split(0));
  FillBlock(out.x, {spec.dim_core, spec.dim_aux, spec.sep_aux, spec.noise_aux}, aux_key,
            rng.Split(1));
  if (out.v) {
    FillBlock(out.x, {spec.dim_core + spec.dim_aux, spec.dim_v, spec.sep_v, spec.noise_v}, *out.v,
              rng.Split(2));
  }
  return out;
}

Dataset FromJoint(const GenSpec& spec, const JointTable& joint, std::size_t n, std::uint64_t seed,
                  bool zero_aux) {
  if (n == 0) throw SpecError("sample count must be at least 1");
  return Materialize(spec, Sample(joint, n, DeriveSeed(seed, 0)), seed, zero_aux);
}

}  // namespace

GenSpec GenSpec::Defaults(GraphId graph) {
  GenSpec spec;
  spec.graph = graph;
  if (graph == GraphId::kC) spec.dim_v = 8;
  return spec;
}

void ValidateGenSpec(const GenSpec& spec) {
  if (spec.n == 0) throw SpecError("n must be at least 1");
  CheckProbability(spec.p_y1, "p_y1");
  CheckProbability(spec.p_z0_given_y0, "p_z0_given_y0");
  CheckProbability(spec.p_z0_given_y1, "p_z0_given_y1");
  CheckProbability(spec.p_v0_given_y0, "p_v0_given_y0");
  CheckProbability(spec.p_v0_given_y1, "p_v0_given_y1");
  CheckProbability(spec.u_association, "u_association");
  CheckProbability(spec.lambda, "lambda");
  CheckProbability(spec.label_noise, "label_noise");
  CheckNonNegative(spec.sep_core, "sep_core");
  CheckNonNegative(spec.sep_aux, "sep_aux");
  CheckNonNegative(spec.sep_v, "sep_v");
  CheckNonNegative(spec.noise_core, "noise_core");
  CheckNonNegative(spec.noise_aux, "noise_aux");
  CheckNonNegative(spec.noise_v, "noise_v");
  if (spec.dim_core == 0 || spec.dim_aux == 0) {
    throw SpecError("dim_core and dim_aux must be at least 1");
  }
  if (spec.graph == GraphId::kC) {
    if (spec.dim_v == 0) throw SpecError("graph C needs dim_v >= 1");
    if (!std::isfinite(spec.v_coupling)) throw SpecError("v_coupling must be finite");
    for (int y = 0; y < 2; ++y) {
      for (int z = 0; z < 2; ++z) {
        const double p = VGivenYZ(spec, y, z);
        if (!(p >= 0.0 && p <= 1.0)) {
          throw SpecError("v_coupling pushes P(V=0 | Y, Z) outside [0, 1]");
        }
      }
    }
  } else if (spec.dim_v != 0) {
    throw SpecError(std::string("dim_v is only valid for graph C, not ") + GraphName(spec.graph));
  }
}

void Dataset::Validate() const {
  const std::size_t n = y.size();
  if (z.size() != n || weights.size() != n || static_cast<std::size_t>(x.rows()) != n ||
      (v && v->size() != n)) {
    throw ArgumentError("dataset columns have different lengths");
  }
  std::size_t at = 0;
  for (const ChannelSlice& slice : channels) {
    if (slice.begin != at || slice.end <= slice.begin) {
      throw ArgumentError("channel slices must partition the feature columns");
    }
    at = slice.end;
  }
  if (!channels.empty() && at != static_cast<std::size_t>(x.cols())) {
    throw ArgumentError("channel slices must partition the feature columns");
  }
  auto binary = [](const std::vector<int>& col) {
    for (int s : col) {
      if (s != 0 && s != 1) return false;
    }
    return true;
  };
  if (!binary(y) || !binary(z) || (v && !binary(*v))) {
    throw ArgumentError("label columns must be binary");
  }
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ArgumentError("weights must be finite and >= 0");
  }
}

Dataset Dataset::Select(const std::vector<std::size_t>& rows,
                        std::vector<double> new_weights) const {
  if (new_weights.size() != rows.size()) {
    throw ArgumentError("one weight per selected row is required");
  }
  Dataset out;
  out.channels = channels;
  out.weights = std::move(new_weights);
  out.x.resize(static_cast<Eigen::Index>(rows.size()), x.cols());
  out.y.reserve(rows.size());
  out.z.reserve(rows.size());
  if (v) out.v.emplace().reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t r = rows[i];
    if (r >= size()) throw ArgumentError("row index out of range");
    out.y.push_back(y[r]);
    out.z.push_back(z[r]);
    if (v) out.v->push_back((*v)[r]);
    out.x.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(r));
  }
  return out;
}

const ChannelSlice& Dataset::Channel(const std::string& name) const {
  for (const ChannelSlice& slice : channels) {
    if (slice.name == name) return slice;
  }
  throw NameError("no channel named '" + name + "'");
}

JointTable LatentJoint(const GenSpec& spec) {
  ValidateGenSpec(spec);
  std::vector<Variable> vars = {{"Y", 2}, {"Z", 2}, {"C", 2}};
  const char* extra = ExtraName(spec.graph);
  if (extra != nullptr) vars.push_back({extra, 2});
  const double noise = spec.label_noise;
  std::vector<double> weights(StateSpaceSize(vars), 0.0);
  const JointTable shape = JointTable::Uniform(vars);
  std::vector<int> s(vars.size());
  for (std::size_t cell = 0; cell < weights.size(); ++cell) {
    shape.Decode(cell, s);
    const int y = s[kLy];
    const int z = s[kLz];
    const int c = s[kLc];
    double p = 0.0;
    if (spec.graph == GraphId::kB) {
      // C and U are independent roots; Y copies U or the (noisy) core class.
      const int u = s[kLextra];
      const double pc = c == 1 ? spec.p_y1 : 1.0 - spec.p_y1;
      const double y_from_c = (y == c) ? 1.0 - noise : noise;
      const double py = spec.u_association * (y == u ? 1.0 : 0.0) +
                        (1.0 - spec.u_association) * y_from_c;
      const double pz = spec.lambda * (z == u ? 1.0 : 0.0) + (1.0 - spec.lambda) * 0.5;
      p = pc * 0.5 * py * pz;
    } else {
      const double py = y == 1 ? spec.p_y1 : 1.0 - spec.p_y1;
      const double pz0 = y == 0 ? spec.p_z0_given_y0 : spec.p_z0_given_y1;
      const double pz = z == 0 ? pz0 : 1.0 - pz0;
      const double pc = c == y ? 1.0 - noise : noise;
      p = py * pz * pc;
      if (spec.graph == GraphId::kC) {
        const double pv0 = VGivenYZ(spec, y, z);
        p *= s[kLextra] == 0 ? pv0 : 1.0 - pv0;
      } else if (spec.graph == GraphId::kD) {
        p *= s[kLextra] == (y | z) ? 1.0 : 0.0;
      }
    }
    weights[cell] = p;
  }
  return JointTable::FromWeights(std::move(vars), std::move(weights));
}

Dataset Generate(const GenSpec& spec) {
  return FromJoint(spec, LatentJoint(spec), spec.n, spec.seed, false);
}

Dataset IdealTestset(const GenSpec& spec, std::size_t n, std::uint64_t seed) {
  ValidateGenSpec(spec);
  if (spec.graph == GraphId::kC) {
    GenSpec ideal = spec;
    ideal.p_z0_given_y0 = ideal.p_z0_given_y1 = 0.5;
    ideal.p_v0_given_y0 = ideal.p_v0_given_y1 = 0.5;
    ideal.v_coupling = 0.0;
    return FromJoint(spec, LatentJoint(ideal), n, seed, false);
  }
  const std::array<std::array<double, 2>, 2> uniform = {{{0.5, 0.5}, {0.5, 0.5}}};
  return FromJoint(spec, ShiftedTable(LatentJoint(spec), uniform), n, seed,
                   spec.graph == GraphId::kD);
}

std::vector<Dataset> ShiftTestsets(const GenSpec& spec,
                                   const std::vector<std::array<std::array<double, 2>, 2>>& grid,
                                   std::size_t n, std::uint64_t seed) {
  const JointTable base = LatentJoint(spec);
  std::vector<Dataset> out;
  out.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.push_back(FromJoint(spec, ShiftedTable(base, grid[i]), n, DeriveSeed(seed, i), false));
  }
  return out;
}

}  // namespace jbal
