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

#ifndef JBAL_TEMPLATES_H_
#define JBAL_TEMPLATES_H_

#include <map>
#include <string>
#include <vector>

#include "jbal/cbn.h"
#include "jbal/rng.h"

namespace jbal {

// Role of an observed covariate in the decomposition X = (X_Z^perp, X_Y^perp,
// X_{Y and Z}, X_V).
enum class Component { kXZperp, kXYperp, kXYandZ, kXV };

using DecompositionLabel = std::map<std::string, Component>;

const char* ComponentName(Component c);

// The four reference graphs:
//   A  purely spurious, anti-causal:  U -> Y, U -> Z, Y -> Xz, Z -> Xy
//   B  causal task:                   Xz -> Y <- U -> Z, Z -> Xy
//   C  extra factor of variation:     U1 -> {Y, Z}, U2 -> {Y, V}, U3 -> {Z, V},
//                                     Y -> Xz, Z -> Xy, V -> Xv
//   D  entangled:                     U -> Y, U -> Z, Y -> Xz, {Y, Z} -> Xyz
enum class GraphId { kA, kB, kC, kD };

const char* GraphName(GraphId id);
GraphId ParseGraphId(const std::string& name);

struct TemplateParams {
  // Confounding strength, read as P(Z=0 | Y=0) and P(Z=0 | Y=1) for the
  // anti-causal graphs (A, D) and as P(Z=0 | U=0), P(Z=0 | U=1) for B.
  double p_z0_given_y0 = 0.95;
  double p_z0_given_y1 = 0.10;
  double p_y1 = 0.5;
  // Flip probability of each binary covariate relative to its parent signal.
  double covariate_noise = 0.1;
  // Graph B: logit weights of Xz and U in P(Y=1 | Xz, U).
  double causal_weight = 2.0;
  double confounder_weight = 1.0;
  // Graph C: logit weights of U1, U2, U3 on their two children.
  double u1_weight = 2.5;
  double u2_weight = 1.5;
  double u3_weight = 1.0;
};

struct GraphTemplate {
  GraphId id;
  Cbn net;
  std::vector<std::string> latents;
  DecompositionLabel labels;
  // Observed variables (Y, Z and the covariates) in network order.
  std::vector<std::string> observed;
};

GraphTemplate MakeTemplate(GraphId id, const TemplateParams& params = {});

// Same structure with every CPT row drawn uniformly from [0.1, 0.9] and
// normalized.
GraphTemplate RandomTemplate(GraphId id, Rng& rng);

// Random strictly positive table of the given shape: each row drawn
// uniformly from [0.1, 0.9] and normalized.
std::vector<double> RandomCptRows(std::size_t rows, int cardinality, Rng& rng);

// Joint over the observed variables of a template.
JointTable ObservedJoint(const GraphTemplate& t);

// Skeleton over the observed variables in which the latent confounders are
// dropped together with every edge touching them.
Dag ObservedSkeletonWithoutConfounding(const GraphTemplate& t);

}  // namespace jbal

#endif  // JBAL_TEMPLATES_H_
