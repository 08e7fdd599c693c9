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

#include "jbal/templates.h"

#include <algorithm>
#include <cmath>

#include "jbal/errors.h"

namespace jbal {
namespace {

double Sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

double Sign(int state) { return state == 0 ? -1.0 : 1.0; }

std::vector<double> Bernoulli(double p1) { return {1.0 - p1, p1}; }

// Row r of a binary child of a single binary parent: copy the parent state
// with probability 1 - noise.
std::vector<double> NoisyCopy(double noise) {
  return {1.0 - noise, noise, noise, 1.0 - noise};
}

void CheckProbability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw SpecError(std::string(what) + " must lie in [0, 1]");
  }
}

struct Blueprint {
  std::vector<std::pair<std::string, std::vector<std::string>>> nodes;
  std::vector<std::string> latents;
  DecompositionLabel labels;
};

Blueprint MakeBlueprint(GraphId id) {
  switch (id) {
    case GraphId::kA:
      return {{{"U", {}}, {"Y", {"U"}}, {"Z", {"U"}}, {"Xz", {"Y"}}, {"Xy", {"Z"}}},
              {"U"},
              {{"Xz", Component::kXZperp}, {"Xy", Component::kXYperp}}};
    case GraphId::kB:
      return {{{"Xz", {}}, {"U", {}}, {"Y", {"Xz", "U"}}, {"Z", {"U"}}, {"Xy", {"Z"}}},
              {"U"},
              {{"Xz", Component::kXZperp}, {"Xy", Component::kXYperp}}};
    case GraphId::kC:
      return {{{"U1", {}},
               {"U2", {}},
               {"U3", {}},
               {"Y", {"U1", "U2"}},
               {"Z", {"U1", "U3"}},
               {"V", {"U2", "U3"}},
               {"Xz", {"Y"}},
               {"Xy", {"Z"}},
               {"Xv", {"V"}}},
              {"U1", "U2", "U3", "V"},
              {{"Xz", Component::kXZperp},
               {"Xy", Component::kXYperp},
               {"Xv", Component::kXV}}};
    case GraphId::kD:
      return {{{"U", {}}, {"Y", {"U"}}, {"Z", {"U"}}, {"Xz", {"Y"}}, {"Xyz", {"Y", "Z"}}},
              {"U"},
              {{"Xz", Component::kXZperp}, {"Xyz", Component::kXYandZ}}};
  }
  throw SpecError("unknown graph id");
}

GraphTemplate Assemble(GraphId id, const Blueprint& bp,
                       const std::vector<std::vector<double>>& cpts) {
  GraphTemplate t{id, Cbn(), bp.latents, bp.labels, {}};
  for (std::size_t i = 0; i < bp.nodes.size(); ++i) {
    t.net.AddNode({bp.nodes[i].first, 2}, bp.nodes[i].second, cpts[i]);
  }
  for (const Variable& v : t.net.nodes()) {
    if (std::find(bp.latents.begin(), bp.latents.end(), v.name) == bp.latents.end()) {
      t.observed.push_back(v.name);
    }
  }
  return t;
}

}  // namespace

const char* ComponentName(Component c) {
  switch (c) {
    case Component::kXZperp: return "XZperp";
    case Component::kXYperp: return "XYperp";
    case Component::kXYandZ: return "XYandZ";
    case Component::kXV: return "XV";
  }
  return "?";
}

const char* GraphName(GraphId id) {
  switch (id) {
    case GraphId::kA: return "A";
    case GraphId::kB: return "B";
    case GraphId::kC: return "C";
    case GraphId::kD: return "D";
  }
  return "?";
}

GraphId ParseGraphId(const std::string& name) {
  if (name == "A" || name == "a") return GraphId::kA;
  if (name == "B" || name == "b") return GraphId::kB;
  if (name == "C" || name == "c") return GraphId::kC;
  if (name == "D" || name == "d") return GraphId::kD;
  throw SpecError("unknown graph id '" + name + "' (expected A, B, C or D)");
}

GraphTemplate MakeTemplate(GraphId id, const TemplateParams& p) {
  CheckProbability(p.p_z0_given_y0, "p_z0_given_y0");
  CheckProbability(p.p_z0_given_y1, "p_z0_given_y1");
  CheckProbability(p.p_y1, "p_y1");
  CheckProbability(p.covariate_noise, "covariate_noise");
  const std::vector<double> z_given_parent = {p.p_z0_given_y0, 1.0 - p.p_z0_given_y0,
                                              p.p_z0_given_y1, 1.0 - p.p_z0_given_y1};
  const std::vector<double> copy = NoisyCopy(p.covariate_noise);
  const std::vector<double> identity = {1.0, 0.0, 0.0, 1.0};
  std::vector<std::vector<double>> cpts;
  switch (id) {
    case GraphId::kA:
      cpts = {Bernoulli(p.p_y1), identity, z_given_parent, copy, copy};
      break;
    case GraphId::kB: {
      std::vector<double> y;
      for (int x = 0; x < 2; ++x) {
        for (int u = 0; u < 2; ++u) {
          const double p1 = Sigmoid(p.causal_weight * Sign(x) + p.confounder_weight * Sign(u));
          y.push_back(1.0 - p1);
          y.push_back(p1);
        }
      }
      cpts = {Bernoulli(0.5), Bernoulli(0.5), y, z_given_parent, copy};
      break;
    }
    case GraphId::kC: {
      // Y and Z share U1 with the same sign; V loads on U2 with the opposite
      // sign so that V=0 goes with Y=1.
      auto pair_table = [](double wa, double wb) {
        std::vector<double> rows;
        for (int a = 0; a < 2; ++a) {
          for (int b = 0; b < 2; ++b) {
            const double p1 = Sigmoid(wa * Sign(a) + wb * Sign(b));
            rows.push_back(1.0 - p1);
            rows.push_back(p1);
          }
        }
        return rows;
      };
      cpts = {Bernoulli(0.5),
              Bernoulli(0.5),
              Bernoulli(0.5),
              pair_table(p.u1_weight, p.u2_weight),
              pair_table(p.u1_weight, p.u3_weight),
              pair_table(-p.u2_weight, p.u3_weight),
              copy,
              copy,
              copy};
      break;
    }
    case GraphId::kD: {
      std::vector<double> entangled;
      for (int y = 0; y < 2; ++y) {
        for (int z = 0; z < 2; ++z) {
          const bool on = y == 1 || z == 1;
          const double p1 = on ? 1.0 - p.covariate_noise : p.covariate_noise;
          entangled.push_back(1.0 - p1);
          entangled.push_back(p1);
        }
      }
      cpts = {Bernoulli(p.p_y1), identity, z_given_parent, copy, entangled};
      break;
    }
  }
  return Assemble(id, MakeBlueprint(id), cpts);
}

std::vector<double> RandomCptRows(std::size_t rows, int cardinality, Rng& rng) {
  std::vector<double> out;
  out.reserve(rows * static_cast<std::size_t>(cardinality));
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<double> row(static_cast<std::size_t>(cardinality));
    double sum = 0.0;
    for (double& x : row) {
      x = 0.1 + 0.8 * rng.Uniform();
      sum += x;
    }
    for (double& x : row) out.push_back(x / sum);
  }
  return out;
}

GraphTemplate RandomTemplate(GraphId id, Rng& rng) {
  const Blueprint bp = MakeBlueprint(id);
  std::vector<std::vector<double>> cpts;
  for (const auto& node : bp.nodes) {
    cpts.push_back(RandomCptRows(std::size_t{1} << node.second.size(), 2, rng));
  }
  return Assemble(id, bp, cpts);
}

JointTable ObservedJoint(const GraphTemplate& t) {
  return Marginalize(Joint(t.net), t.observed);
}

Dag ObservedSkeletonWithoutConfounding(const GraphTemplate& t) {
  std::vector<Variable> nodes;
  for (const std::string& name : t.observed) nodes.push_back({name, 2});
  std::vector<Edge> edges;
  for (const Edge& e : t.net.dag().edges()) {
    const bool latent_end =
        std::find(t.latents.begin(), t.latents.end(), e.from) != t.latents.end() ||
        std::find(t.latents.begin(), t.latents.end(), e.to) != t.latents.end();
    if (!latent_end) edges.push_back(e);
  }
  return Dag(std::move(nodes), std::move(edges));
}

}  // namespace jbal
