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

#include "jbal/cbn.h"

#include <set>

#include <gtest/gtest.h>

#include "jbal/errors.h"
#include "jbal/rng.h"
#include "jbal/sample_batch.h"
#include "jbal/templates.h"

namespace jbal {
namespace {

// Reference criterion: a and b are d-separated by c iff they are
// disconnected in the moral graph of the ancestral set of a, b, c after
// deleting c.
bool MoralSeparated(const Dag& dag, const std::vector<std::string>& a,
                    const std::vector<std::string>& b, const std::vector<std::string>& c) {
  const std::size_t n = dag.size();
  std::vector<bool> keep(n, false);
  std::vector<std::size_t> stack;
  for (const auto* set : {&a, &b, &c}) {
    for (const auto& name : *set) stack.push_back(dag.IndexOf(name));
  }
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    if (keep[v]) continue;
    keep[v] = true;
    for (std::size_t p : dag.Parents(v)) stack.push_back(p);
  }
  std::vector<std::set<std::size_t>> adj(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (!keep[v]) continue;
    const auto& ps = dag.Parents(v);
    for (std::size_t p : ps) {
      adj[v].insert(p);
      adj[p].insert(v);
      for (std::size_t q : ps) {
        if (q != p) adj[p].insert(q);
      }
    }
  }
  std::vector<bool> blocked(n, false);
  for (const auto& name : c) blocked[dag.IndexOf(name)] = true;
  std::vector<bool> seen(n, false);
  for (const auto& name : a) stack.push_back(dag.IndexOf(name));
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    if (seen[v] || blocked[v] || !keep[v]) continue;
    seen[v] = true;
    for (std::size_t w : adj[v]) stack.push_back(w);
  }
  for (const auto& name : b) {
    if (seen[dag.IndexOf(name)]) return false;
  }
  return true;
}

std::vector<Variable> Binary(std::initializer_list<const char*> names) {
  std::vector<Variable> out;
  for (const char* n : names) out.push_back({n, 2});
  return out;
}

TEST(DagTest, TopologicalOrderAndErrors) {
  const Dag d(Binary({"C", "B", "A"}), {{"A", "B"}, {"B", "C"}});
  EXPECT_EQ(d.names(), (std::vector<std::string>{"A", "B", "C"}));
  EXPECT_THROW(Dag(Binary({"A", "B"}), {{"A", "B"}, {"B", "A"}}), EdgeError);
  EXPECT_THROW(Dag(Binary({"A"}), {{"A", "A"}}), EdgeError);
  EXPECT_THROW(Dag(Binary({"A"}), {{"A", "Q"}}), EdgeError);
}

TEST(DSeparationTest, Collider) {
  const Dag d(Binary({"X", "Y", "Z"}), {{"X", "Y"}, {"Z", "Y"}});
  EXPECT_TRUE(DSeparated(d, {"X"}, {"Z"}));
  EXPECT_FALSE(DSeparated(d, {"X"}, {"Z"}, {"Y"}));
}

TEST(DSeparationTest, ColliderDescendantOpensPath) {
  const Dag d(Binary({"X", "Y", "Z", "W"}), {{"X", "Y"}, {"Z", "Y"}, {"Y", "W"}});
  EXPECT_FALSE(DSeparated(d, {"X"}, {"Z"}, {"W"}));
}

TEST(DSeparationTest, ReferenceGraphs) {
  const GraphTemplate a = MakeTemplate(GraphId::kA);
  EXPECT_TRUE(DSeparated(a.net.dag(), {"Xz"}, {"Z"}, {"Y"}));
  EXPECT_FALSE(DSeparated(a.net.dag(), {"Xz"}, {"Z"}));
  const GraphTemplate b = MakeTemplate(GraphId::kB);
  EXPECT_TRUE(DSeparated(b.net.dag(), {"Xz"}, {"Z"}));
  EXPECT_FALSE(DSeparated(b.net.dag(), {"Xz"}, {"Z"}, {"Y"}));
}

TEST(DSeparationTest, Errors) {
  const Dag d(Binary({"X", "Y"}), {{"X", "Y"}});
  EXPECT_THROW(DSeparated(d, {"X"}, {"Q"}), NameError);
  EXPECT_THROW(DSeparated(d, {"X"}, {"X"}), ArgumentError);
}

TEST(DSeparationTest, AgreesWithMoralGraphOnRandomDags) {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + static_cast<int>(rng.UniformInt(4));
    std::vector<Variable> nodes;
    for (int i = 0; i < n; ++i) nodes.push_back({"N" + std::to_string(i), 2});
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng.Bernoulli(0.4)) edges.push_back({nodes[i].name, nodes[j].name});
    const Dag d(nodes, edges);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        for (std::uint64_t mask = 0; mask < (1u << n); ++mask) {
          if ((mask >> i) & 1 || (mask >> j) & 1) continue;
          std::vector<std::string> given;
          for (int k = 0; k < n; ++k)
            if ((mask >> k) & 1) given.push_back(nodes[k].name);
          ASSERT_EQ(DSeparated(d, {nodes[i].name}, {nodes[j].name}, given),
                    MoralSeparated(d, {nodes[i].name}, {nodes[j].name}, given));
        }
      }
    }
  }
}

TEST(CbnTest, SingleNode) {
  Cbn net;
  net.AddNode({"A", 2}, {}, {0.3, 0.7});
  const JointTable j = Joint(net);
  EXPECT_DOUBLE_EQ(j.at(0), 0.3);
  EXPECT_DOUBLE_EQ(j.at(1), 0.7);
}

TEST(CbnTest, DeterministicCopies) {
  Cbn net;
  net.AddNode({"U", 2}, {}, {0.5, 0.5});
  net.AddNode({"Y", 2}, {"U"}, {1, 0, 0, 1});
  net.AddNode({"Z", 2}, {"U"}, {1, 0, 0, 1});
  const JointTable yz = Marginalize(Joint(net), {"Y", "Z"});
  EXPECT_DOUBLE_EQ(yz.Prob({0, 0}) + yz.Prob({1, 1}), 1.0);
  const SampleBatch b = SampleCbn(net, 100, 1);
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_EQ(b.At(i, 1), b.At(i, 2));
}

TEST(CbnTest, RejectsBadTables) {
  Cbn net;
  net.AddNode({"A", 2}, {}, {0.5, 0.5});
  EXPECT_THROW(net.AddNode({"B", 2}, {"A"}, {0.5, 0.5}), ArgumentError);
  EXPECT_THROW(net.AddNode({"B", 2}, {"A"}, {0.5, 0.4, 0.5, 0.5}), ArgumentError);
  EXPECT_THROW(net.AddNode({"B", 2}, {"Q"}, {0.5, 0.5}), NameError);
}

TEST(CbnTest, JointMatchesSampling) {
  Rng rng(3);
  const GraphTemplate t = RandomTemplate(GraphId::kA, rng);
  const JointTable exact = Joint(t.net);
  const JointTable emp = Empirical(SampleCbn(t.net, 1000000, 9));
  for (std::size_t i = 0; i < exact.size(); ++i) EXPECT_NEAR(emp.at(i), exact.at(i), 0.005);
}

TEST(CbnTest, SamplingDeterministic) {
  const GraphTemplate t = MakeTemplate(GraphId::kA);
  const SampleBatch a = SampleCbn(t.net, 500, 4);
  const SampleBatch b = SampleCbn(t.net, 500, 4);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t v = 0; v < a.num_variables(); ++v) ASSERT_EQ(a.At(i, v), b.At(i, v));
}

TEST(CbnTest, ConfoundedTemplateFrequencies) {
  const GraphTemplate t = MakeTemplate(GraphId::kA);
  const JointTable yz = Marginalize(Empirical(SampleCbn(t.net, 100000, 8)), {"Y", "Z"});
  const double z0_given_y0 = yz.Prob({0, 0}) / (yz.Prob({0, 0}) + yz.Prob({0, 1}));
  EXPECT_NEAR(z0_given_y0, 0.95, 0.01);
}

TEST(MutilateTest, RemovedParentAveragedOut) {
  const GraphTemplate t = MakeTemplate(GraphId::kA);
  const Cbn m = Mutilate(t.net, {{{"U", "Z"}}});
  EXPECT_FALSE(m.dag().HasEdge("U", "Z"));
  EXPECT_TRUE(m.dag().HasEdge("U", "Y"));
  const JointTable pz = Marginalize(Joint(t.net), {"Z"});
  const auto cpt = m.Cpt("Z");
  ASSERT_EQ(cpt.size(), 2u);
  EXPECT_NEAR(cpt[0], pz.at(0), 1e-15);
  EXPECT_EQ(m.dag().names(), t.net.dag().names());
}

TEST(MutilateTest, EmptyEditAndMissingEdge) {
  const GraphTemplate t = MakeTemplate(GraphId::kA);
  const Cbn same = Mutilate(t.net, {});
  const JointTable a = Joint(t.net), b = Joint(same);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.at(i), b.at(i));
  EXPECT_THROW(Mutilate(t.net, {{{"Y", "U"}}}), EdgeError);
}

TEST(MutilateTest, CuttingConfounderIndependence) {
  const GraphTemplate t = MakeTemplate(GraphId::kA);
  const Cbn m = Mutilate(t.net, {{{"U", "Y"}, {"U", "Z"}}});
  EXPECT_TRUE(IsIndependent(Joint(m), {"Y"}, {"Z"}).independent);
}

TEST(FactorizationTest, JointFactorizesOnOwnSkeleton) {
  Rng rng(5);
  for (GraphId id : {GraphId::kA, GraphId::kB, GraphId::kC, GraphId::kD}) {
    const GraphTemplate t = RandomTemplate(id, rng);
    const FactorizationReport r = FactorizesAccordingTo(Joint(t.net), t.net.dag());
    EXPECT_TRUE(r.factorizes) << GraphName(id);
    EXPECT_GT(r.statements_checked, 0u);
  }
}

TEST(FactorizationTest, DetectsMissingEdge) {
  Cbn net;
  net.AddNode({"A", 2}, {}, {0.4, 0.6});
  net.AddNode({"B", 2}, {"A"}, {0.9, 0.1, 0.2, 0.8});
  const Dag empty(net.nodes(), {});
  const FactorizationReport r = FactorizesAccordingTo(Joint(net), empty);
  EXPECT_FALSE(r.factorizes);
  ASSERT_FALSE(r.violations.empty());
  // |P(A=0,B=0) - P(A=0)P(B=0)| = |0.36 - 0.4 * 0.48|
  EXPECT_NEAR(r.violations.front().gap, 0.36 - 0.4 * 0.48, 1e-15);
}

TEST(FactorizationTest, VariableMismatch) {
  Cbn net;
  net.AddNode({"A", 2}, {}, {0.4, 0.6});
  const Dag other(Binary({"B"}), {});
  EXPECT_THROW(FactorizesAccordingTo(Joint(net), other), NameError);
}

TEST(CbnIoTest, RoundTrip) {
  Rng rng(6);
  const GraphTemplate t = RandomTemplate(GraphId::kC, rng);
  const Cbn back = ParseCbn(SerializeCbn(t.net));
  EXPECT_EQ(back.dag().names(), t.net.dag().names());
  EXPECT_EQ(back.dag().edges(), t.net.dag().edges());
  for (std::size_t v = 0; v < t.net.size(); ++v) {
    const auto a = t.net.Cpt(v);
    const auto b = back.Cpt(v);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k], b[k]);
  }
  EXPECT_EQ(SerializeCbn(back), SerializeCbn(t.net));
  EXPECT_THROW(ParseCbn("[nodes]\nA 2\n[edges]\nA -> B\n"), EdgeError);
}

}  // namespace
}  // namespace jbal
