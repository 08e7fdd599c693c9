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

#ifndef JBAL_CBN_H_
#define JBAL_CBN_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jbal/joint_table.h"
#include "jbal/sample_batch.h"

namespace jbal {

struct Edge {
  std::string from;
  std::string to;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Directed acyclic graph over named discrete variables. Node order is a
// topological order; the parent order of each node is significant (it fixes
// the CPT layout of a Cbn built on this skeleton).
class Dag {
 public:
  Dag() = default;
  // Nodes may be listed in any order; they are stored topologically sorted
  // (ties keep the given order). Throws EdgeError on cycles or unknown
  // endpoints.
  Dag(std::vector<Variable> nodes, std::vector<Edge> edges);

  const std::vector<Variable>& nodes() const { return nodes_; }
  std::vector<std::string> names() const;
  std::vector<Edge> edges() const;
  std::size_t size() const { return nodes_.size(); }
  std::size_t IndexOf(std::string_view name) const;
  bool Contains(std::string_view name) const;
  bool HasEdge(std::string_view from, std::string_view to) const;

  const std::vector<std::size_t>& Parents(std::size_t node) const { return parents_[node]; }
  const std::vector<std::size_t>& Children(std::size_t node) const { return children_[node]; }
  std::vector<std::string> ParentNames(std::string_view name) const;
  // Strict descendants.
  std::vector<std::size_t> Descendants(std::size_t node) const;

 private:
  std::vector<Variable> nodes_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::vector<std::size_t>> children_;
};

// True iff every node of `a` is d-separated from every node of `b` given
// `given`. The sets must be disjoint.
bool DSeparated(const Dag& dag, const std::vector<std::string>& a,
                const std::vector<std::string>& b,
                const std::vector<std::string>& given = {});

// Causal Bayesian network: a Dag plus one conditional table per node. The
// table of node v has one row per joint parent state (row-major over the
// parent order, first parent most significant) and Cardinality(v) entries
// per row.
class Cbn {
 public:
  static constexpr double kRowTolerance = 1e-12;

  Cbn() = default;
  // Builds from a skeleton and per-node tables given in skeleton node order.
  Cbn(Dag dag, std::vector<std::vector<double>> cpts);

  // Incremental construction; parents must already be present.
  void AddNode(Variable node, std::vector<std::string> parents, std::vector<double> cpt);

  const Dag& dag() const { return dag_; }
  const std::vector<Variable>& nodes() const { return dag_.nodes(); }
  std::size_t size() const { return dag_.size(); }
  std::span<const double> Cpt(std::size_t node) const { return cpts_[node]; }
  std::span<const double> Cpt(std::string_view name) const { return Cpt(dag_.IndexOf(name)); }
  // Row offset of a parent configuration, given the full node state vector.
  std::size_t ParentRow(std::size_t node, std::span<const int> state) const;

 private:
  Dag dag_;
  std::vector<std::vector<double>> cpts_;
};

struct GraphEdit {
  std::vector<Edge> removed_edges;
};

JointTable Joint(const Cbn& net);

// Removes the listed edges. Each affected node keeps a table over its
// remaining parents obtained by averaging the old rows over the removed
// parents under their joint marginal in `net`. Throws EdgeError when an edge
// is missing.
Cbn Mutilate(const Cbn& net, const GraphEdit& edit);

// Skeleton with the listed edges removed (no tables involved).
Dag RemoveEdges(const Dag& dag, const std::vector<Edge>& edges);

struct IndependenceStatement {
  std::vector<std::string> a;
  std::vector<std::string> b;
  std::vector<std::string> given;
};

struct FactorizationViolation {
  IndependenceStatement statement;
  double gap = 0.0;
};

struct FactorizationReport {
  bool factorizes = true;
  std::size_t statements_checked = 0;
  std::vector<FactorizationViolation> violations;
};

// Conditional independencies implied by d-separation in `dag`: every
// pairwise statement over all conditioning sets (graphs of at most 10 nodes) and the
// local Markov statement of every node.
std::vector<IndependenceStatement> ImpliedIndependencies(const Dag& dag);

// Checks every independence implied by `dag` against `table`. Variables of
// table and graph must coincide (NameError otherwise).
FactorizationReport FactorizesAccordingTo(const JointTable& table, const Dag& dag,
                                          double tol = kDefaultIndependenceTolerance);

// Ancestral sampling.
SampleBatch SampleCbn(const Cbn& net, std::size_t n, std::uint64_t seed);

// Text format with [nodes], [edges] and [cpt <node>] blocks.
std::string SerializeCbn(const Cbn& net);
Cbn ParseCbn(std::string_view text);

}  // namespace jbal

#endif  // JBAL_CBN_H_
