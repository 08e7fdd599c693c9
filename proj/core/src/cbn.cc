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

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <map>
#include <set>

#include "jbal/errors.h"
#include "jbal/rng.h"

namespace jbal {
namespace {

// Pairwise statements over every conditioning subset are enumerated only for
// small graphs; larger ones fall back to the local Markov statements.
constexpr std::size_t kMaxPairwiseNodes = 10;

std::vector<std::size_t> ResolveAll(const Dag& dag, const std::vector<std::string>& names) {
  std::vector<std::size_t> out;
  out.reserve(names.size());
  for (const std::string& name : names) out.push_back(dag.IndexOf(name));
  return out;
}

}  // namespace

Dag::Dag(std::vector<Variable> nodes, std::vector<Edge> edges) {
  ValidateVariables(nodes);
  const std::size_t n = nodes.size();
  auto find = [&](const std::string& name) {
    for (std::size_t i = 0; i < n; ++i) {
      if (nodes[i].name == name) return i;
    }
    throw EdgeError("edge endpoint '" + name + "' is not a node");
  };
  std::vector<std::vector<std::size_t>> parents(n);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const Edge& e : edges) {
    const std::size_t from = find(e.from);
    const std::size_t to = find(e.to);
    if (from == to) throw EdgeError("self loop on '" + e.from + "'");
    if (!seen.insert({from, to}).second) {
      throw EdgeError("duplicate edge " + e.from + " -> " + e.to);
    }
    parents[to].push_back(from);
  }
  // Kahn's algorithm, always taking the earliest ready node so the given
  // order survives where it is already topological.
  std::vector<std::size_t> pending(n);
  for (std::size_t i = 0; i < n; ++i) pending[i] = parents[i].size();
  std::vector<std::vector<std::size_t>> children(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p : parents[i]) children[p].push_back(i);
  }
  std::set<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (pending[i] == 0) ready.insert(i);
  }
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    const std::size_t next = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(next);
    for (std::size_t c : children[next]) {
      if (--pending[c] == 0) ready.insert(c);
    }
  }
  if (order.size() != n) throw EdgeError("graph has a directed cycle");

  std::vector<std::size_t> position(n);
  for (std::size_t i = 0; i < n; ++i) position[order[i]] = i;
  nodes_.resize(n);
  parents_.resize(n);
  children_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    nodes_[i] = nodes[order[i]];
    for (std::size_t p : parents[order[i]]) parents_[i].push_back(position[p]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p : parents_[i]) children_[p].push_back(i);
  }
}

std::vector<std::string> Dag::names() const {
  std::vector<std::string> out;
  for (const Variable& v : nodes_) out.push_back(v.name);
  return out;
}

std::vector<Edge> Dag::edges() const {
  std::vector<Edge> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    for (std::size_t p : parents_[i]) out.push_back({nodes_[p].name, nodes_[i].name});
  }
  return out;
}

std::size_t Dag::IndexOf(std::string_view name) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].name == name) return i;
  }
  throw NameError("unknown node '" + std::string(name) + "'");
}

bool Dag::Contains(std::string_view name) const {
  return std::any_of(nodes_.begin(), nodes_.end(),
                     [&](const Variable& v) { return v.name == name; });
}

bool Dag::HasEdge(std::string_view from, std::string_view to) const {
  if (!Contains(from) || !Contains(to)) return false;
  const auto& ps = parents_[IndexOf(to)];
  return std::find(ps.begin(), ps.end(), IndexOf(from)) != ps.end();
}

std::vector<std::string> Dag::ParentNames(std::string_view name) const {
  std::vector<std::string> out;
  for (std::size_t p : parents_[IndexOf(name)]) out.push_back(nodes_[p].name);
  return out;
}

std::vector<std::size_t> Dag::Descendants(std::size_t node) const {
  std::vector<bool> mark(nodes_.size(), false);
  std::vector<std::size_t> stack(children_[node].begin(), children_[node].end());
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    if (mark[v]) continue;
    mark[v] = true;
    stack.insert(stack.end(), children_[v].begin(), children_[v].end());
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < mark.size(); ++i) {
    if (mark[i]) out.push_back(i);
  }
  return out;
}

bool DSeparated(const Dag& dag, const std::vector<std::string>& a,
                const std::vector<std::string>& b, const std::vector<std::string>& given) {
  const std::size_t n = dag.size();
  const std::vector<std::size_t> ia = ResolveAll(dag, a);
  const std::vector<std::size_t> ib = ResolveAll(dag, b);
  const std::vector<std::size_t> ig = ResolveAll(dag, given);
  std::vector<int> role(n, 0);
  auto claim = [&](const std::vector<std::size_t>& set, int tag) {
    for (std::size_t v : set) {
      if (role[v] != 0) {
        throw ArgumentError("d-separation: node '" + dag.nodes()[v].name +
                            "' appears in more than one set");
      }
      role[v] = tag;
    }
  };
  claim(ia, 1);
  claim(ib, 2);
  claim(ig, 3);
  if (ia.empty() || ib.empty()) throw ArgumentError("d-separation: empty node set");

  std::vector<bool> observed(n, false);
  for (std::size_t v : ig) observed[v] = true;
  // Nodes that are observed or have an observed descendant.
  std::vector<bool> anc_observed(n, false);
  std::vector<std::size_t> stack(ig.begin(), ig.end());
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    if (anc_observed[v]) continue;
    anc_observed[v] = true;
    for (std::size_t p : dag.Parents(v)) stack.push_back(p);
  }

  // Reachability over (node, direction): up = arrived from a child,
  // down = arrived from a parent.
  enum Direction { kUp = 0, kDown = 1 };
  std::vector<std::array<bool, 2>> visited(n, {false, false});
  std::deque<std::pair<std::size_t, Direction>> queue;
  for (std::size_t v : ia) queue.emplace_back(v, kUp);
  while (!queue.empty()) {
    const auto [v, dir] = queue.front();
    queue.pop_front();
    if (visited[v][dir]) continue;
    visited[v][dir] = true;
    if (!observed[v] && role[v] == 2) return false;
    if (dir == kUp && !observed[v]) {
      for (std::size_t p : dag.Parents(v)) queue.emplace_back(p, kUp);
      for (std::size_t c : dag.Children(v)) queue.emplace_back(c, kDown);
    } else if (dir == kDown) {
      if (!observed[v]) {
        for (std::size_t c : dag.Children(v)) queue.emplace_back(c, kDown);
      }
      if (anc_observed[v]) {
        for (std::size_t p : dag.Parents(v)) queue.emplace_back(p, kUp);
      }
    }
  }
  return true;
}

Cbn::Cbn(Dag dag, std::vector<std::vector<double>> cpts) {
  if (cpts.size() != dag.size()) throw ArgumentError("Cbn: one table per node required");
  for (std::size_t i = 0; i < dag.size(); ++i) {
    std::vector<std::string> parents;
    for (std::size_t p : dag.Parents(i)) parents.push_back(dag.nodes()[p].name);
    AddNode(dag.nodes()[i], std::move(parents), std::move(cpts[i]));
  }
}

void Cbn::AddNode(Variable node, std::vector<std::string> parents, std::vector<double> cpt) {
  std::vector<Variable> nodes = dag_.nodes();
  nodes.push_back(node);
  std::vector<Edge> edges = dag_.edges();
  std::size_t rows = 1;
  for (const std::string& p : parents) {
    if (!dag_.Contains(p)) {
      throw NameError("parent '" + p + "' of '" + node.name + "' is not defined yet");
    }
    rows *= static_cast<std::size_t>(dag_.nodes()[dag_.IndexOf(p)].cardinality);
    edges.push_back({p, node.name});
  }
  Dag dag(std::move(nodes), std::move(edges));
  const std::size_t card = static_cast<std::size_t>(node.cardinality);
  if (cpt.size() != rows * card) {
    throw ArgumentError("table of '" + node.name + "' has " + std::to_string(cpt.size()) +
                        " entries, expected " + std::to_string(rows * card));
  }
  for (std::size_t r = 0; r < rows; ++r) {
    double sum = 0.0;
    for (std::size_t k = 0; k < card; ++k) {
      const double p = cpt[r * card + k];
      if (!(p >= 0.0) || !std::isfinite(p)) {
        throw ArgumentError("table of '" + node.name + "' has a negative entry");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowTolerance) {
      throw ArgumentError("row " + std::to_string(r) + " of '" + node.name +
                          "' does not sum to 1");
    }
  }
  // A new sink keeps its position at the end of the topological order.
  dag_ = std::move(dag);
  cpts_.push_back(std::move(cpt));
}

std::size_t Cbn::ParentRow(std::size_t node, std::span<const int> state) const {
  std::size_t row = 0;
  for (std::size_t p : dag_.Parents(node)) {
    row = row * static_cast<std::size_t>(dag_.nodes()[p].cardinality) +
          static_cast<std::size_t>(state[p]);
  }
  return row;
}

JointTable Joint(const Cbn& net) {
  const std::size_t cells = StateSpaceSize(net.nodes());
  std::vector<double> probs(cells);
  std::vector<int> state(net.size(), 0);
  JointTable shape = JointTable::Uniform(net.nodes());
  for (std::size_t cell = 0; cell < cells; ++cell) {
    shape.Decode(cell, state);
    double p = 1.0;
    for (std::size_t v = 0; v < net.size() && p > 0.0; ++v) {
      const std::size_t card = static_cast<std::size_t>(net.nodes()[v].cardinality);
      p *= net.Cpt(v)[net.ParentRow(v, state) * card + static_cast<std::size_t>(state[v])];
    }
    probs[cell] = p;
  }
  return JointTable::FromWeights(net.nodes(), std::move(probs));
}

Dag RemoveEdges(const Dag& dag, const std::vector<Edge>& edges) {
  std::vector<Edge> kept = dag.edges();
  for (const Edge& e : edges) {
    auto it = std::find(kept.begin(), kept.end(), e);
    if (it == kept.end()) throw EdgeError("no edge " + e.from + " -> " + e.to + " to remove");
    kept.erase(it);
  }
  return Dag(dag.nodes(), std::move(kept));
}

Cbn Mutilate(const Cbn& net, const GraphEdit& edit) {
  const Dag& dag = net.dag();
  std::map<std::size_t, std::set<std::size_t>> removed;
  for (const Edge& e : edit.removed_edges) {
    if (!dag.HasEdge(e.from, e.to)) {
      throw EdgeError("no edge " + e.from + " -> " + e.to + " to remove");
    }
    removed[dag.IndexOf(e.to)].insert(dag.IndexOf(e.from));
  }
  if (removed.empty()) return net;
  const JointTable joint = Joint(net);

  Cbn out;
  for (std::size_t v = 0; v < dag.size(); ++v) {
    const Variable& node = dag.nodes()[v];
    const auto& parents = dag.Parents(v);
    const auto it = removed.find(v);
    if (it == removed.end()) {
      std::vector<std::string> names;
      for (std::size_t p : parents) names.push_back(dag.nodes()[p].name);
      const auto cpt = net.Cpt(v);
      out.AddNode(node, std::move(names), std::vector<double>(cpt.begin(), cpt.end()));
      continue;
    }
    std::vector<std::size_t> kept;
    std::vector<std::string> kept_names;
    std::vector<std::string> dropped_names;
    for (std::size_t p : parents) {
      if (it->second.count(p)) {
        dropped_names.push_back(dag.nodes()[p].name);
      } else {
        kept.push_back(p);
        kept_names.push_back(dag.nodes()[p].name);
      }
    }
    const JointTable dropped = Marginalize(joint, dropped_names);
    // `dropped` lists variables in joint order, which is the topological
    // order; map each of its variables back to a node index.
    std::vector<std::size_t> dropped_nodes;
    for (const Variable& d : dropped.variables()) dropped_nodes.push_back(dag.IndexOf(d.name));

    std::size_t kept_rows = 1;
    for (std::size_t p : kept) kept_rows *= static_cast<std::size_t>(dag.nodes()[p].cardinality);
    const std::size_t card = static_cast<std::size_t>(node.cardinality);
    std::vector<double> cpt(kept_rows * card, 0.0);
    std::vector<int> state(dag.size(), 0);
    std::vector<int> kept_state(kept.size(), 0);
    std::vector<int> dropped_state(dropped_nodes.size(), 0);
    for (std::size_t kr = 0; kr < kept_rows; ++kr) {
      std::size_t rest = kr;
      for (std::size_t k = kept.size(); k-- > 0;) {
        const std::size_t c = static_cast<std::size_t>(dag.nodes()[kept[k]].cardinality);
        state[kept[k]] = static_cast<int>(rest % c);
        rest /= c;
      }
      for (std::size_t dcell = 0; dcell < dropped.size(); ++dcell) {
        dropped.Decode(dcell, dropped_state);
        for (std::size_t d = 0; d < dropped_nodes.size(); ++d) {
          state[dropped_nodes[d]] = dropped_state[d];
        }
        const double w = dropped.at(dcell);
        const std::size_t row = net.ParentRow(v, state);
        for (std::size_t k = 0; k < card; ++k) cpt[kr * card + k] += w * net.Cpt(v)[row * card + k];
      }
      double sum = 0.0;
      for (std::size_t k = 0; k < card; ++k) sum += cpt[kr * card + k];
      for (std::size_t k = 0; k < card; ++k) cpt[kr * card + k] /= sum;
    }
    out.AddNode(node, std::move(kept_names), std::move(cpt));
  }
  return out;
}

std::vector<IndependenceStatement> ImpliedIndependencies(const Dag& dag) {
  std::vector<IndependenceStatement> out;
  const std::size_t n = dag.size();
  const std::vector<std::string> names = dag.names();
  if (n <= kMaxPairwiseNodes) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        std::vector<std::size_t> rest;
        for (std::size_t k = 0; k < n; ++k) {
          if (k != i && k != j) rest.push_back(k);
        }
        for (std::size_t mask = 0; mask < (std::size_t{1} << rest.size()); ++mask) {
          std::vector<std::string> given;
          for (std::size_t k = 0; k < rest.size(); ++k) {
            if (mask & (std::size_t{1} << k)) given.push_back(names[rest[k]]);
          }
          if (DSeparated(dag, {names[i]}, {names[j]}, given)) {
            out.push_back({{names[i]}, {names[j]}, std::move(given)});
          }
        }
      }
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<bool> excluded(n, false);
    excluded[v] = true;
    for (std::size_t d : dag.Descendants(v)) excluded[d] = true;
    for (std::size_t p : dag.Parents(v)) excluded[p] = true;
    std::vector<std::string> others;
    for (std::size_t k = 0; k < n; ++k) {
      if (!excluded[k]) others.push_back(names[k]);
    }
    if (others.empty()) continue;
    std::vector<std::string> given;
    for (std::size_t p : dag.Parents(v)) given.push_back(names[p]);
    out.push_back({{names[v]}, std::move(others), std::move(given)});
  }
  return out;
}

FactorizationReport FactorizesAccordingTo(const JointTable& table, const Dag& dag,
                                          double tol) {
  if (table.num_variables() != dag.size()) {
    throw NameError("table and graph have different variable sets");
  }
  for (const Variable& v : dag.nodes()) {
    if (!table.Contains(v.name)) {
      throw NameError("graph node '" + v.name + "' is not a table variable");
    }
    if (table.Cardinality(v.name) != v.cardinality) {
      throw NameError("cardinality of '" + v.name + "' differs between table and graph");
    }
  }
  FactorizationReport report;
  for (IndependenceStatement& s : ImpliedIndependencies(dag)) {
    ++report.statements_checked;
    const IndependenceReport r = IsIndependent(table, s.a, s.b, s.given, tol);
    if (!r.independent) {
      report.factorizes = false;
      report.violations.push_back({std::move(s), r.max_gap});
    }
  }
  std::stable_sort(report.violations.begin(), report.violations.end(),
                   [](const auto& l, const auto& r) { return l.gap > r.gap; });
  return report;
}

SampleBatch SampleCbn(const Cbn& net, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ArgumentError("SampleCbn: n must be at least 1");
  const std::size_t width = net.size();
  std::vector<int> states(n * width);
  Rng rng(seed);
  for (std::size_t r = 0; r < n; ++r) {
    std::span<int> row(states.data() + r * width, width);
    for (std::size_t v = 0; v < width; ++v) {
      const std::size_t card = static_cast<std::size_t>(net.nodes()[v].cardinality);
      const auto cpt = net.Cpt(v).subspan(net.ParentRow(v, row) * card, card);
      row[v] = static_cast<int>(rng.Categorical(cpt));
    }
  }
  return SampleBatch(net.nodes(), std::move(states));
}

}  // namespace jbal
