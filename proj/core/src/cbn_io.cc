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

#include <charconv>
#include <cstdio>
#include <map>
#include <sstream>

#include "jbal/cbn.h"
#include "jbal/errors.h"

namespace jbal {
namespace {

std::string Trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

double ParseNumber(const std::string& token, std::size_t line_no) {
  double value = 0.0;
  const auto result = std::from_chars(token.data(), token.data() + token.size(), value);
  if (result.ec != std::errc() || result.ptr != token.data() + token.size()) {
    throw ParseError("graph line " + std::to_string(line_no) + ": bad number '" + token + "'");
  }
  return value;
}

}  // namespace

std::string SerializeCbn(const Cbn& net) {
  std::ostringstream out;
  out << "[nodes]\n";
  for (const Variable& v : net.nodes()) out << v.name << ' ' << v.cardinality << '\n';
  out << "\n[edges]\n";
  for (const Edge& e : net.dag().edges()) out << e.from << " -> " << e.to << '\n';
  char buffer[32];
  for (std::size_t v = 0; v < net.size(); ++v) {
    const Variable& node = net.nodes()[v];
    out << "\n[cpt " << node.name << "]\n";
    const auto& parents = net.dag().Parents(v);
    const std::size_t card = static_cast<std::size_t>(node.cardinality);
    const std::size_t rows = net.Cpt(v).size() / card;
    std::vector<int> pstate(parents.size(), 0);
    for (std::size_t r = 0; r < rows; ++r) {
      std::size_t rest = r;
      for (std::size_t k = parents.size(); k-- > 0;) {
        const std::size_t c = static_cast<std::size_t>(net.nodes()[parents[k]].cardinality);
        pstate[k] = static_cast<int>(rest % c);
        rest /= c;
      }
      for (std::size_t k = 0; k < pstate.size(); ++k) out << (k ? " " : "") << pstate[k];
      out << (pstate.empty() ? ":" : " :");
      for (std::size_t k = 0; k < card; ++k) {
        std::snprintf(buffer, sizeof(buffer), "%.17g", net.Cpt(v)[r * card + k]);
        out << ' ' << buffer;
      }
      out << '\n';
    }
  }
  return out.str();
}

Cbn ParseCbn(std::string_view text) {
  std::vector<Variable> nodes;
  std::vector<Edge> edges;
  // Rows per node keyed by parent-state tuple, filled in file order.
  std::map<std::string, std::map<std::vector<int>, std::vector<double>>> rows;
  std::string section;
  std::string cpt_node;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = Trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const std::string where = "graph line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(where + "unterminated section header");
      const std::string header = Trim(std::string_view(line).substr(1, line.size() - 2));
      if (header == "nodes" || header == "edges") {
        section = header;
      } else if (header.rfind("cpt ", 0) == 0) {
        section = "cpt";
        cpt_node = Trim(std::string_view(header).substr(4));
        if (rows.count(cpt_node)) throw ParseError(where + "duplicate table for '" + cpt_node + "'");
        rows[cpt_node];
      } else {
        throw ParseError(where + "unknown section '" + header + "'");
      }
      continue;
    }
    std::istringstream fields(line);
    if (section == "nodes") {
      Variable v;
      std::string extra;
      if (!(fields >> v.name >> v.cardinality) || (fields >> extra)) {
        throw ParseError(where + "expected '<name> <cardinality>'");
      }
      nodes.push_back(v);
    } else if (section == "edges") {
      Edge e;
      std::string arrow;
      std::string extra;
      if (!(fields >> e.from >> arrow >> e.to) || arrow != "->" || (fields >> extra)) {
        throw ParseError(where + "expected '<from> -> <to>'");
      }
      edges.push_back(e);
    } else if (section == "cpt") {
      const std::size_t colon = line.find(':');
      if (colon == std::string::npos) throw ParseError(where + "expected '<parent states> : <probs>'");
      std::vector<int> key;
      std::istringstream lhs(line.substr(0, colon));
      int s;
      while (lhs >> s) key.push_back(s);
      if (!lhs.eof()) throw ParseError(where + "bad parent state");
      std::vector<double> probs;
      std::istringstream rhs(line.substr(colon + 1));
      std::string token;
      while (rhs >> token) probs.push_back(ParseNumber(token, line_no));
      if (!rows[cpt_node].emplace(std::move(key), std::move(probs)).second) {
        throw ParseError(where + "duplicate row");
      }
    } else {
      throw ParseError(where + "content outside of a section");
    }
  }

  const Dag dag(nodes, edges);
  std::vector<std::vector<double>> cpts;
  for (std::size_t v = 0; v < dag.size(); ++v) {
    const Variable& node = dag.nodes()[v];
    const auto it = rows.find(node.name);
    if (it == rows.end()) throw ParseError("graph: no table for '" + node.name + "'");
    const auto& parents = dag.Parents(v);
    std::size_t expected = 1;
    for (std::size_t p : parents) expected *= static_cast<std::size_t>(dag.nodes()[p].cardinality);
    if (it->second.size() != expected) {
      throw ParseError("graph: table of '" + node.name + "' has " +
                       std::to_string(it->second.size()) + " rows, expected " +
                       std::to_string(expected));
    }
    std::vector<double> flat;
    // std::map orders keys lexicographically, which is the row-major order.
    for (const auto& [key, probs] : it->second) {
      if (key.size() != parents.size()) {
        throw ParseError("graph: row of '" + node.name + "' has wrong parent count");
      }
      for (std::size_t k = 0; k < key.size(); ++k) {
        if (key[k] < 0 || key[k] >= dag.nodes()[parents[k]].cardinality) {
          throw ParseError("graph: parent state out of range in table of '" + node.name + "'");
        }
      }
      flat.insert(flat.end(), probs.begin(), probs.end());
    }
    cpts.push_back(std::move(flat));
    rows.erase(it);
  }
  if (!rows.empty()) throw ParseError("graph: table for unknown node '" + rows.begin()->first + "'");
  return Cbn(dag, std::move(cpts));
}

}  // namespace jbal
