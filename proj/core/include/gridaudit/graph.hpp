// Copyright 2026 The GridAudit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GRIDAUDIT_GRAPH_HPP_
#define GRIDAUDIT_GRAPH_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gridaudit/formula.hpp"
#include "gridaudit/model.hpp"

namespace gridaudit {

using NodeId = std::size_t;

struct GraphNode {
  CellAddress address;
  // Set for references that cannot resolve (unknown sheet or coordinates
  // outside the grid). `label` holds the reference as written.
  bool is_ref_error = false;
  std::string label;
  bool is_formula = false;
  std::vector<NodeId> precedents;  // sorted, unique
  std::vector<NodeId> dependents;  // sorted, unique

  std::size_t precedent_count() const { return precedents.size(); }
  std::size_t dependent_count() const { return dependents.size(); }
};

struct GraphOptions {
  std::size_t max_edges = 1'000'000;
};

// Precedent -> dependent graph over every defined or referenced cell.
// Ranges are expanded to one edge per covered cell.
class DepGraph {
 public:
  DepGraph() = default;

  const std::vector<GraphNode>& nodes() const { return nodes_; }
  const GraphNode& node(NodeId id) const { return nodes_[id]; }
  std::optional<NodeId> find(const CellAddress& addr) const;
  std::size_t edge_count() const { return edge_count_; }
  std::size_t formula_count() const;

  // Deterministic (from, to) pairs ordered by location.
  std::vector<std::pair<NodeId, NodeId>> edges() const;

  // Strongly connected components, each listed precedents-first.
  std::vector<std::vector<NodeId>> components() const;
  // Ids of nodes that sit on a reference cycle.
  std::vector<bool> on_cycle() const;

  // Formula cells in the precedent closure of `id`, itself included.
  std::size_t closure_size(NodeId id) const;
  std::vector<NodeId> precedent_closure(NodeId id) const;

  bool less(NodeId a, NodeId b) const;
  std::string display(NodeId id) const;

 private:
  friend DepGraph build_graph(const Workbook&, const FormulaIndex&, GraphOptions);

  NodeId intern(const CellAddress& addr);
  NodeId intern_error(const std::string& label, const CellAddress& addr);

  std::vector<GraphNode> nodes_;
  std::map<CellAddress, NodeId> by_address_;
  std::map<std::string, NodeId> errors_;
  std::vector<std::string> sheet_order_;
  std::size_t edge_count_ = 0;
};

// Throws Error(kExplosionCap) once the expanded edge count passes the cap.
DepGraph build_graph(const Workbook& wb, const FormulaIndex& index,
                     GraphOptions options = {});
DepGraph build_graph(const Workbook& wb);

struct OutputClosure {
  CellAddress output;
  std::size_t closure_size = 0;  // L
};

struct ChainStats {
  std::size_t longest_chain_length = 0;
  std::vector<OutputClosure> closures;
  std::vector<std::vector<CellAddress>> cycles;
};

ChainStats chain_stats(const DepGraph& g, const std::vector<CellAddress>& outputs);

// Formula cells nothing refers to that are not declared outputs, in
// workbook order.
std::vector<CellAddress> orphan_formulas(const DepGraph& g,
                                         const std::vector<CellAddress>& outputs);

// "<from>\t<to>\n" per edge, deterministic order.
std::string graph_dump(const DepGraph& g);

}  // namespace gridaudit

#endif  // GRIDAUDIT_GRAPH_HPP_
