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

#include "gridaudit/graph.hpp"

#include <algorithm>
#include <set>

#include "gridaudit/error.hpp"

namespace gridaudit {

std::optional<NodeId> DepGraph::find(const CellAddress& addr) const {
  auto it = by_address_.find(addr);
  if (it == by_address_.end()) return std::nullopt;
  return it->second;
}

std::size_t DepGraph::formula_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const auto& n) { return n.is_formula; }));
}

NodeId DepGraph::intern(const CellAddress& addr) {
  auto [it, inserted] = by_address_.emplace(addr, nodes_.size());
  if (inserted) {
    GraphNode n;
    n.address = addr;
    nodes_.push_back(std::move(n));
  }
  return it->second;
}

NodeId DepGraph::intern_error(const std::string& label, const CellAddress& addr) {
  auto [it, inserted] = errors_.emplace(label, nodes_.size());
  if (inserted) {
    GraphNode n;
    n.address = addr;
    n.is_ref_error = true;
    n.label = label;
    nodes_.push_back(std::move(n));
  }
  return it->second;
}

bool DepGraph::less(NodeId a, NodeId b) const {
  const auto& na = nodes_[a];
  const auto& nb = nodes_[b];
  if (na.is_ref_error != nb.is_ref_error) return nb.is_ref_error;
  if (na.is_ref_error) return na.label < nb.label;
  auto rank = [&](const std::string& s) {
    auto it = std::find(sheet_order_.begin(), sheet_order_.end(), s);
    return it - sheet_order_.begin();
  };
  const auto ra = rank(na.address.sheet);
  const auto rb = rank(nb.address.sheet);
  if (ra != rb) return ra < rb;
  if (na.address.sheet != nb.address.sheet) return na.address.sheet < nb.address.sheet;
  return na.address.pos() < nb.address.pos();
}

std::string DepGraph::display(NodeId id) const {
  const auto& n = nodes_[id];
  return n.is_ref_error ? "#REF!(" + n.label + ")" : to_a1(n.address);
}

std::vector<std::pair<NodeId, NodeId>> DepGraph::edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  out.reserve(edge_count_);
  for (NodeId to = 0; to < nodes_.size(); ++to) {
    for (NodeId from : nodes_[to].precedents) out.emplace_back(from, to);
  }
  std::sort(out.begin(), out.end(), [&](const auto& x, const auto& y) {
    if (x.first != y.first) return less(x.first, y.first);
    return less(x.second, y.second);
  });
  return out;
}

// Iterative Tarjan. Components come out dependents-first; reversed before
// returning so callers can evaluate in order.
std::vector<std::vector<NodeId>> DepGraph::components() const {
  const std::size_t n = nodes_.size();
  constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, kUnvisited);
  std::vector<std::size_t> low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<NodeId> stack;
  std::vector<std::vector<NodeId>> out;
  std::size_t counter = 0;

  struct Frame {
    NodeId v;
    std::size_t next_edge;
  };
  std::vector<Frame> call;

  for (NodeId root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    call.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      const auto& succ = nodes_[f.v].dependents;
      if (f.next_edge < succ.size()) {
        const NodeId w = succ[f.next_edge++];
        if (index[w] == kUnvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      const NodeId v = f.v;
      call.pop_back();
      if (!call.empty()) {
        low[call.back().v] = std::min(low[call.back().v], low[v]);
      }
      if (low[v] == index[v]) {
        std::vector<NodeId> comp;
        NodeId w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end(), [&](NodeId a, NodeId b) { return less(a, b); });
        out.push_back(std::move(comp));
      }
    }
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<bool> DepGraph::on_cycle() const {
  std::vector<bool> out(nodes_.size(), false);
  for (const auto& comp : components()) {
    if (comp.size() > 1) {
      for (NodeId id : comp) out[id] = true;
    } else {
      const NodeId id = comp.front();
      const auto& preds = nodes_[id].precedents;
      if (std::binary_search(preds.begin(), preds.end(), id)) out[id] = true;
    }
  }
  return out;
}

std::vector<NodeId> DepGraph::precedent_closure(NodeId id) const {
  std::vector<bool> seen(nodes_.size(), false);
  std::vector<NodeId> todo{id};
  std::vector<NodeId> out;
  seen[id] = true;
  while (!todo.empty()) {
    const NodeId v = todo.back();
    todo.pop_back();
    out.push_back(v);
    for (NodeId p : nodes_[v].precedents) {
      if (!seen[p]) {
        seen[p] = true;
        todo.push_back(p);
      }
    }
  }
  return out;
}

std::size_t DepGraph::closure_size(NodeId id) const {
  std::size_t count = 0;
  for (NodeId v : precedent_closure(id)) count += nodes_[v].is_formula ? 1 : 0;
  return count;
}

DepGraph build_graph(const Workbook& wb, const FormulaIndex& index, GraphOptions options) {
  DepGraph g;
  for (const auto& s : wb.sheets) g.sheet_order_.push_back(s.name);
  for (const auto& sheet : wb.sheets) {
    for (const auto& [pos, cell] : sheet.cells) {
      const NodeId id = g.intern({sheet.name, pos.row, pos.col});
      g.nodes_[id].is_formula = cell.is_formula();
    }
  }

  for (const auto& pf : index.all()) {
    const NodeId to = *g.find(pf.host);
    std::vector<NodeId> preds;
    for_each_reference(pf.ast.root, [&](const Expr& r) {
      const bool range = r.kind == Expr::Kind::kRangeRef;
      const RefTarget& a = r.ref;
      const RefTarget& b = range ? r.ref2 : r.ref;
      const bool sheet_ok = wb.find_sheet(a.sheet) != nullptr;
      if (!sheet_ok || !a.in_bounds() || !b.in_bounds()) {
        std::string label = quote_sheet(a.sheet) + "!" + column_letters(a.col) +
                            std::to_string(a.row);
        if (range) label += ":" + column_letters(b.col) + std::to_string(b.row);
        preds.push_back(g.intern_error(label, a.address()));
        return;
      }
      const std::size_t cells = static_cast<std::size_t>(b.row - a.row + 1) *
                                static_cast<std::size_t>(b.col - a.col + 1);
      if (g.edge_count_ + preds.size() + cells > options.max_edges) {
        throw Error(ErrorCode::kExplosionCap,
                    to_a1(pf.host) + ": expanding references exceeds " +
                        std::to_string(options.max_edges) + " edges");
      }
      for (auto row = a.row; row <= b.row; ++row) {
        for (auto col = a.col; col <= b.col; ++col) {
          preds.push_back(g.intern({a.sheet, row, col}));
        }
      }
    });
    std::sort(preds.begin(), preds.end());
    preds.erase(std::unique(preds.begin(), preds.end()), preds.end());
    g.edge_count_ += preds.size();
    g.nodes_[to].precedents = std::move(preds);
  }
  for (NodeId to = 0; to < g.nodes_.size(); ++to) {
    for (NodeId from : g.nodes_[to].precedents) g.nodes_[from].dependents.push_back(to);
  }
  for (auto& n : g.nodes_) {
    std::sort(n.dependents.begin(), n.dependents.end());
  }
  return g;
}

DepGraph build_graph(const Workbook& wb) { return build_graph(wb, FormulaIndex(wb)); }

ChainStats chain_stats(const DepGraph& g, const std::vector<CellAddress>& outputs) {
  ChainStats stats;
  const auto comps = g.components();
  std::vector<std::size_t> comp_of(g.nodes().size(), 0);
  for (std::size_t c = 0; c < comps.size(); ++c) {
    for (NodeId id : comps[c]) comp_of[id] = c;
  }

  // Longest path over the condensation, weighting each component by the
  // formula cells it holds. Components are already precedents-first.
  std::vector<std::size_t> best(comps.size(), 0);
  for (std::size_t c = 0; c < comps.size(); ++c) {
    std::size_t weight = 0;
    std::size_t incoming = 0;
    for (NodeId id : comps[c]) {
      const auto& node = g.node(id);
      weight += node.is_formula ? 1 : 0;
      for (NodeId p : node.precedents) {
        if (comp_of[p] != c) incoming = std::max(incoming, best[comp_of[p]]);
      }
    }
    best[c] = incoming + weight;
    stats.longest_chain_length = std::max(stats.longest_chain_length, best[c]);
  }

  const auto cyc = g.on_cycle();
  for (const auto& comp : comps) {
    if (!cyc[comp.front()]) continue;
    std::vector<CellAddress> cycle;
    for (NodeId id : comp) cycle.push_back(g.node(id).address);
    stats.cycles.push_back(std::move(cycle));
  }

  for (const auto& out : outputs) {
    OutputClosure oc{out, 0};
    if (auto id = g.find(out)) oc.closure_size = g.closure_size(*id);
    stats.closures.push_back(std::move(oc));
  }
  return stats;
}

std::vector<CellAddress> orphan_formulas(const DepGraph& g,
                                         const std::vector<CellAddress>& outputs) {
  const std::set<CellAddress> declared(outputs.begin(), outputs.end());
  std::vector<NodeId> ids;
  for (NodeId id = 0; id < g.nodes().size(); ++id) {
    const auto& n = g.node(id);
    if (n.is_formula && n.dependent_count() == 0 && !declared.count(n.address)) {
      ids.push_back(id);
    }
  }
  std::sort(ids.begin(), ids.end(), [&](NodeId a, NodeId b) { return g.less(a, b); });
  std::vector<CellAddress> out;
  for (NodeId id : ids) out.push_back(g.node(id).address);
  return out;
}

std::string graph_dump(const DepGraph& g) {
  std::string out;
  for (const auto& [from, to] : g.edges()) {
    out += g.display(from);
    out += '\t';
    out += g.display(to);
    out += '\n';
  }
  return out;
}

}  // namespace gridaudit
