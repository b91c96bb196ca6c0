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

#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <random>
#include <set>

#include "builders.hpp"
#include "gridaudit/error.hpp"
#include "gridaudit/graph.hpp"
#include "gridaudit/simlab.hpp"
#include "oracles.hpp"

namespace gridaudit {
namespace {

using testing::at;
using testing::book;
using testing::f;
using testing::num;

std::set<std::pair<std::string, std::string>> edge_names(const DepGraph& g) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& [a, b] : g.edges()) out.emplace(g.display(a), g.display(b));
  return out;
}

TEST(BuildGraph, Edges) {
  auto g = build_graph(book({{"B1", f("=A1+A2")}}));
  EXPECT_EQ(edge_names(g), (std::set<std::pair<std::string, std::string>>{
                               {"Sheet1!A1", "Sheet1!B1"}, {"Sheet1!A2", "Sheet1!B1"}}));
  g = build_graph(book({{"B1", f("=SUM(A1:A3)")}}));
  EXPECT_EQ(g.edge_count(), 3u);
  EXPECT_TRUE(build_graph(book({})).nodes().empty());
}

TEST(BuildGraph, CrossSheetAndRefErrors) {
  const auto g = build_graph(book({{"B1", f("=Data!A1+Missing!A1+A1048577")}, {"Data!A1", num(1)}}));
  EXPECT_EQ(g.edge_count(), 3u);
  int errors = 0;
  for (const auto& node : g.nodes()) errors += node.is_ref_error ? 1 : 0;
  EXPECT_EQ(errors, 2);
  EXPECT_TRUE(g.find(at("A1", "Data")).has_value());
}

TEST(BuildGraph, SelfReferenceOnlyWhenWritten) {
  const auto g = build_graph(book({{"A1", f("=A1+1")}, {"B1", f("=A1")}}));
  const NodeId a1 = *g.find(at("A1"));
  EXPECT_TRUE(std::count(g.node(a1).precedents.begin(), g.node(a1).precedents.end(), a1));
  const NodeId b1 = *g.find(at("B1"));
  EXPECT_FALSE(std::count(g.node(b1).precedents.begin(), g.node(b1).precedents.end(), b1));
}

TEST(BuildGraph, ExplosionCap) {
  const auto wb = book({{"A1", f("=SUM(B1:B2000)")}});
  const FormulaIndex index(wb);
  try {
    build_graph(wb, index, GraphOptions{1000});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kExplosionCap);
  }
  EXPECT_EQ(build_graph(wb, index, GraphOptions{2000}).edge_count(), 2000u);
}

TEST(ChainStats, Examples) {
  auto g = build_graph(book({{"A1", num(1)}, {"B1", f("=A1")}, {"C1", f("=B1")}}));
  auto s = chain_stats(g, {at("C1")});
  ASSERT_EQ(s.closures.size(), 1u);
  EXPECT_EQ(s.closures[0].closure_size, 2u);
  EXPECT_EQ(s.longest_chain_length, 2u);

  g = build_graph(book({{"A1", num(1)}, {"B1", f("=A1")}, {"C1", f("=A1")}, {"D1", f("=B1+C1")}}));
  s = chain_stats(g, {at("D1")});
  EXPECT_EQ(s.closures[0].closure_size, 3u);
  EXPECT_EQ(s.longest_chain_length, 2u);

  g = build_graph(book({{"A1", f("=B1")}, {"B1", f("=A1")}}));
  s = chain_stats(g, {});
  EXPECT_EQ(s.cycles.size(), 1u);
  EXPECT_EQ(s.cycles[0].size(), 2u);
}

TEST(Orphans, Examples) {
  const auto wb = book({{"A1", num(1)}, {"B1", f("=A1")}, {"C1", f("=B1")}, {"Z9", f("=A1*3")}},
                       {"C1"});
  const auto g = build_graph(wb);
  EXPECT_EQ(orphan_formulas(g, wb.meta.outputs), (std::vector<CellAddress>{at("Z9")}));
}

TEST(GraphDump, TabSeparatedDeterministic) {
  const auto wb = book({{"C1", f("=B1+A1")}, {"B1", f("=A1")}});
  const std::string dump = graph_dump(build_graph(wb));
  EXPECT_EQ(dump, "Sheet1!A1\tSheet1!B1\nSheet1!A1\tSheet1!C1\nSheet1!B1\tSheet1!C1\n");
  EXPECT_EQ(dump, graph_dump(build_graph(wb)));
}

struct Corpus {
  Workbook wb;
  DepGraph g;
};

std::vector<Corpus> corpus() {
  std::vector<Corpus> out;
  for (std::uint64_t seed = 1; seed <= 24; ++seed) {
    SeedSpec spec;
    spec.topology = static_cast<Topology>(seed % 3);
    spec.formula_count = 30 + static_cast<int>(seed % 7) * 5;
    spec.rng_seed = seed;
    spec.error_rate = 0.15;
    Workbook wb = seed % 2 ? seed_defects(generate_clean(spec), spec).workbook
                           : generate_clean(spec);
    DepGraph g = build_graph(wb);
    out.push_back({std::move(wb), std::move(g)});
  }
  return out;
}

// Every same-sheet reference written in a formula is an edge, and every
// edge comes from some reference.
TEST(GraphProperties, EdgesMatchTextualReferences) {
  for (const auto& [wb, g] : corpus()) {
    std::set<std::pair<CellAddress, CellAddress>> expected;
    for (const auto& sheet : wb.sheets) {
      for (const auto& [pos, cell] : sheet.cells) {
        if (!cell.is_formula()) continue;
        const std::string& src = cell.formula_source();
        if (src.find('!') != std::string::npos) continue;  // cross-sheet handled below
        for (const auto& ref : oracle::scan_references(src)) {
          expected.insert({{sheet.name, ref.row, ref.col}, {sheet.name, pos.row, pos.col}});
        }
      }
    }
    for (const auto& [a, b] : g.edges()) {
      const auto& host = g.node(b).address;
      const Cell* cell = wb.find_cell(host);
      ASSERT_TRUE(cell && cell->is_formula());
      if (cell->formula_source().find('!') != std::string::npos) continue;
      ASSERT_TRUE(expected.erase({g.node(a).address, host})) << g.display(a) << "->" << g.display(b);
    }
    EXPECT_TRUE(expected.empty());
  }
}

TEST(GraphProperties, ClosuresMatchReachability) {
  for (const auto& [wb, g] : corpus()) {
    const std::size_t n = g.nodes().size();
    const auto edges = g.edges();
    const auto reach = oracle::reachability(n, edges);
    std::vector<std::vector<std::size_t>> precedents(n);
    std::vector<bool> is_formula(n);
    for (std::size_t i = 0; i < n; ++i) {
      precedents[i] = g.node(i).precedents;
      is_formula[i] = g.node(i).is_formula;
    }
    for (std::size_t v = 0; v < n; ++v) {
      std::size_t count = is_formula[v] ? 1 : 0;
      for (std::size_t u = 0; u < n; ++u) {
        if (u != v && reach[u][v] && is_formula[u]) ++count;
      }
      ASSERT_EQ(g.closure_size(v), count);
      ASSERT_EQ(g.closure_size(v), oracle::closure_formulas(v, precedents, is_formula));
    }
  }
}

TEST(GraphProperties, LongestChainMatchesPathSearch) {
  for (const auto& [wb, g] : corpus()) {
    const std::size_t n = g.nodes().size();
    std::vector<long> memo(n, -1);
    std::function<long(std::size_t)> longest = [&](std::size_t v) -> long {
      if (memo[v] >= 0) return memo[v];
      long best = 0;
      for (auto p : g.node(v).precedents) best = std::max(best, longest(p));
      return memo[v] = best + (g.node(v).is_formula ? 1 : 0);
    };
    long best = 0;
    for (std::size_t v = 0; v < n; ++v) best = std::max(best, longest(v));
    const auto stats = chain_stats(g, wb.meta.outputs);
    EXPECT_EQ(static_cast<long>(stats.longest_chain_length), best);
    EXPECT_LE(stats.longest_chain_length, wb.formula_count());
    for (const auto& c : stats.closures) EXPECT_GE(c.closure_size, 1u);
  }
}

TEST(GraphProperties, DependentCountIsReferencingFormulas) {
  for (const auto& [wb, g] : corpus()) {
    std::vector<std::size_t> count(g.nodes().size(), 0);
    for (std::size_t v = 0; v < g.nodes().size(); ++v) {
      for (auto p : g.node(v).precedents) ++count[p];
    }
    for (std::size_t v = 0; v < g.nodes().size(); ++v) {
      ASSERT_EQ(g.node(v).dependent_count(), count[v]);
      for (auto d : g.node(v).dependents) ASSERT_TRUE(g.node(d).is_formula);
    }
  }
}

TEST(GraphProperties, AddingAnEdgeNeverShrinksClosures) {
  std::mt19937_64 rng(5);
  for (const auto& [wb, g] : corpus()) {
    std::vector<CellAddress> formulas, all;
    for (const auto& node : g.nodes()) {
      if (node.is_ref_error) continue;
      all.push_back(node.address);
      if (node.is_formula) formulas.push_back(node.address);
    }
    const CellAddress host = formulas[rng() % formulas.size()];
    const CellAddress extra = all[rng() % all.size()];
    Workbook changed = wb;
    Cell& cell = changed.find_sheet(host.sheet)->cells[host.pos()];
    cell = Cell::formula("=(" + cell.formula_source().substr(1) + ")+" + to_a1(extra), true);
    const DepGraph g2 = build_graph(changed);
    for (const auto& node : g.nodes()) {
      if (node.is_ref_error) continue;
      const NodeId a = *g.find(node.address);
      const NodeId b = *g2.find(node.address);
      ASSERT_GE(g2.closure_size(b), g.closure_size(a)) << to_a1(node.address);
    }
  }
}

}  // namespace
}  // namespace gridaudit
