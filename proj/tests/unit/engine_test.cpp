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
#include <cmath>
#include <random>

#include "builders.hpp"
#include "gridaudit/engine.hpp"
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
using testing::txt;

Value value_at(const Workbook& wb, const std::string& where) {
  const auto values = evaluate(wb);
  const auto it = values.find(at(where));
  return it == values.end() ? Value{} : it->second;
}

Value n(double v) { return Value::number(v); }
Value err(ErrorValue e) { return Value::error(e); }

TEST(Evaluate, AggregatesSkipNumericText) {
  const auto wb = book({{"A1", num(100)}, {"A2", num(200)}, {"A3", txt("300")},
                        {"A4", f("=SUM(A1:A3)")}});
  EXPECT_EQ(value_at(wb, "A4"), n(300));
}

TEST(Evaluate, OperatorsCoerceNumericText) {
  EXPECT_EQ(value_at(book({{"A1", txt("300")}, {"B1", f("=A1+1")}}), "B1"), n(301));
  EXPECT_EQ(value_at(book({{"A1", txt("abc")}, {"B1", f("=A1+1")}}), "B1"),
            err(ErrorValue::kValue));
}

TEST(Evaluate, TextFormatNumberBehavesAsText) {
  Cell typed = num(300);
  typed.format = DeclaredFormat::kText;
  const auto wb = book({{"A1", num(100)}, {"A2", typed}, {"A3", f("=SUM(A1:A2)")},
                        {"A4", f("=A2*2")}});
  EXPECT_EQ(value_at(wb, "A3"), n(100));
  EXPECT_EQ(value_at(wb, "A4"), n(600));
}

TEST(Evaluate, CyclesAndErrors) {
  const auto cyc = book({{"A1", f("=B1")}, {"B1", f("=A1")}, {"C1", f("=A1+1")}});
  const auto values = evaluate(cyc);
  EXPECT_EQ(values.at(at("A1")), err(ErrorValue::kCycle));
  EXPECT_EQ(values.at(at("B1")), err(ErrorValue::kCycle));
  EXPECT_EQ(values.at(at("C1")), err(ErrorValue::kCycle));

  EXPECT_EQ(value_at(book({{"A1", f("=1/0")}}), "A1"), err(ErrorValue::kDiv0));
  EXPECT_EQ(value_at(book({{"A1", f("=Nowhere!A1")}}), "A1"), err(ErrorValue::kRef));
  EXPECT_EQ(value_at(book({{"A1", f("=A1048577+1")}}), "A1"), err(ErrorValue::kRef));
  EXPECT_EQ(value_at(book({{"A1", f("=1/0")}, {"B1", f("=A1*2")}}), "B1"),
            err(ErrorValue::kDiv0));
  EXPECT_EQ(value_at(book({{"A1", f("=1/0")}, {"B1", f("=SUM(A1:A2)")}}), "B1"),
            err(ErrorValue::kDiv0));
}

TEST(Evaluate, EmptyIsZeroInArithmetic) {
  EXPECT_EQ(value_at(book({{"B1", f("=A1+5")}}), "B1"), n(5));
  EXPECT_EQ(value_at(book({{"B1", f("=COUNT(A1:A9)")}}), "B1"), n(0));
}

TEST(Evaluate, IfIsLazy) {
  EXPECT_EQ(value_at(book({{"A1", f("=IF(TRUE,1,1/0)")}}), "A1"), n(1));
  EXPECT_EQ(value_at(book({{"A1", f("=IF(FALSE,1/0,2)")}}), "A1"), n(2));
  EXPECT_EQ(value_at(book({{"A1", f("=IF(1>0,\"yes\")")}}), "A1"), Value::text("yes"));
}

TEST(Evaluate, Functions) {
  const auto wb = book({{"A1", num(2)}, {"A2", num(-7)}, {"A3", num(4.5)}, {"A4", txt("x")},
                        {"A5", Cell::boolean(true)}, {"B1", f("=AVERAGE(A1:A5)")},
                        {"B2", f("=MIN(A1:A5)")}, {"B3", f("=MAX(A1:A5)")},
                        {"B4", f("=COUNT(A1:A5)")}, {"B5", f("=ROUND(2.345,2)")},
                        {"B6", f("=ABS(A2)")}, {"B7", f("=AND(A1>1,NOT(A2>0))")},
                        {"B8", f("=OR(FALSE,A3<1)")}, {"B9", f("=A1&\"-\"&A3")},
                        {"B10", f("=-2^2")}, {"B11", f("=2^3^2")}, {"B12", f("=\"a\"=\"A\"")}});
  const auto v = evaluate(wb);
  EXPECT_EQ(v.at(at("B1")), n(-0.5 / 3));
  EXPECT_EQ(v.at(at("B2")), n(-7));
  EXPECT_EQ(v.at(at("B3")), n(4.5));
  EXPECT_EQ(v.at(at("B4")), n(3));
  EXPECT_EQ(v.at(at("B5")), n(2.35));
  EXPECT_EQ(v.at(at("B6")), n(7));
  EXPECT_EQ(v.at(at("B7")), Value::boolean(true));
  EXPECT_EQ(v.at(at("B8")), Value::boolean(false));
  EXPECT_EQ(v.at(at("B9")), Value::text("2-4.5"));
  EXPECT_EQ(v.at(at("B10")), n(4));
  EXPECT_EQ(v.at(at("B11")), n(64));
  EXPECT_EQ(v.at(at("B12")), Value::boolean(true));
}

TEST(Evaluate, DisplayText) {
  EXPECT_EQ(display(n(300)), "300");
  EXPECT_EQ(display(err(ErrorValue::kDiv0)), "#DIV/0!");
  EXPECT_EQ(display(err(ErrorValue::kCycle)), "#CYCLE!");
  EXPECT_EQ(display(Value::boolean(true)), "TRUE");
  for (auto e : {ErrorValue::kDiv0, ErrorValue::kValue, ErrorValue::kRef, ErrorValue::kCycle}) {
    EXPECT_EQ(error_value_from_text(error_value_text(e)), e);
  }
}

TEST(Evaluate, SyntaxErrorPropagates) {
  try {
    evaluate(book({{"C3", f("=1+")}}));
    FAIL();
  } catch (const FormulaError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSyntaxError);
    EXPECT_NE(std::string(e.what()).find("C3"), std::string::npos);
  }
}

TEST(Snapshot, RecordsOutputsAndInputs) {
  const auto wb = book({{"A1", num(5)}, {"B1", f("=A1*2")}}, {"B1"});
  const Snapshot s = snapshot(wb, "2026-01-01T00:00:00Z");
  EXPECT_EQ(s.outputs.size(), 1u);
  EXPECT_EQ(s.outputs.at(at("B1")), n(10));
  EXPECT_EQ(s.inputs.at(at("A1")), num(5));
  EXPECT_EQ(s.workbook_name, wb.name);
  EXPECT_EQ(parse_snapshot(serialize_snapshot(s)), s);
}

TEST(Snapshot, Preconditions) {
  try {
    snapshot(book({{"A1", num(5)}}), "t");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoDeclaredOutputs);
  }
  try {
    snapshot(book({{"B1", f("=1/0")}}, {"B1"}), "t");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOutputIsError);
    EXPECT_NE(std::string(e.what()).find("#DIV/0!"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("B1"), std::string::npos);
  }
}

TEST(Recheck, DetectsChangesAndMissingOutputs) {
  auto wb = book({{"A1", num(5)}, {"B1", f("=A1*2")}}, {"B1"});
  const Snapshot s = snapshot(wb, "t");
  EXPECT_TRUE(recheck(wb, s).passed());
  EXPECT_EQ(recheck(wb, s).matches.size(), 1u);

  auto changed = wb;
  changed.sheets[0].cells[{1, 2}] = f("=A1*3");
  const auto r = recheck(changed, s);
  ASSERT_EQ(r.mismatches.size(), 1u);
  EXPECT_EQ(r.mismatches[0].expected, n(10));
  EXPECT_EQ(r.mismatches[0].actual, n(15));

  auto deleted = wb;
  deleted.sheets[0].cells.erase({1, 2});
  deleted.meta.outputs.clear();
  const auto d = recheck(deleted, s);
  EXPECT_EQ(d.missing.size(), 1u);
  EXPECT_GT(d.failure_count(), 0u);

  auto input_gone = wb;
  input_gone.sheets[0].cells.erase({1, 1});
  try {
    recheck(input_gone, s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingInputCell);
  }
}

TEST(Recheck, SnapshotInputsOverrideWorkbookConstants) {
  auto wb = book({{"A1", num(5)}, {"B1", f("=A1*2")}}, {"B1"});
  const Snapshot s = snapshot(wb, "t");
  wb.sheets[0].cells[{1, 1}] = num(6);
  EXPECT_TRUE(recheck(wb, s).passed());
}

TEST(Tolerance, RelativeAndAbsolute) {
  EXPECT_TRUE(values_match(n(1e6), n(1e6 * (1 + 5e-10))));
  EXPECT_FALSE(values_match(n(1e6), n(1e6 * (1 + 5e-9))));
  EXPECT_TRUE(values_match(n(0), n(5e-13)));
  EXPECT_FALSE(values_match(n(0), n(5e-12)));
  EXPECT_FALSE(values_match(Value::text("a"), Value::text("A")));
  EXPECT_FALSE(values_match(n(1), Value::text("1")));
}

// Generated corpora stay inside the subset the reference evaluator covers.
TEST(EngineProperties, AgreesWithReferenceEvaluator) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    SeedSpec spec;
    spec.topology = static_cast<Topology>(seed % 3);
    spec.formula_count = 40 + static_cast<int>(seed);
    spec.rng_seed = seed;
    const Workbook wb = generate_clean(spec);
    std::map<oracle::SimpleCell, std::string> cells;
    for (const auto& [pos, cell] : wb.sheets[0].cells) {
      cells[{pos.row, pos.col}] =
          cell.is_formula() ? cell.formula_source() : format_number(std::get<double>(cell.content));
    }
    oracle::SubsetEvaluator ref(cells);
    for (const auto& [addr, v] : evaluate(wb)) {
      ASSERT_TRUE(v.is_number()) << to_a1(addr);
      ASSERT_TRUE(values_match(Value::number(ref.value({addr.row, addr.col})), v)) << to_a1(addr);
    }
  }
}

TEST(EngineProperties, Deterministic) {
  SeedSpec spec;
  spec.formula_count = 200;
  const auto seeded = seed_defects(generate_clean(spec), spec);
  EXPECT_EQ(evaluate(seeded.workbook), evaluate(seeded.workbook));
}

TEST(EngineProperties, ValueDependsOnlyOnPrecedents) {
  std::mt19937_64 rng(4);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SeedSpec spec;
    spec.topology = static_cast<Topology>(seed % 3);
    spec.formula_count = 60;
    spec.rng_seed = seed;
    const Workbook wb = generate_clean(spec);
    const auto g = build_graph(wb);
    const auto base = evaluate(wb);
    // perturb one input; cells outside its dependent cone keep their values
    std::vector<GridPos> inputs;
    for (const auto& [pos, cell] : wb.sheets[0].cells) {
      if (!cell.is_formula()) inputs.push_back(pos);
    }
    const GridPos victim = inputs[rng() % inputs.size()];
    Workbook changed = wb;
    changed.sheets[0].cells[victim] = num(123456);
    const auto after = evaluate(changed);
    const CellAddress victim_addr{"Model", victim.row, victim.col};
    const NodeId vid = *g.find(victim_addr);
    for (const auto& [addr, v] : base) {
      if (addr == victim_addr) continue;
      const auto closure = g.precedent_closure(*g.find(addr));
      const bool depends =
          std::find(closure.begin(), closure.end(), vid) != closure.end();
      if (!depends) {
        ASSERT_EQ(after.at(addr), v) << to_a1(addr);
      }
    }
  }
}

TEST(EngineProperties, IncrementalMatchesFullEvaluation) {
  std::mt19937_64 rng(31);
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    SeedSpec spec;
    spec.topology = static_cast<Topology>(seed % 3);
    spec.formula_count = 50;
    spec.error_rate = 0.2;
    spec.rng_seed = seed;
    const Workbook wb = seed_defects(generate_clean(spec), spec).workbook;
    const FormulaIndex index(wb);
    const DepGraph g = build_graph(wb, index);
    const ValueMap base = evaluate(wb, index, g);
    std::vector<GridPos> constants;
    for (const auto& [pos, cell] : wb.sheets[0].cells) {
      if (!cell.is_formula()) constants.push_back(pos);
    }
    for (int k = 0; k < 5; ++k) {
      const GridPos pos = constants[rng() % constants.size()];
      const Cell repl = rng() % 3 == 0 ? txt("77") : num(static_cast<double>(rng() % 1000));
      Workbook changed = wb;
      changed.sheets[0].cells[pos] = repl;
      const ValueMap full = evaluate(changed);
      const CellAddress addr{"Model", pos.row, pos.col};
      const ValueMap part = reevaluate(wb, index, g, base, addr, repl);
      for (const auto& [a, v] : full) {
        const auto it = part.find(a);
        ASSERT_EQ(it == part.end() ? base.at(a) : it->second, v) << to_a1(a);
      }
    }
  }
  const Workbook wb = book({{"A1", num(1)}, {"B1", f("=A1")}});
  const FormulaIndex index(wb);
  const DepGraph g = build_graph(wb, index);
  EXPECT_THROW(reevaluate(wb, index, g, evaluate(wb), at("A1"), f("=2")), Error);
  EXPECT_THROW(reevaluate(wb, index, g, evaluate(wb), at("Z9"), num(2)), Error);
}

TEST(EngineProperties, SumEqualsSumOfNumericSubset) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> real(-1000, 1000);
  for (int trial = 0; trial < 300; ++trial) {
    Workbook wb = book({});
    double expected = 0;
    const int len = 1 + static_cast<int>(rng() % 30);
    for (int r = 1; r <= len; ++r) {
      const double v = std::round(real(rng) * 100) / 100;
      switch (rng() % 4) {
        case 0: wb.sheets[0].cells[{r, 1}] = txt(format_number(v)); break;
        case 1: wb.sheets[0].cells[{r, 1}] = Cell::boolean(v > 0); break;
        case 2: break;
        default:
          wb.sheets[0].cells[{r, 1}] = num(v);
          expected += v;
      }
    }
    wb.sheets[0].cells[{1, 2}] = f("=SUM(A1:A" + std::to_string(len) + ")");
    ASSERT_TRUE(values_match(n(expected), value_at(wb, "B1")));
  }
}

}  // namespace
}  // namespace gridaudit
