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


// Throughput of the main pipeline stages on generated workbooks.

#include <benchmark/benchmark.h>

#include "gridaudit/engine.hpp"
#include "gridaudit/formula.hpp"
#include "gridaudit/graph.hpp"
#include "gridaudit/report.hpp"
#include "gridaudit/rules.hpp"
#include "gridaudit/simlab.hpp"

namespace {

using namespace gridaudit;

Workbook generated(int formulas, bool seeded) {
  SeedSpec spec;
  spec.topology = Topology::kGrid;
  spec.formula_count = formulas;
  spec.rng_seed = 42;
  const Workbook clean = generate_clean(spec);
  return seeded ? seed_defects(clean, spec).workbook : clean;
}

void BM_ParseFormula(benchmark::State& state) {
  const CellAddress host{"Sheet1", 40, 40};
  const std::string src = "=IF(SUM($B$2:B39)>0,ROUND(A39*1.07+Other!C3/2,2),-MAX(A1:A20))";
  for (auto _ : state) benchmark::DoNotOptimize(parse_formula(src, host));
}
BENCHMARK(BM_ParseFormula);

void BM_Normalize(benchmark::State& state) {
  const auto ast = parse_formula("=SUM($B$2:B39)*A39+Other!C3", {"Sheet1", 40, 40});
  for (auto _ : state) benchmark::DoNotOptimize(normalize(ast));
}
BENCHMARK(BM_Normalize);

void BM_BuildGraph(benchmark::State& state) {
  const Workbook wb = generated(static_cast<int>(state.range(0)), false);
  const FormulaIndex index(wb);
  for (auto _ : state) benchmark::DoNotOptimize(build_graph(wb, index));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BuildGraph)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_Evaluate(benchmark::State& state) {
  const Workbook wb = generated(static_cast<int>(state.range(0)), false);
  const FormulaIndex index(wb);
  const DepGraph g = build_graph(wb, index);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(wb, index, g));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Evaluate)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_RunRules(benchmark::State& state) {
  const Workbook wb = generated(static_cast<int>(state.range(0)), true);
  const FormulaIndex index(wb);
  const DepGraph g = build_graph(wb, index);
  const RuleConfig cfg = RuleConfig::defaults();
  for (auto _ : state) benchmark::DoNotOptimize(run_rules(wb, index, g, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunRules)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

// Whole audit: parse, graph, rules, risk and report assembly.
void BM_Audit(benchmark::State& state) {
  const Workbook wb = generated(static_cast<int>(state.range(0)), true);
  const RuleConfig cfg = RuleConfig::defaults();
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_audit_report(wb, cfg, {}, "2000-01-01T00:00:00Z"));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Audit)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_WorkbookRoundTrip(benchmark::State& state) {
  const Workbook wb = generated(10000, true);
  for (auto _ : state) benchmark::DoNotOptimize(parse_workbook(serialize_workbook(wb)));
}
BENCHMARK(BM_WorkbookRoundTrip)->Unit(benchmark::kMillisecond);

void BM_MonteCarlo(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo(0.02, 100, 10, 10000, 1));
}
BENCHMARK(BM_MonteCarlo)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
