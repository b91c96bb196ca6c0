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


// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Each check compares library output with an oracle that
// does not share code with the routine under test.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "builders.hpp"
#include "cli.hpp"
#include "formula_gen.hpp"
#include "gridaudit/engine.hpp"
#include "gridaudit/formula.hpp"
#include "gridaudit/graph.hpp"
#include "gridaudit/inspect.hpp"
#include "gridaudit/risk.hpp"
#include "gridaudit/rules.hpp"
#include "gridaudit/simlab.hpp"
#include "oracles.hpp"

namespace gridaudit {
namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // Records a failed check; the first few are kept for the summary line.
  void check(bool ok, const std::string& what) {
    if (ok) return;
    if (pass) detail << "first failure: " << what << "; ";
    pass = false;
  }
};

struct Criterion {
  int number;
  const char* title;
  double time_limit_s;  // 0: none
  std::function<void(Outcome&)> body;
};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// 1. Monte Carlo agrees with the closed form within three binomial standard
// errors. The standard error comes from the closed-form probability so that
// a degenerate sample (all trials failing) is still judged fairly.
void risk_oracle(Outcome& o) {
  constexpr int kTrials = 100000;
  double worst = 0;
  for (double p : {0.01, 0.02, 0.052}) {
    for (int u : {10, 100, 1000}) {
      const auto mc = monte_carlo(p, u, 0, kTrials, 1);
      const double exact = oracle::binomial_at_least_one(p, u);
      o.check(std::fabs(p_any_error(p, u) - exact) <= 1e-12,
              "closed form disagrees with summation at p=" + format_number(p));
      const double se = std::sqrt(exact * (1 - exact) / kTrials);
      const double z = se > 0 ? std::fabs(mc.p_any_error - exact) / se
                              : (mc.p_any_error == exact ? 0.0 : INFINITY);
      worst = std::max(worst, z);
      o.check(z <= 3, "p=" + format_number(p) + " U=" + std::to_string(u) + " off by " +
                          fixed(z, 2) + " SE");
    }
  }
  const auto spot = monte_carlo(0.02, 100, 0, kTrials, 1);
  o.check(std::fabs(spot.p_any_error - 0.8674) <= 0.004, "spot value p=0.02 U=100");
  o.detail << "9 cells, worst |z|=" << fixed(worst, 2) << ", p=0.02 U=100 estimate "
           << fixed(spot.p_any_error, 4);
}

// 2. At p = 0.052 the chance of at least one error reaches 0.94 by U = 57
// and stays there. Checked pointwise well past the range of any workbook.
void audit_consistency(Outcome& o) {
  constexpr double p = 0.052;
  std::int64_t first = -1;
  for (std::int64_t u = 1; u <= 1000000; ++u) {
    const double v = p_any_error(p, static_cast<double>(u));
    if (first < 0 && v >= 0.94) first = u;
    if (u >= 57) o.check(v >= 0.94, "U=" + std::to_string(u));
  }
  o.check(first >= 0 && first <= 57, "threshold not reached by U=57");
  // Independent oracle: repeated multiplication of survival odds.
  o.check(1 - oracle::survival_product(p, 57) >= 0.94, "survival product at U=57");
  o.detail << "pAnyError(0.052, 57)=" << fixed(p_any_error(p, 57), 6)
           << ", smallest U reaching 0.94 is " << first;
}

// 3. Residual after three rounds at yield 0.6, as a fraction of formulas.
void inspection_residual(Outcome& o) {
  constexpr double kFraction = 128.0 / 100000.0;  // 2/100 * (4/10)^3
  constexpr double kDetected = 936.0 / 1000.0;    // 1 - (4/10)^3
  for (double u : {1.0, 50.0, 100.0, 1000.0, 12345.0}) {
    const double e = expected_errors(0.02, 1.0, u);
    const auto traj = residual_with_yield(e, 0.60, 3);
    o.check(traj.size() == 3, "trajectory length");
    if (traj.size() != 3) return;
    o.check(std::fabs(traj[2] / u - kFraction) <= 1e-15, "residual fraction at U=" +
                                                            format_number(u));
    o.check(std::fabs((1 - traj[2] / e) - kDetected) <= 1e-15, "cumulative detection");
  }
  o.check(kFraction >= 0.001 && kFraction <= 0.003, "outside 0.1%..0.3% band");
  o.check(kDetected >= 0.90, "cumulative detection below 90%");
  o.detail << "residual fraction " << format_number(kFraction) << ", cumulative detection "
           << format_number(kDetected);
}

// 4. Simulated inspection of 20 defects against the closed-form thinning.
void detection_experiment_check(Outcome& o) {
  constexpr int kTrials = 10000, kDefects = 20;
  SeededWorkbook seeded;
  seeded.truth.resize(kDefects);
  const auto r = detection_experiment(seeded, 0.60, 3, kTrials, 1);
  const double expected[] = {8.0, 3.2, 1.28};
  o.check(r.mean_residual.size() == 3, "trajectory length");
  if (r.mean_residual.size() != 3) return;
  for (int i = 0; i < 3; ++i) {
    const double q = std::pow(0.4, i + 1);
    const double sigma = std::sqrt(kDefects * q * (1 - q) / kTrials);
    o.check(std::fabs(r.mean_residual[static_cast<std::size_t>(i)] - expected[i]) <= 3 * sigma,
            "round " + std::to_string(i + 1));
    o.detail << (i ? ", " : "trajectory ") << fixed(r.mean_residual[static_cast<std::size_t>(i)], 3);
  }
}

// 5. Every seeded defect is found at its truth location by its rule, and the
// clean corpus is free of error-severity findings.
void rule_recall(Outcome& o) {
  const RuleConfig cfg = RuleConfig::defaults();
  std::size_t injected = 0, found = 0, extra = 0;
  for (const auto& d : registered_rules()) {
    const std::string cls(d.id);
    std::size_t per_class = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      SeedSpec spec;
      spec.topology = static_cast<Topology>(seed % 3);
      spec.formula_count = 60;
      spec.error_rate = 0.1;
      spec.defect_mix = {{cls, 1.0}};
      spec.rng_seed = seed;
      const auto seeded = seed_defects(generate_clean(spec), spec);
      const auto run = run_rules(seeded.workbook, build_graph(seeded.workbook), cfg);
      for (const auto& t : seeded.truth) {
        ++injected;
        ++per_class;
        const bool hit = std::any_of(run.findings.begin(), run.findings.end(),
                                     [&](const Finding& f) {
                                       return f.rule_id == cls && f.location == t.cell;
                                     });
        found += hit;
        o.check(hit, cls + " seed " + std::to_string(seed));
      }
      for (const auto& f : run.findings) {
        const bool at_truth =
            std::any_of(seeded.truth.begin(), seeded.truth.end(),
                        [&](const TruthEntry& t) { return t.cell == f.location; });
        extra += !at_truth;
      }
    }
    o.check(per_class > 0, cls + " never injected");
  }
  std::size_t clean_errors = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    SeedSpec spec;
    spec.topology = static_cast<Topology>(seed % 3);
    spec.formula_count = 10 + static_cast<int>(seed) * 3;
    spec.rng_seed = seed;
    const Workbook wb = generate_clean(spec);
    clean_errors += run_rules(wb, build_graph(wb), cfg).count_at_least(Severity::kError);
  }
  o.check(clean_errors == 0, "clean corpus has error findings");
  o.detail << "recall " << found << "/" << injected << ", findings off truth " << extra
           << ", clean-corpus errors " << clean_errors;
}

// 6. The understatement reported for a number typed as text equals the
// difference between evaluating with and without the coercion.
void fraud_understatement(Outcome& o) {
  using testing::f;
  using testing::num;
  using testing::txt;
  const Workbook wb = testing::book(
      {{"A1", num(100)}, {"A2", num(200)}, {"A3", txt("300")}, {"A4", f("=SUM(A1:A3)")}},
      {"A4"});
  Workbook fixed_wb = wb;
  fixed_wb.sheets.front().cells[{3, 1}] = num(300);
  const double shown = evaluate(wb).at(testing::at("A4")).as_number();
  const double real = evaluate(fixed_wb).at(testing::at("A4")).as_number();
  const double oracle = real - shown;

  RuleConfig cfg = RuleConfig::defaults();
  cfg.enabled = {std::string(rule_id::kNumAsText)};
  const auto run = run_rules(wb, build_graph(wb), cfg);
  o.check(run.findings.size() == 1, "expected one NUM_AS_TEXT finding");
  if (run.findings.size() != 1) return;
  const auto& ev = run.findings.front().evidence;
  o.check(ev.count("understatement") && ev.at("understatement") == "300",
          "evidence understatement");
  o.check(oracle == 300, "engine difference");
  o.detail << "shown total " << format_number(shown) << ", real total " << format_number(real)
           << ", understatement " << (ev.count("understatement") ? ev.at("understatement") : "?");
}

// 7. Recheck against a fresh snapshot always passes; mutating a formula in
// an output's precedent closure always shows up.
void execution_testing(Outcome& o) {
  std::mt19937_64 rng(77);
  std::size_t books = 0, mutations = 0, reported = 0;
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    for (bool with_defects : {false, true}) {
      SeedSpec spec;
      spec.topology = static_cast<Topology>(seed % 3);
      spec.formula_count = 5 + static_cast<int>(seed % 20) * 7;
      spec.rng_seed = seed;
      spec.error_rate = 0.1;
      const Workbook clean = generate_clean(spec);
      const Workbook wb = with_defects ? seed_defects(clean, spec).workbook : clean;
      const Snapshot snap = snapshot(wb, cli::kFixedTimestamp);
      const auto self = recheck(wb, snap);
      ++books;
      o.check(self.passed(), "self recheck, seed " + std::to_string(seed));

      const DepGraph g = build_graph(wb);
      std::vector<CellAddress> in_closure;
      for (const auto& out : wb.meta.outputs) {
        for (NodeId id : g.precedent_closure(*g.find(out))) in_closure.push_back(g.node(id).address);
      }
      std::sort(in_closure.begin(), in_closure.end());
      in_closure.erase(std::unique(in_closure.begin(), in_closure.end()), in_closure.end());
      std::shuffle(in_closure.begin(), in_closure.end(), rng);
      if (in_closure.size() > 8) in_closure.resize(8);
      for (const auto& target : in_closure) {
        Workbook mutated = wb;
        auto& cells = mutated.find_sheet(target.sheet)->cells;
        const auto found = cells.find(target.pos());
        if (found == cells.end() || !found->second.is_formula()) continue;
        Cell& c = found->second;
        // The generated layouts are linear with non-zero coefficients, so
        // v -> 2v + 1 always moves every downstream output.
        c = Cell::formula("=(" + c.formula_source().substr(1) + ")*2+1", c.locked);
        ++mutations;
        const bool hit = !recheck(mutated, snap).passed();
        reported += hit;
        o.check(hit, "mutation at " + to_a1(target, true) + " seed " + std::to_string(seed));
      }
    }
  }
  o.detail << books << " workbooks rechecked clean, " << reported << "/" << mutations
           << " mutations reported";
}

// 8. Serialization identity and copy invariance, 10^4 cases each.
void round_trips(Outcome& o) {
  std::mt19937_64 rng(2026);
  int identity = 0;
  for (int i = 0; i < 10000; ++i) {
    const Workbook wb = testing::random_workbook(rng);
    const std::string doc = serialize_workbook(wb);
    const Workbook back = parse_workbook(doc);
    const bool ok = back == wb && serialize_workbook(back) == doc;
    identity += ok;
    o.check(ok, "workbook case " + std::to_string(i));
  }
  testing::TemplateGen gen(rng);
  std::uniform_int_distribution<std::int64_t> pos(50, 500), shift(-25, 25);
  int invariant = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto t = gen.expr();
    const std::int64_t r = pos(rng), c = pos(rng);
    const std::int64_t r2 = r + shift(rng), c2 = c + shift(rng);
    const auto a = normalize(parse_formula("=" + t.render(r, c), {"Sheet1", r, c}));
    const auto b = normalize(parse_formula("=" + t.render(r2, c2), {"Sheet1", r2, c2}));
    const bool ok = a.text == b.text && a.literals == b.literals;
    invariant += ok;
    o.check(ok, "copy case " + t.render(r, c));
  }
  o.detail << "serialize/parse " << identity << "/10000, copy invariance " << invariant
           << "/10000";
}

// 9. Planner arithmetic on the reference layout and the session cap over a
// randomized corpus.
void planner(Outcome& o) {
  Workbook wb = testing::book({});
  for (int r = 1; r <= 450; ++r) {
    wb.sheets.front().cells[{r, 1}] = testing::num(r);
    wb.sheets.front().cells[{r, 2}] = testing::f("=A" + std::to_string(r) + "*2");
  }
  const InspectionPlan p = plan(wb);
  o.check(p.modules.size() == 3, "module count");
  for (const auto& m : p.modules) {
    o.check(m.formula_count() == 150, "module size");
    o.check(std::fabs(m.estimated_minutes - 90.0) <= 1e-9, "module minutes");
  }

  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> size(1, 400), formulas(1, 600), topo(0, 2);
  std::uniform_real_distribution<double> rate(20, 400), cap(30, 240);
  std::size_t modules = 0;
  for (int i = 0; i < 300; ++i) {
    SeedSpec spec;
    spec.topology = static_cast<Topology>(topo(rng));
    spec.formula_count = formulas(rng);
    spec.rng_seed = static_cast<std::uint64_t>(i + 1);
    spec.error_rate = 0.1;
    const Workbook w = seed_defects(generate_clean(spec), spec).workbook;
    PlanConfig cfg;
    cfg.target_module_size = size(rng);
    cfg.rate_cap = rate(rng);
    cfg.session_cap_minutes = cap(rng);
    const InspectionPlan pl = plan(w, cfg);
    for (const auto& m : pl.modules) {
      ++modules;
      // A single formula longer than a session is flagged rather than split.
      o.check(m.over_cap || m.estimated_minutes <= cfg.session_cap_minutes + 1e-9,
              "module " + m.id + " exceeds the session cap");
    }
  }
  o.detail << "reference plan " << p.modules.size() << " x "
           << (p.modules.empty() ? 0.0 : p.modules.front().estimated_minutes) << " min; "
           << modules << " randomized modules within cap";
}

// 10. End-to-end audit of a 10,000-formula workbook through the command line.
void performance(Outcome& o) {
  SeedSpec spec;
  spec.topology = Topology::kGrid;
  spec.formula_count = 10000;
  spec.rng_seed = 42;
  const Workbook wb = seed_defects(generate_clean(spec), spec).workbook;
  const auto dir = std::filesystem::temp_directory_path() / "gridaudit_acceptance";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "big.json").string();
  save_workbook(wb, path);

  std::ostringstream out, err;
  const auto t0 = std::chrono::steady_clock::now();
  const int code = cli::run({"audit", path, "--format", "machine", "-o",
                             (dir / "report.json").string(), "--fixed-timestamp"},
                            out, err);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::filesystem::remove_all(dir);
  o.check(code == 0 || code == 1, "audit exit code " + std::to_string(code));
  o.check(secs < 5.0, "audit took " + fixed(secs, 2) + " s");
  o.detail << wb.formula_count() << " formulas audited in " << fixed(secs, 2) << " s";
}

}  // namespace
}  // namespace gridaudit

int main() {
  using namespace gridaudit;
  const std::vector<Criterion> criteria{
      {1, "risk model agrees with Monte Carlo", 30, risk_oracle},
      {2, "audited error rate implies 94% at U >= 57", 0, audit_consistency},
      {3, "inspection residual 0.00128 and detection 0.936", 0, inspection_residual},
      {4, "detection experiment matches [8, 3.2, 1.28]", 10, detection_experiment_check},
      {5, "rule recall on seeded corpora, clean corpus silent", 60, rule_recall},
      {6, "number-as-text understatement is 300", 0, fraud_understatement},
      {7, "execution testing: recheck and mutation detection", 30, execution_testing},
      {8, "serialization and copy-invariance round-trips", 0, round_trips},
      {9, "planner arithmetic and session cap", 0, planner},
      {10, "10,000-formula audit under 5 s", 0, performance},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.time_limit_s > 0) {
      o.check(secs < c.time_limit_s, "time limit " + fixed(c.time_limit_s, 0) + " s exceeded");
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.number << ": " << c.title
              << " (" << o.detail.str() << "; " << fixed(secs, 2) << " s)" << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
