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

#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "gridaudit/diffcheck.hpp"
#include "gridaudit/engine.hpp"
#include "gridaudit/error.hpp"
#include "gridaudit/graph.hpp"
#include "gridaudit/inspect.hpp"
#include "gridaudit/report.hpp"
#include "gridaudit/risk.hpp"
#include "gridaudit/rules.hpp"
#include "gridaudit/simlab.hpp"
#include "gridaudit/version.hpp"
#include "json.hpp"

namespace gridaudit::cli {

namespace {

using ojson = nlohmann::ordered_json;

struct Common {
  std::string format = "text";
  std::string output;
  bool fixed_timestamp = false;
  std::string config;

  bool machine() const { return format == "machine"; }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--format", c.format, "Output format")
      ->check(CLI::IsMember({"text", "machine"}))
      ->capture_default_str();
  cmd->add_option("-o,--output", c.output, "Write the machine document to this file");
  cmd->add_flag("--fixed-timestamp", c.fixed_timestamp,
                "Use a constant timestamp for reproducible output");
  cmd->add_option("--config", c.config, "Rule configuration file (default: $GRIDAUDIT_CONFIG)");
}

std::string now_utc() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string timestamp(const Common& c) { return c.fixed_timestamp ? kFixedTimestamp : now_utc(); }

RuleConfig load_config(const Common& c) {
  std::string path = c.config;
  if (path.empty()) {
    if (const char* env = std::getenv("GRIDAUDIT_CONFIG"); env && *env) path = env;
  }
  if (path.empty()) return RuleConfig::defaults();
  return parse_rule_config(read_file(path));
}

Workbook load(const std::string& path, std::ostream& err) {
  std::vector<Diagnostic> warnings;
  Workbook wb = load_workbook(path, &warnings);
  for (const auto& w : warnings) err << "warning: " << path << ": " << w.message << "\n";
  return wb;
}

// Text always goes to `out` unless the machine document takes its place.
void emit(const Common& c, std::ostream& out, const std::string& text,
          const std::string& machine) {
  if (!c.machine()) {
    out << text;
    if (!c.output.empty()) write_file(c.output, text);
    return;
  }
  if (c.output.empty()) {
    out << machine;
  } else {
    write_file(c.output, machine);
    out << text;
  }
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string cell_text(const std::optional<Cell>& c) {
  if (!c) return "(empty)";
  std::string s;
  if (c->is_formula()) {
    s = c->formula_source();
  } else if (c->is_number()) {
    s = format_number(std::get<double>(c->content));
  } else if (c->is_text()) {
    s = "\"" + std::get<std::string>(c->content) + "\"";
  } else {
    s = std::get<bool>(c->content) ? "TRUE" : "FALSE";
  }
  if (c->format == DeclaredFormat::kText) s += " [fmt=text]";
  if (c->locked) s += " [locked]";
  return s;
}

// ---------------------------------------------------------------------------

struct AuditArgs {
  std::string workbook;
  std::string fail_on = "error";
};

int cmd_audit(const AuditArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  const RuleConfig cfg = load_config(c);
  const Workbook wb = load(a.workbook, err);
  const AuditReport rep = build_audit_report(wb, cfg, RiskParams{}, timestamp(c));
  emit(c, out, render_report_text(rep), serialize_report(rep));
  const Severity threshold = *severity_from_name(a.fail_on);
  const bool failing = std::any_of(rep.findings.begin(), rep.findings.end(),
                                   [&](const Finding& f) { return f.severity >= threshold; });
  if (!rep.coverage_complete) err << "error: rule coverage is incomplete\n";
  return failing || !rep.coverage_complete ? kFindings : kOk;
}

struct RiskArgs {
  std::string workbook;
  RiskParams params;
};

int cmd_risk(const RiskArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  const Workbook wb = load(a.workbook, err);
  const RiskReport r = assess(wb, a.params);
  emit(c, out, render_risk_text(r), serialize_risk_report(r));
  return kOk;
}

struct PlanArgs {
  std::string workbook;
  PlanConfig cfg;
};

std::string plan_text(const InspectionPlan& p) {
  std::ostringstream os;
  os << "inspection plan: " << p.modules.size() << " modules, team " << p.team_size
     << ", rate cap " << format_number(p.rate_cap) << " cells/hour, session cap "
     << format_number(p.session_cap_minutes) << " min\n";
  for (const auto& m : p.modules) {
    os << "  " << m.id << " " << m.sheet << "!" << to_a1(m.cells.front().pos()) << ".."
       << to_a1(m.cells.back().pos()) << " formulas=" << m.formula_count()
       << " effective=" << format_number(m.effective_cells)
       << " minutes=" << fixed(m.estimated_minutes, 1) << (m.over_cap ? " OVER-CAP" : "")
       << "\n";
  }
  os << "total minutes: " << fixed(p.total_minutes(), 1) << "\n";
  os << "rounds recommended: " << p.rounds_recommended << " (planned " << p.rounds << ")\n";
  for (const auto& w : p.warnings) os << "warning: " << w << "\n";
  return os.str();
}

InspectionPlan make_plan(const Workbook& wb, PlanConfig cfg, const Common& c) {
  cfg.long_formula_tokens = load_config(c).thresholds.long_formula_tokens;
  return plan(wb, FormulaIndex(wb), cfg);
}

int cmd_plan(const PlanArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  const Workbook wb = load(a.workbook, err);
  const InspectionPlan p = make_plan(wb, a.cfg, c);
  for (const auto& w : p.warnings) err << "warning: " << w << "\n";
  emit(c, out, plan_text(p), serialize_plan(p));
  const bool over = std::any_of(p.modules.begin(), p.modules.end(),
                                [](const InspectionModule& m) { return m.over_cap; });
  return over ? kFindings : kOk;
}

struct ReconcileArgs {
  std::string workbook;
  std::vector<std::string> sessions;
  std::string truth;
  PlanConfig cfg;
};

int cmd_reconcile(const ReconcileArgs& a, const Common& c, std::ostream& out,
                  std::ostream& err) {
  const Workbook wb = load(a.workbook, err);
  std::vector<SessionFindings> sessions;
  for (const auto& path : a.sessions) sessions.push_back(parse_session(read_file(path)));
  const InspectionPlan p = make_plan(wb, a.cfg, c);
  const InspectionModule* module = p.find(sessions.front().module_id);
  if (!module) {
    throw Error(ErrorCode::kModuleMismatch,
                "no module " + sessions.front().module_id + " in the inspection plan");
  }
  const Reconciliation r = reconcile(sessions, *module, a.cfg.rate_cap);

  std::ostringstream os;
  ojson doc = ojson::object();
  doc["moduleId"] = r.module_id;
  os << "module " << r.module_id << ": " << r.union_items.size() << " distinct items\n";
  ojson items = ojson::array();
  for (const auto& it : r.union_items) {
    os << "  " << to_a1(it.cell, true) << " [" << it.suspected_class << "] " << it.note << "\n";
    items.push_back({{"cell", to_a1(it.cell, true)},
                     {"suspectedClass", it.suspected_class},
                     {"note", it.note}});
  }
  doc["unionItems"] = std::move(items);
  ojson counts = ojson::object();
  for (const auto& [who, n] : r.per_inspector_counts) {
    os << "inspector " << who << ": " << n << " items\n";
    counts[who] = n;
  }
  doc["perInspectorCounts"] = std::move(counts);
  ojson overlap = ojson::object();
  for (std::size_t i = 0; i < r.inspectors.size(); ++i) {
    for (std::size_t j = i + 1; j < r.inspectors.size(); ++j) {
      os << "overlap " << r.inspectors[i] << "/" << r.inspectors[j] << ": " << r.overlap[i][j]
         << "\n";
      overlap[r.inspectors[i] + "/" + r.inspectors[j]] = r.overlap[i][j];
    }
  }
  doc["overlap"] = std::move(overlap);
  ojson rates = ojson::array();
  bool hasty = false;
  for (const auto& rc : r.rate_checks) {
    os << "rate " << rc.inspector_id << ": " << fixed(rc.implied_rate, 1) << " cells/hour"
       << (rc.hasty ? " HASTY" : "") << "\n";
    rates.push_back({{"inspectorId", rc.inspector_id},
                     {"impliedRate", rc.implied_rate},
                     {"hasty", rc.hasty}});
    hasty = hasty || rc.hasty;
  }
  doc["rateChecks"] = std::move(rates);
  if (!a.truth.empty()) {
    std::vector<CellAddress> truth;
    for (const auto& t : parse_truth(read_file(a.truth))) {
      if (t.cell && module->contains(*t.cell)) truth.push_back(*t.cell);
    }
    const YieldReport y = yield_report(r.union_items, truth);
    os << "yield: " << y.detected.size() << "/" << (y.detected.size() + y.missed.size())
       << " = " << fixed(y.yield_fraction, 4) << "\n";
    doc["yield"] = {{"detected", y.detected.size()},
                    {"missed", y.missed.size()},
                    {"yieldFraction", y.yield_fraction}};
  }
  emit(c, out, os.str(), doc.dump(2) + "\n");
  return hasty ? kFindings : kOk;
}

struct DiffArgs {
  std::string a, b;
};

int cmd_diff(const DiffArgs& d, const Common& c, std::ostream& out, std::ostream& err) {
  const Workbook a = load(d.a, err);
  const Workbook b = load(d.b, err);
  const auto entries = diff(a, b);
  std::ostringstream os;
  for (const auto& e : entries) {
    os << diff_kind_name(e.kind) << " " << to_a1(e.location, true) << ": "
       << cell_text(e.before) << " -> " << cell_text(e.after)
       << (e.fraud_indicator ? " [fraud-indicator]" : "") << "\n";
  }
  os << entries.size() << " difference(s)\n";
  emit(c, out, os.str(), serialize_diff(a, b, entries));
  return entries.empty() ? kOk : kFindings;
}

struct ThreeWayArgs {
  std::string base, copy1, copy2;
};

int cmd_threeway(const ThreeWayArgs& t, const Common& c, std::ostream& out,
                 std::ostream& err) {
  const Workbook base = load(t.base, err);
  const Workbook c1 = load(t.copy1, err);
  const Workbook c2 = load(t.copy2, err);
  const ThreeWayResult r = three_way_check(base, c1, c2);
  std::ostringstream os;
  for (const auto& e : r.agreeing) {
    os << "agreeing " << to_a1(e.location, true) << ": " << cell_text(e.base) << " -> "
       << cell_text(e.copy1) << "\n";
  }
  for (const auto& e : r.conflicting) {
    os << "conflicting " << to_a1(e.location, true) << ": base " << cell_text(e.base)
       << ", copy1 " << cell_text(e.copy1) << ", copy2 " << cell_text(e.copy2) << "\n";
  }
  os << r.agreeing.size() << " agreeing, " << r.conflicting.size() << " conflicting\n";
  emit(c, out, os.str(), serialize_three_way(r));
  return r.conflicting.empty() ? kOk : kFindings;
}

struct SnapshotArgs {
  std::string workbook;
};

int cmd_snapshot(const SnapshotArgs& s, const Common& c, std::ostream& out, std::ostream& err) {
  const Workbook wb = load(s.workbook, err);
  const Snapshot snap = snapshot(wb, timestamp(c));
  const std::string doc = serialize_snapshot(snap);
  if (c.output.empty()) {
    out << doc;
  } else {
    write_file(c.output, doc);
    out << "snapshot: " << snap.inputs.size() << " inputs, " << snap.outputs.size()
        << " outputs -> " << c.output << "\n";
  }
  return kOk;
}

struct RecheckArgs {
  std::string workbook;
  std::string snapshot;
};

int cmd_recheck(const RecheckArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  const RuleConfig cfg = load_config(c);
  const Workbook wb = load(a.workbook, err);
  const Snapshot snap = parse_snapshot(read_file(a.snapshot));
  const RecheckReport r = recheck(wb, snap, cfg.recheck_tolerance);
  std::ostringstream os;
  ojson doc = ojson::object();
  ojson mism = ojson::array();
  for (const auto& m : r.mismatches) {
    os << "mismatch " << to_a1(m.cell, true) << ": expected " << display(m.expected)
       << ", actual " << display(m.actual) << "\n";
    mism.push_back({{"cell", to_a1(m.cell, true)},
                    {"expected", display(m.expected)},
                    {"actual", display(m.actual)}});
  }
  ojson missing = ojson::array();
  for (const auto& m : r.missing) {
    os << "missing output " << to_a1(m, true) << "\n";
    missing.push_back(to_a1(m, true));
  }
  os << "recheck: " << r.matches.size() << " matched, " << r.mismatches.size()
     << " mismatched, " << r.missing.size() << " missing\n";
  doc["matches"] = r.matches.size();
  doc["mismatches"] = std::move(mism);
  doc["missing"] = std::move(missing);
  doc["passed"] = r.passed();
  emit(c, out, os.str(), doc.dump(2) + "\n");
  return r.passed() ? kOk : kFindings;
}

struct SeedArgs {
  std::string spec_path;
  std::string out_dir = ".";
  std::optional<std::string> topology;
  std::optional<int> formulas;
  std::optional<int> inputs;
  std::optional<double> p;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> defect_class;
  bool clean_only = false;
};

int cmd_seed(const SeedArgs& a, const Common& c, std::ostream& out, std::ostream&) {
  SeedSpec spec = a.spec_path.empty() ? SeedSpec{} : parse_seed_spec(read_file(a.spec_path));
  if (a.topology) spec.topology = *topology_from_name(*a.topology);
  if (a.formulas) spec.formula_count = *a.formulas;
  if (a.inputs) spec.input_count = *a.inputs;
  if (a.p) spec.error_rate = *a.p;
  if (a.seed) spec.rng_seed = *a.seed;
  if (a.defect_class) spec.defect_mix = {{*a.defect_class, 1.0}};
  spec.validate();

  const Workbook clean = generate_clean(spec);
  SeededWorkbook seeded = a.clean_only ? SeededWorkbook{clean, {}} : seed_defects(clean, spec);
  std::filesystem::create_directories(a.out_dir);
  const auto stem = (std::filesystem::path(a.out_dir) / clean.name).string();
  write_file(stem + ".json", serialize_workbook(seeded.workbook));
  write_file(stem + ".truth", serialize_truth(seeded));

  std::ostringstream os;
  os << "wrote " << stem << ".json (" << seeded.workbook.formula_count() << " formulas)\n";
  os << "wrote " << stem << ".truth (" << seeded.truth.size() << " seeded defects)\n";
  ojson doc = {{"workbook", stem + ".json"},
               {"truth", stem + ".truth"},
               {"formulas", seeded.workbook.formula_count()},
               {"defects", seeded.truth.size()}};
  emit(c, out, os.str(), doc.dump(2) + "\n");
  return kOk;
}

struct McArgs {
  double p = 0.02;
  std::int64_t u = 100;
  std::int64_t l = 0;
  int trials = 100000;
  std::uint64_t seed = 1;
  int defects = 0;
  double yield = 0.60;
  int rounds = 3;
};

int cmd_mc(const McArgs& a, const Common& c, std::ostream& out, std::ostream&) {
  const MonteCarloResult r = monte_carlo(a.p, a.u, a.l, a.trials, a.seed);
  const double closed_any = p_any_error(a.p, static_cast<double>(a.u));
  const double closed_chain = p_chain_correct(a.p, static_cast<double>(a.l));
  std::ostringstream os;
  os << "trials " << r.trials << ", p " << format_number(a.p) << ", U " << a.u << ", L " << a.l
     << "\n";
  os << "P(any error):     " << fixed(r.p_any_error, 4) << " +/- " << fixed(r.p_any_error_se, 4)
     << " (closed form " << fixed(closed_any, 4) << ")\n";
  os << "P(chain correct): " << fixed(r.p_chain_correct, 4) << " +/- "
     << fixed(r.p_chain_correct_se, 4) << " (closed form " << fixed(closed_chain, 4) << ")\n";
  ojson doc = {{"trials", r.trials},
               {"p", a.p},
               {"U", a.u},
               {"L", a.l},
               {"pAnyErrorHat", r.p_any_error},
               {"pAnyErrorSe", r.p_any_error_se},
               {"pAnyErrorClosedForm", closed_any},
               {"pChainCorrectHat", r.p_chain_correct},
               {"pChainCorrectSe", r.p_chain_correct_se},
               {"pChainCorrectClosedForm", closed_chain}};
  if (a.defects > 0) {
    SeededWorkbook fake;
    fake.truth.resize(static_cast<std::size_t>(a.defects));
    const DetectionResult d = detection_experiment(fake, a.yield, a.rounds, a.trials, a.seed);
    const auto expected = residual_with_yield(a.defects, a.yield, a.rounds);
    ojson traj = ojson::array();
    for (std::size_t i = 0; i < d.mean_residual.size(); ++i) {
      os << "residual after round " << (i + 1) << ": " << fixed(d.mean_residual[i], 4)
         << " +/- " << fixed(d.std_error[i], 4) << " (closed form " << fixed(expected[i], 4)
         << ")\n";
      traj.push_back({{"mean", d.mean_residual[i]},
                      {"se", d.std_error[i]},
                      {"closedForm", expected[i]}});
    }
    doc["residualTrajectory"] = std::move(traj);
  }
  emit(c, out, os.str(), doc.dump(2) + "\n");
  return kOk;
}

struct GraphArgs {
  std::string workbook;
};

int cmd_graph_dump(const GraphArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  const Workbook wb = load(a.workbook, err);
  const DepGraph g = build_graph(wb);
  ojson edges = ojson::array();
  for (const auto& [from, to] : g.edges()) edges.push_back({g.display(from), g.display(to)});
  emit(c, out, graph_dump(g), ojson{{"edges", std::move(edges)}}.dump(2) + "\n");
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spreadsheet audit toolkit", "gridaudit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  Common common;
  AuditArgs audit;
  auto* s_audit = app.add_subcommand("audit", "Run every rule and the risk model");
  s_audit->add_option("workbook", audit.workbook)->required();
  s_audit->add_option("--fail-on", audit.fail_on, "Lowest severity that fails the run")
      ->check(CLI::IsMember({"info", "warning", "error"}))
      ->capture_default_str();
  add_common(s_audit, common);

  RiskArgs risk;
  auto* s_risk = app.add_subcommand("risk", "Print the risk model for a workbook");
  s_risk->add_option("workbook", risk.workbook)->required();
  s_risk->add_option("--p", risk.params.p, "Base error rate per unique formula")
      ->capture_default_str();
  s_risk->add_option("--serious-fraction", risk.params.serious_fraction)->capture_default_str();
  s_risk->add_option("--team-size", risk.params.team_size)->capture_default_str();
  s_risk->add_option("--rounds", risk.params.rounds)->capture_default_str();
  add_common(s_risk, common);

  auto add_plan_options = [](CLI::App* cmd, PlanConfig& cfg) {
    cmd->add_option("--module-size", cfg.target_module_size)->capture_default_str();
    cmd->add_option("--rate-cap", cfg.rate_cap)->capture_default_str();
    cmd->add_option("--team-size", cfg.team_size)->capture_default_str();
    cmd->add_option("--rounds", cfg.rounds)->capture_default_str();
    cmd->add_option("--session-cap", cfg.session_cap_minutes)->capture_default_str();
    cmd->add_flag("--allow-small-team", cfg.allow_small_team);
  };
  PlanArgs plan_args;
  auto* s_plan = app.add_subcommand("plan", "Plan a group code inspection");
  s_plan->add_option("workbook", plan_args.workbook)->required();
  add_plan_options(s_plan, plan_args.cfg);
  add_common(s_plan, common);

  ReconcileArgs rec;
  auto* s_rec = app.add_subcommand("reconcile", "Merge inspector session files for a module");
  s_rec->add_option("workbook", rec.workbook)->required();
  s_rec->add_option("sessions", rec.sessions)->required();
  s_rec->add_option("--truth", rec.truth, "Seeded truth document for a yield report");
  add_plan_options(s_rec, rec.cfg);
  add_common(s_rec, common);

  DiffArgs diff_args;
  auto* s_diff = app.add_subcommand("diff", "Compare two workbooks cell by cell");
  s_diff->add_option("a", diff_args.a)->required();
  s_diff->add_option("b", diff_args.b)->required();
  add_common(s_diff, common);

  ThreeWayArgs tw;
  auto* s_tw = app.add_subcommand("threeway", "Check two independently edited copies");
  s_tw->add_option("base", tw.base)->required();
  s_tw->add_option("copy1", tw.copy1)->required();
  s_tw->add_option("copy2", tw.copy2)->required();
  add_common(s_tw, common);

  SnapshotArgs snap;
  auto* s_snap = app.add_subcommand("snapshot", "Record inputs and output values");
  s_snap->add_option("workbook", snap.workbook)->required();
  add_common(s_snap, common);

  RecheckArgs re;
  auto* s_re = app.add_subcommand("recheck", "Re-run a snapshot and compare outputs");
  s_re->add_option("workbook", re.workbook)->required();
  s_re->add_option("snapshot", re.snapshot)->required();
  add_common(s_re, common);

  SeedArgs seed;
  auto* s_seed = app.add_subcommand("seed", "Generate a synthetic workbook with seeded defects");
  s_seed->add_option("spec", seed.spec_path, "Seed specification document");
  s_seed->add_option("--out-dir", seed.out_dir)->capture_default_str();
  s_seed->add_option("--topology", seed.topology)
      ->check(CLI::IsMember({"chain", "tree", "grid"}));
  s_seed->add_option("--formulas", seed.formulas);
  s_seed->add_option("--inputs", seed.inputs);
  s_seed->add_option("--p", seed.p);
  s_seed->add_option("--seed", seed.seed);
  s_seed->add_option("--class", seed.defect_class, "Seed only this defect class");
  s_seed->add_flag("--clean", seed.clean_only, "Skip defect seeding");
  add_common(s_seed, common);

  McArgs mc;
  auto* s_mc = app.add_subcommand("mc", "Monte Carlo check of the risk closed forms");
  s_mc->add_option("--p", mc.p)->capture_default_str();
  s_mc->add_option("--U", mc.u)->capture_default_str();
  s_mc->add_option("--L", mc.l)->capture_default_str();
  s_mc->add_option("--trials", mc.trials)->capture_default_str();
  s_mc->add_option("--seed", mc.seed)->capture_default_str();
  s_mc->add_option("--defects", mc.defects, "Also run a detection experiment");
  s_mc->add_option("--yield", mc.yield)->capture_default_str();
  s_mc->add_option("--rounds", mc.rounds)->capture_default_str();
  add_common(s_mc, common);

  GraphArgs graph_args;
  auto* s_graph = app.add_subcommand("graph-dump", "Print precedent -> dependent edges");
  s_graph->add_option("workbook", graph_args.workbook)->required();
  add_common(s_graph, common);

  std::vector<const char*> argv{"gridaudit"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (s_audit->parsed()) return cmd_audit(audit, common, out, err);
    if (s_risk->parsed()) return cmd_risk(risk, common, out, err);
    if (s_plan->parsed()) return cmd_plan(plan_args, common, out, err);
    if (s_rec->parsed()) return cmd_reconcile(rec, common, out, err);
    if (s_diff->parsed()) return cmd_diff(diff_args, common, out, err);
    if (s_tw->parsed()) return cmd_threeway(tw, common, out, err);
    if (s_snap->parsed()) return cmd_snapshot(snap, common, out, err);
    if (s_re->parsed()) return cmd_recheck(re, common, out, err);
    if (s_seed->parsed()) return cmd_seed(seed, common, out, err);
    if (s_mc->parsed()) return cmd_mc(mc, common, out, err);
    if (s_graph->parsed()) return cmd_graph_dump(graph_args, common, out, err);
  } catch (const std::exception& e) {
    err << "gridaudit: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace gridaudit::cli
