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

#include "gridaudit/rules.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <memory>
#include <regex>

#include "gridaudit/error.hpp"
#include "json_util.hpp"

namespace gridaudit {

std::string_view severity_name(Severity s) {
  switch (s) {
    case Severity::kInfo: return "info";
    case Severity::kWarning: return "warning";
    case Severity::kError: return "error";
  }
  return "info";
}

std::optional<Severity> severity_from_name(std::string_view name) {
  if (name == "info") return Severity::kInfo;
  if (name == "warning") return Severity::kWarning;
  if (name == "error") return Severity::kError;
  return std::nullopt;
}

std::string_view finding_class_name(FindingClass c) {
  switch (c) {
    case FindingClass::kHonestError: return "honest-error";
    case FindingClass::kFraudIndicator: return "fraud-indicator";
    case FindingClass::kControlGap: return "control-gap";
  }
  return "honest-error";
}

std::optional<FindingClass> finding_class_from_name(std::string_view name) {
  if (name == "honest-error") return FindingClass::kHonestError;
  if (name == "fraud-indicator") return FindingClass::kFraudIndicator;
  if (name == "control-gap") return FindingClass::kControlGap;
  return std::nullopt;
}

const std::vector<RuleDescriptor>& registered_rules() {
  static const std::vector<RuleDescriptor> kRules = {
      {rule_id::kNumAsText, Severity::kError, FindingClass::kFraudIndicator,
       "number stored as text where aggregates will skip it"},
      {rule_id::kHardwired, Severity::kError, FindingClass::kFraudIndicator,
       "constant typed over a cell inside a run of copied formulas"},
      {rule_id::kJammed, Severity::kWarning, FindingClass::kHonestError,
       "formula embeds two or more numbers"},
      {rule_id::kDupLiteral, Severity::kWarning, FindingClass::kHonestError,
       "same number typed into more than one place on a sheet"},
      {rule_id::kLongFormula, Severity::kWarning, FindingClass::kHonestError,
       "formula longer than the token threshold"},
      {rule_id::kLongArc, Severity::kWarning, FindingClass::kHonestError,
       "formula refers to a distant cell"},
      {rule_id::kXsheetRef, Severity::kInfo, FindingClass::kHonestError,
       "formula refers to another sheet"},
      {rule_id::kOrphanOutput, Severity::kWarning, FindingClass::kHonestError,
       "formula with no dependents that is not a declared output"},
      {rule_id::kFlowViolation, Severity::kInfo, FindingClass::kHonestError,
       "formula refers below or to the right of itself"},
      {rule_id::kUnprotectedFormula, Severity::kWarning, FindingClass::kControlGap,
       "formula cell is not locked"},
      {rule_id::kVersionName, Severity::kInfo, FindingClass::kControlGap,
       "workbook name lacks a version or date, or the date disagrees with the "
       "modification date"},
  };
  return kRules;
}

const RuleDescriptor* find_rule(std::string_view id) {
  for (const auto& r : registered_rules()) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

Suppression parse_suppression(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == text.size()) {
    throw Error(ErrorCode::kInvalidConfig,
                "suppression '" + std::string(text) + "' must look like Sheet!A1:RULE_ID");
  }
  Suppression s;
  s.rule_id = std::string(text.substr(colon + 1));
  const auto where = text.substr(0, colon);
  if (where != "workbook") {
    const A1Ref ref = parse_a1(where, "");
    s.location = ref.address;
  }
  return s;
}

std::string format_suppression(const Suppression& s) {
  return (s.location ? to_a1(*s.location) : std::string("workbook")) + ":" + s.rule_id;
}

RuleConfig RuleConfig::defaults() {
  RuleConfig cfg;
  for (const auto& r : registered_rules()) cfg.enabled.emplace(r.id);
  return cfg;
}

void RuleConfig::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::kInvalidConfig, what); };
  for (const auto& id : enabled) {
    if (!find_rule(id)) bad("unknown rule '" + id + "' in enabled set");
  }
  if (thresholds.long_formula_tokens <= 0) bad("longFormulaTokens must be positive");
  if (thresholds.long_arc_distance <= 0) bad("longArcDistance must be positive");
  if (!(thresholds.dup_literal_min_magnitude > 0)) bad("dupLiteralMinMagnitude must be positive");
  if (thresholds.min_run_length_for_hardwire <= 0) {
    bad("minRunLengthForHardwire must be positive");
  }
  for (const auto& [id, sev] : severity_overrides) {
    if (!find_rule(id)) bad("severity override for unknown rule '" + id + "'");
  }
  for (const auto& s : suppressions) {
    if (!find_rule(s.rule_id)) bad("suppression for unknown rule '" + s.rule_id + "'");
  }
  if (!(recheck_tolerance.relative >= 0) || !(recheck_tolerance.absolute >= 0)) {
    bad("recheck tolerances must be non-negative");
  }
}

RuleConfig parse_rule_config(std::string_view document) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::kInvalidConfig, "config must be an object");
  RuleConfig cfg = RuleConfig::defaults();
  try {
    if (doc.contains("enabled")) {
      cfg.enabled.clear();
      for (const auto& id : doc.at("enabled")) cfg.enabled.insert(id.get<std::string>());
    }
    if (doc.contains("thresholds")) {
      const auto& t = doc.at("thresholds");
      auto& th = cfg.thresholds;
      th.long_formula_tokens = t.value("longFormulaTokens", th.long_formula_tokens);
      th.long_arc_distance = t.value("longArcDistance", th.long_arc_distance);
      th.dup_literal_min_magnitude =
          t.value("dupLiteralMinMagnitude", th.dup_literal_min_magnitude);
      if (t.contains("dupLiteralExclusions")) {
        th.dup_literal_exclusions = t.at("dupLiteralExclusions").get<std::vector<double>>();
      }
      th.min_run_length_for_hardwire =
          t.value("minRunLengthForHardwire", th.min_run_length_for_hardwire);
    }
    if (doc.contains("severityOverrides")) {
      for (const auto& [id, sev] : doc.at("severityOverrides").items()) {
        auto s = severity_from_name(sev.get<std::string>());
        if (!s) throw Error(ErrorCode::kInvalidConfig, "bad severity for " + id);
        cfg.severity_overrides[id] = *s;
      }
    }
    if (doc.contains("suppressions")) {
      for (const auto& s : doc.at("suppressions")) {
        cfg.suppressions.push_back(parse_suppression(s.get<std::string>()));
      }
    }
    if (doc.contains("recheckTolerance")) {
      const auto& t = doc.at("recheckTolerance");
      cfg.recheck_tolerance.relative = t.value("relative", cfg.recheck_tolerance.relative);
      cfg.recheck_tolerance.absolute = t.value("absolute", cfg.recheck_tolerance.absolute);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("config: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidConfig) throw;
    throw Error(ErrorCode::kInvalidConfig, e.what());
  }
  cfg.validate();
  return cfg;
}

std::string serialize_rule_config(const RuleConfig& cfg) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  doc["enabled"] = cfg.enabled;
  nlohmann::ordered_json t = nlohmann::ordered_json::object();
  t["longFormulaTokens"] = cfg.thresholds.long_formula_tokens;
  t["longArcDistance"] = cfg.thresholds.long_arc_distance;
  t["dupLiteralMinMagnitude"] = cfg.thresholds.dup_literal_min_magnitude;
  t["dupLiteralExclusions"] = cfg.thresholds.dup_literal_exclusions;
  t["minRunLengthForHardwire"] = cfg.thresholds.min_run_length_for_hardwire;
  doc["thresholds"] = std::move(t);
  nlohmann::ordered_json sev = nlohmann::ordered_json::object();
  for (const auto& [id, s] : cfg.severity_overrides) sev[id] = std::string(severity_name(s));
  doc["severityOverrides"] = std::move(sev);
  nlohmann::ordered_json sup = nlohmann::ordered_json::array();
  for (const auto& s : cfg.suppressions) sup.push_back(format_suppression(s));
  doc["suppressions"] = std::move(sup);
  doc["recheckTolerance"] = {{"relative", cfg.recheck_tolerance.relative},
                             {"absolute", cfg.recheck_tolerance.absolute}};
  return doc.dump(2) + "\n";
}

bool RuleRun::coverage_complete() const {
  return std::all_of(coverage.begin(), coverage.end(),
                     [](const RuleCoverage& c) { return c.examined >= c.applicable; });
}

std::size_t RuleRun::count_at_least(Severity s) const {
  return static_cast<std::size_t>(std::count_if(
      findings.begin(), findings.end(), [s](const Finding& f) { return f.severity >= s; }));
}

void sort_findings(std::vector<Finding>& findings, const Workbook& wb) {
  const LocationOrder order(wb);
  std::stable_sort(findings.begin(), findings.end(), [&](const Finding& a, const Finding& b) {
    if (a.location.has_value() != b.location.has_value()) return !a.location.has_value();
    if (a.location && *a.location != *b.location) return order(*a.location, *b.location);
    if (a.rule_id != b.rule_id) return a.rule_id < b.rule_id;
    return a.message < b.message;
  });
}

// ---------------------------------------------------------------------------
// Shared per-run context

namespace {

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

class RuleContext {
 public:
  RuleContext(const Workbook& wb, const FormulaIndex& index, const DepGraph& g,
              const RuleConfig& cfg)
      : wb(wb), index(index), g(g), cfg(cfg) {
    build_aggregate_coverage();
    for (const auto& a : orphan_formulas(g, wb.meta.outputs)) orphans.insert(a);
    build_duplicate_literals();
  }

  const Workbook& wb;
  const FormulaIndex& index;
  const DepGraph& g;
  const RuleConfig& cfg;

  // Numeric-text cell -> aggregate formulas whose reference arguments cover it.
  std::map<CellAddress, std::vector<CellAddress>> aggregate_cover;
  std::set<CellAddress> orphans;

  struct DupInfo {
    double value = 0;
    std::vector<CellAddress> occurrences;
  };
  std::map<CellAddress, DupInfo> duplicates;

  const ValueMap& base_values() const {
    if (!base_values_) base_values_ = evaluate(wb, index, g);
    return *base_values_;
  }

 private:
  void build_aggregate_coverage() {
    std::map<std::string, std::vector<CellAddress>> numeric_text_by_sheet;
    for (const auto& sheet : wb.sheets) {
      for (const auto& [pos, cell] : sheet.cells) {
        if (numeric_text_value(cell)) {
          numeric_text_by_sheet[sheet.name].push_back({sheet.name, pos.row, pos.col});
        }
      }
    }
    if (numeric_text_by_sheet.empty()) return;
    for (const auto& pf : index.all()) {
      std::function<void(const Expr&)> walk = [&](const Expr& e) {
        if (e.kind == Expr::Kind::kCall && is_aggregate(e.function)) {
          for (const auto& arg : e.args) {
            if (arg.kind != Expr::Kind::kCellRef && arg.kind != Expr::Kind::kRangeRef) continue;
            const auto& a = arg.ref;
            const auto& b = arg.kind == Expr::Kind::kRangeRef ? arg.ref2 : arg.ref;
            auto it = numeric_text_by_sheet.find(a.sheet);
            if (it == numeric_text_by_sheet.end()) continue;
            for (const auto& cell : it->second) {
              if (cell.row >= a.row && cell.row <= b.row && cell.col >= a.col &&
                  cell.col <= b.col) {
                auto& hosts = aggregate_cover[cell];
                if (hosts.empty() || hosts.back() != pf.host) hosts.push_back(pf.host);
              }
            }
          }
        }
        for (const auto& arg : e.args) walk(arg);
      };
      walk(pf.ast.root);
    }
  }

  bool counts_as_literal(double v) const {
    const auto& th = cfg.thresholds;
    if (std::fabs(v) < th.dup_literal_min_magnitude) return false;
    return std::find(th.dup_literal_exclusions.begin(), th.dup_literal_exclusions.end(), v) ==
           th.dup_literal_exclusions.end();
  }

  // Copies of one formula count as a single source: the number was typed
  // once and then copied, which is repetition by reference, not retyping.
  void build_duplicate_literals() {
    for (const auto& sheet : wb.sheets) {
      struct Occ {
        CellAddress cell;
        std::string source;
      };
      std::map<double, std::vector<Occ>> by_value;
      for (const auto& [pos, cell] : sheet.cells) {
        const CellAddress addr{sheet.name, pos.row, pos.col};
        if (const auto* d = std::get_if<double>(&cell.content)) {
          if (cell.format != DeclaredFormat::kText && counts_as_literal(*d)) {
            by_value[*d].push_back({addr, "cell:" + to_a1(addr)});
          }
        } else if (cell.is_formula()) {
          const auto* pf = index.find(addr);
          std::vector<double> lits = pf->normal.literals;
          lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
          for (double v : lits) {
            if (counts_as_literal(v)) by_value[v].push_back({addr, "formula:" + pf->normal.text});
          }
        }
      }
      for (const auto& [value, occs] : by_value) {
        std::set<std::string> sources;
        for (const auto& o : occs) sources.insert(o.source);
        if (sources.size() < 2) continue;
        DupInfo info{value, {}};
        for (const auto& o : occs) info.occurrences.push_back(o.cell);
        for (const auto& o : occs) duplicates.emplace(o.cell, info);
      }
    }
  }

  mutable std::optional<ValueMap> base_values_;
};

// ---------------------------------------------------------------------------
// Rules

class Rule {
 public:
  explicit Rule(const RuleDescriptor& d) : desc_(d) {}
  virtual ~Rule() = default;

  const RuleDescriptor& descriptor() const { return desc_; }

  virtual void check_cell(const RuleContext& ctx, const CellAddress& at, const Cell& cell,
                          std::vector<Finding>& out) const = 0;
  virtual void check_workbook(const RuleContext&, std::vector<Finding>&) const {}

 protected:
  Finding make(std::optional<CellAddress> at, std::string message) const {
    Finding f;
    f.rule_id = std::string(desc_.id);
    f.severity = desc_.severity;
    f.finding_class = desc_.finding_class;
    f.location = std::move(at);
    f.message = std::move(message);
    return f;
  }

 private:
  const RuleDescriptor& desc_;
};

class NumAsTextRule : public Rule {
 public:
  using Rule::Rule;

  void check_cell(const RuleContext& ctx, const CellAddress& at, const Cell& cell,
                  std::vector<Finding>& out) const override {
    const auto value = numeric_text_value(cell);
    if (!value) return;
    const auto cover = ctx.aggregate_cover.find(at);
    const bool aggregated = cover != ctx.aggregate_cover.end();
    int numeric_neighbours = 0;
    const Sheet* sheet = ctx.wb.find_sheet(at.sheet);
    for (auto [dr, dc] : {std::pair{-1, 0}, {1, 0}, {0, -1}, {0, 1}}) {
      const Cell* n = sheet->find({at.row + dr, at.col + dc});
      if (n && n->is_number() && n->format != DeclaredFormat::kText) ++numeric_neighbours;
    }
    if (!aggregated && numeric_neighbours < 2) return;

    Finding f = make(at, "number " + format_number(*value) +
                             " is stored as text; aggregates skip it");
    f.evidence["coercedValue"] = format_number(*value);
    f.evidence["adjacentNumericConstants"] = std::to_string(numeric_neighbours);
    if (aggregated) {
      const auto& hosts = cover->second;
      Cell coerced = cell;
      coerced.content = *value;
      coerced.format.reset();
      const ValueMap& before = ctx.base_values();
      const ValueMap after = reevaluate(ctx.wb, ctx.index, ctx.g, before, at, coerced);
      std::vector<std::string> names;
      std::vector<std::string> per;
      std::string primary = "n/a";
      for (const auto& h : hosts) {
        names.push_back(to_a1(h));
        const Value& b = before.at(h);
        const Value& a = after.at(h);
        std::string delta = "n/a";
        if (a.is_number() && b.is_number()) delta = format_number(a.as_number() - b.as_number());
        per.push_back(to_a1(h) + "=" + delta);
        if (&h == &hosts.front()) primary = delta;
      }
      f.evidence["aggregates"] = join(names, ",");
      f.evidence["understatement"] = primary;
      f.evidence["understatementByAggregate"] = join(per, ";");
    }
    out.push_back(std::move(f));
  }
};

class HardwiredRule : public Rule {
 public:
  using Rule::Rule;

  void check_cell(const RuleContext& ctx, const CellAddress& at, const Cell& cell,
                  std::vector<Finding>& out) const override {
    if (cell.is_formula()) return;
    const int min_run = ctx.cfg.thresholds.min_run_length_for_hardwire;
    for (const bool along_row : {true, false}) {
      const std::int64_t dr = along_row ? 0 : 1;
      const std::int64_t dc = along_row ? 1 : 0;
      const auto* before = formula_at(ctx, at, -dr, -dc, 1);
      const auto* after = formula_at(ctx, at, dr, dc, 1);
      if (!before || !after || before->normal.text != after->normal.text) continue;
      const auto& form = before->normal.text;
      std::int64_t left = 0;
      while (const auto* pf = formula_at(ctx, at, -dr, -dc, left + 1)) {
        if (pf->normal.text != form) break;
        ++left;
      }
      std::int64_t right = 0;
      while (const auto* pf = formula_at(ctx, at, dr, dc, right + 1)) {
        if (pf->normal.text != form) break;
        ++right;
      }
      const std::int64_t length = left + 1 + right;
      if (length < min_run) continue;
      const GridPos first{at.row - dr * left, at.col - dc * left};
      const GridPos last{at.row + dr * right, at.col + dc * right};
      const auto shown = cell.is_number() ? format_number(std::get<double>(cell.content))
                         : cell.is_text() ? "\"" + std::get<std::string>(cell.content) + "\""
                         : (std::get<bool>(cell.content) ? "TRUE" : "FALSE");
      Finding f = make(at, "constant " + shown + " interrupts a run of " +
                               std::to_string(length) + " copies of " + form);
      f.evidence["normalForm"] = form;
      f.evidence["value"] = shown;
      f.evidence["axis"] = along_row ? "row" : "column";
      f.evidence["run"] = to_a1(first) + ":" + to_a1(last);
      f.evidence["runLength"] = std::to_string(length);
      out.push_back(std::move(f));
      return;
    }
  }

 private:
  static const ParsedFormula* formula_at(const RuleContext& ctx, const CellAddress& at,
                                         std::int64_t dr, std::int64_t dc, std::int64_t k) {
    const auto row = at.row + dr * k;
    const auto col = at.col + dc * k;
    if (!in_grid(row, col)) return nullptr;
    return ctx.index.find({at.sheet, row, col});
  }
};

class JammedRule : public Rule {
 public:
  using Rule::Rule;

  void check_cell(const RuleContext& ctx, const CellAddress& at, const Cell& cell,
                  std::vector<Finding>& out) const override {
    if (!cell.is_formula()) return;
    const auto* pf = ctx.index.find(at);
    if (pf->metrics.literal_count < 2) return;
    std::vector<std::string> lits;
    for (double v : number_literals(pf->ast.root)) lits.push_back(format_number(v));
    Finding f = make(at, "formula embeds " + std::to_string(lits.size()) +
                             " numbers; put inputs in labelled cells");
    f.evidence["literals"] = join(lits, ",");
    out.push_back(std::move(f));
  }
};

class DupLiteralRule : public Rule {
 public:
  using Rule::Rule;

  void check_cell(const RuleContext& ctx, const CellAddress& at, const Cell&,
                  std::vector<Finding>& out) const override {
    auto it = ctx.duplicates.find(at);
    if (it == ctx.duplicates.end()) return;
    const auto& info = it->second;
    std::vector<std::string> cells;
    for (const auto& c : info.occurrences) cells.push_back(to_a1(c, false));
    Finding f = make(at, "number " + format_number(info.value) + " is typed in " +
                             std::to_string(info.occurrences.size()) +
                             " places on this sheet; type it once and refer to it");
    f.evidence["value"] = format_number(info.value);
    f.evidence["occurrences"] = join(cells, ",");
    f.evidence["occurrenceCount"] = std::to_string(info.occurrences.size());
    out.push_back(std::move(f));
  }
};

class LongFormulaRule : public Rule {
 public:
  using Rule::Rule;

  void check_cell(const RuleContext& ctx, const CellAddress& at, const Cell& cell,
                  std::vector<Finding>& out) const override {
    if (!cell.is_formula()) return;
    const auto* pf = ctx.index.find(at);
    const int limit = ctx.cfg.thresholds.long_formula_tokens;
    if (pf->metrics.token_count <= limit) return;
    Finding f = make(at, "formula has " + std::to_string(pf->metrics.token_count) +
                             " tokens (limit " + std::to_string(limit) + ")");
    f.evidence["tokenCount"] = std::to_string(pf->metrics.token_count);
    f.evidence["threshold"] = std::to_string(limit);
    out.push_back(std::move(f));
  }
};

class LongArcRule : public Rule {
 public:
  using Rule::Rule;

  void check_cell(const RuleContext& ctx, const CellAddress& at, const Cell& cell,
                  std::vector<Finding>& out) const override {
    if (!cell.is_formula()) return;
    const auto* pf = ctx.index.find(at);
    const int limit = ctx.cfg.thresholds.long_arc_distance;
    if (pf->metrics.max_ref_distance <= limit) return;
    // Report the farthest reference; off-axis arcs are the harder ones to
    // follow on screen.
    RefOffset worst;
    std::int64_t worst_distance = -1;
    bool any_off_axis_long = false;
    for_each_reference(pf->ast.root, [&](const Expr& r) {
      if (r.ref.sheet != at.sheet) return;
      const auto off = nearest_offset(r, at);
      const auto d = std::max(std::llabs(off.drow), std::llabs(off.dcol));
      if (d > limit && off.drow != 0 && off.dcol != 0) any_off_axis_long = true;
      if (d > worst_distance) {
        worst_distance = d;
        worst = off;
      }
    });
    Finding f = make(at, "formula refers to a cell " + std::to_string(worst_distance) +
                             " cells away (limit " + std::to_string(limit) + ")" +
                             (any_off_axis_long ? ", off-axis" : ""));
    f.evidence["distance"] = std::to_string(worst_distance);
    f.evidence["drow"] = std::to_string(worst.drow);
    f.evidence["dcol"] = std::to_string(worst.dcol);
    f.evidence["offAxis"] = any_off_axis_long ? "true" : "false";
    out.push_back(std::move(f));
  }
};

class XsheetRefRule : public Rule {
 public:
  using Rule::Rule;

  void check_cell(const RuleContext& ctx, const CellAddress& at, const Cell& cell,
                  std::vector<Finding>& out) const override {
    if (!cell.is_formula()) return;
    const auto* pf = ctx.index.find(at);
    if (pf->metrics.cross_sheet_ref_count == 0) return;
    std::set<std::string> sheets;
    for_each_reference(pf->ast.root, [&](const Expr& r) {
      if (r.ref.sheet != at.sheet) sheets.insert(r.ref.sheet);
    });
    Finding f = make(at, "formula refers to " +
                             std::to_string(pf->metrics.cross_sheet_ref_count) +
                             " cell(s) on other sheets");
    f.evidence["crossSheetRefs"] = std::to_string(pf->metrics.cross_sheet_ref_count);
    f.evidence["sheets"] = join({sheets.begin(), sheets.end()}, ",");
    out.push_back(std::move(f));
  }
};

class OrphanOutputRule : public Rule {
 public:
  using Rule::Rule;

  void check_cell(const RuleContext& ctx, const CellAddress& at, const Cell&,
                  std::vector<Finding>& out) const override {
    if (!ctx.orphans.count(at)) return;
    Finding f = make(at, "nothing refers to this formula and it is not a declared output");
    f.evidence["dependents"] = "0";
    out.push_back(std::move(f));
  }
};

class FlowViolationRule : public Rule {
 public:
  using Rule::Rule;

  void check_cell(const RuleContext& ctx, const CellAddress& at, const Cell& cell,
                  std::vector<Finding>& out) const override {
    if (!cell.is_formula()) return;
    const auto* pf = ctx.index.find(at);
    std::vector<std::string> offending;
    for_each_reference(pf->ast.root, [&](const Expr& r) {
      if (r.ref.sheet != at.sheet) return;
      const auto& last = r.kind == Expr::Kind::kRangeRef ? r.ref2 : r.ref;
      const bool below = last.row > at.row;
      const bool right = last.row == at.row && last.col > at.col;
      if (below || right) {
        std::string text = column_letters(r.ref.col) + std::to_string(r.ref.row);
        if (r.kind == Expr::Kind::kRangeRef) {
          text += ":" + column_letters(r.ref2.col) + std::to_string(r.ref2.row);
        }
        offending.push_back(text);
      }
    });
    if (offending.empty()) return;
    Finding f = make(at, "formula refers below or to the right of itself");
    f.evidence["references"] = join(offending, ",");
    out.push_back(std::move(f));
  }
};

class UnprotectedFormulaRule : public Rule {
 public:
  using Rule::Rule;

  void check_cell(const RuleContext& ctx, const CellAddress& at, const Cell& cell,
                  std::vector<Finding>& out) const override {
    if (!cell.is_formula() || cell.locked) return;
    Finding f = make(at, ctx.wb.meta.protection_enabled
                             ? "formula cell is not locked"
                             : "formula cell is not locked and sheet protection is off");
    if (!ctx.wb.meta.protection_enabled) f.severity = Severity::kError;
    f.evidence["protectionEnabled"] = ctx.wb.meta.protection_enabled ? "true" : "false";
    out.push_back(std::move(f));
  }
};

class VersionNameRule : public Rule {
 public:
  using Rule::Rule;

  void check_cell(const RuleContext&, const CellAddress&, const Cell&,
                  std::vector<Finding>&) const override {}

  void check_workbook(const RuleContext& ctx, std::vector<Finding>& out) const override {
    static const std::regex kVersion("(^|[^A-Za-z0-9])[vV][0-9]+([^0-9]|$)");
    static const std::regex kDate("([0-9]{4}-[0-9]{2}-[0-9]{2})");
    const auto& name = ctx.wb.name;
    std::vector<std::string> problems;
    const bool has_version = std::regex_search(name, kVersion);
    if (!has_version) problems.push_back("no version token (v<digits>)");
    std::smatch m;
    std::string embedded;
    if (std::regex_search(name, m, kDate)) {
      embedded = m[1].str();
    } else {
      problems.push_back("no date token (YYYY-MM-DD)");
    }
    const std::string modified = ctx.wb.meta.modified.substr(0, 10);
    if (!embedded.empty() && embedded != modified) {
      problems.push_back("name date " + embedded + " differs from modification date " +
                         (modified.empty() ? std::string("(none)") : modified));
    }
    if (problems.empty()) return;
    Finding f = make(std::nullopt, "workbook name '" + name + "': " + join(problems, "; "));
    f.evidence["name"] = name;
    f.evidence["modified"] = ctx.wb.meta.modified;
    f.evidence["problems"] = join(problems, "; ");
    out.push_back(std::move(f));
  }
};

std::unique_ptr<Rule> make_rule(const RuleDescriptor& d) {
  const auto id = d.id;
  if (id == rule_id::kNumAsText) return std::make_unique<NumAsTextRule>(d);
  if (id == rule_id::kHardwired) return std::make_unique<HardwiredRule>(d);
  if (id == rule_id::kJammed) return std::make_unique<JammedRule>(d);
  if (id == rule_id::kDupLiteral) return std::make_unique<DupLiteralRule>(d);
  if (id == rule_id::kLongFormula) return std::make_unique<LongFormulaRule>(d);
  if (id == rule_id::kLongArc) return std::make_unique<LongArcRule>(d);
  if (id == rule_id::kXsheetRef) return std::make_unique<XsheetRefRule>(d);
  if (id == rule_id::kOrphanOutput) return std::make_unique<OrphanOutputRule>(d);
  if (id == rule_id::kFlowViolation) return std::make_unique<FlowViolationRule>(d);
  if (id == rule_id::kUnprotectedFormula) return std::make_unique<UnprotectedFormulaRule>(d);
  return std::make_unique<VersionNameRule>(d);
}

Finding internal_error(std::string_view rule, std::optional<CellAddress> at,
                       const std::string& what) {
  Finding f;
  f.rule_id = std::string(rule_id::kInternalError);
  f.severity = Severity::kError;
  f.finding_class = FindingClass::kHonestError;
  f.location = std::move(at);
  f.message = "rule " + std::string(rule) + " failed: " + what;
  f.evidence["rule"] = std::string(rule);
  return f;
}

}  // namespace

RuleRun run_rules(const Workbook& wb, const FormulaIndex& index, const DepGraph& g,
                  const RuleConfig& cfg_in) {
  RuleConfig cfg = cfg_in;
  if (cfg.enabled.empty()) cfg.enabled = RuleConfig::defaults().enabled;
  cfg.validate();
  const RuleContext ctx(wb, index, g, cfg);

  RuleRun run;
  run.total_cells = wb.cell_count();
  for (const auto& pf : index.all()) run.cross_sheet_refs += pf.metrics.cross_sheet_ref_count;

  std::vector<Finding> raw;
  for (const auto& desc : registered_rules()) {
    if (!cfg.enabled.count(std::string(desc.id))) continue;
    const auto rule = make_rule(desc);
    RuleCoverage cov{std::string(desc.id), run.total_cells, 0};
    for (const auto& sheet : wb.sheets) {
      for (const auto& [pos, cell] : sheet.cells) {
        const CellAddress at{sheet.name, pos.row, pos.col};
        try {
          rule->check_cell(ctx, at, cell, raw);
          ++cov.examined;
        } catch (const std::exception& e) {
          raw.push_back(internal_error(desc.id, at, e.what()));
        }
      }
    }
    try {
      rule->check_workbook(ctx, raw);
    } catch (const std::exception& e) {
      raw.push_back(internal_error(desc.id, std::nullopt, e.what()));
    }
    run.coverage.push_back(std::move(cov));
  }

  for (auto& f : raw) {
    if (auto it = cfg.severity_overrides.find(f.rule_id); it != cfg.severity_overrides.end()) {
      f.severity = it->second;
    }
    const bool suppressed =
        std::any_of(cfg.suppressions.begin(), cfg.suppressions.end(),
                    [&](const Suppression& s) {
                      return s.rule_id == f.rule_id && s.location == f.location;
                    });
    if (suppressed) {
      ++run.suppressed_count;
    } else {
      run.findings.push_back(std::move(f));
    }
  }
  sort_findings(run.findings, wb);
  return run;
}

RuleRun run_rules(const Workbook& wb, const DepGraph& g, const RuleConfig& cfg) {
  return run_rules(wb, FormulaIndex(wb), g, cfg);
}

}  // namespace gridaudit
