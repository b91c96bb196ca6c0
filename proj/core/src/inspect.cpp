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

#include "gridaudit/inspect.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "gridaudit/error.hpp"
#include "json_util.hpp"

namespace gridaudit {

double effective_cells(int token_count, const PlanConfig& cfg) {
  return 1 + cfg.long_formula_factor * std::max(0, token_count - cfg.long_formula_tokens);
}

bool InspectionModule::contains(const CellAddress& a) const {
  return std::find(cells.begin(), cells.end(), a) != cells.end();
}

const InspectionModule* InspectionPlan::find(std::string_view module_id) const {
  for (const auto& m : modules) {
    if (m.id == module_id) return &m;
  }
  return nullptr;
}

double InspectionPlan::total_minutes() const {
  double t = 0;
  for (const auto& m : modules) t += m.estimated_minutes;
  return t;
}

InspectionPlan plan(const Workbook& /*wb*/, const FormulaIndex& index, const PlanConfig& cfg,
                    const RiskParams& risk) {
  if (cfg.target_module_size < 1) {
    throw Error(ErrorCode::kInvalidArgument, "target module size must be >= 1");
  }
  if (!(cfg.rate_cap > 0) || !(cfg.session_cap_minutes > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "rate cap and session cap must be positive");
  }
  if (cfg.team_size < 1) {
    throw Error(ErrorCode::kInvalidTeamSize,
                "team size " + std::to_string(cfg.team_size) + " is below 1");
  }
  InspectionPlan out;
  out.team_size = cfg.team_size;
  out.rate_cap = cfg.rate_cap;
  out.session_cap_minutes = cfg.session_cap_minutes;
  out.rounds = cfg.rounds;
  if (cfg.team_size < 3 && !cfg.allow_small_team) {
    out.warnings.push_back("team size " + std::to_string(cfg.team_size) +
                           " raised to 3; pass the small-team override to keep it");
    out.team_size = 3;
  }

  const auto minutes = [&](double eff) { return 60 * eff / cfg.rate_cap; };
  // FormulaIndex lists formulas sheet by sheet, row-major.
  InspectionModule cur;
  auto flush = [&] {
    if (cur.cells.empty()) return;
    cur.id = "M" + std::to_string(out.modules.size() + 1);
    cur.estimated_minutes = minutes(cur.effective_cells);
    out.modules.push_back(std::move(cur));
    cur = InspectionModule{};
  };
  double tokens = 0;
  for (const auto& pf : index.all()) {
    tokens += pf.metrics.token_count;
    const double eff = effective_cells(pf.metrics.token_count, cfg);
    const bool fits = !cur.cells.empty() && cur.sheet == pf.host.sheet &&
                      static_cast<int>(cur.cells.size()) < cfg.target_module_size &&
                      minutes(cur.effective_cells + eff) <= cfg.session_cap_minutes;
    if (!fits) flush();
    cur.sheet = pf.host.sheet;
    cur.cells.push_back(pf.host);
    cur.effective_cells += eff;
    if (minutes(eff) > cfg.session_cap_minutes) {
      cur.over_cap = true;
      out.warnings.push_back("formula " + to_a1(pf.host) +
                             " alone needs more than one session");
    }
  }
  flush();

  const double mean_tokens = index.size() ? tokens / static_cast<double>(index.size()) : 0;
  const double pe = std::min(1.0, risk.p * complexity_multiplier(mean_tokens, risk));
  out.rounds_recommended =
      rounds_to_band(pe, detection_yield(out.team_size, risk), risk);
  return out;
}

InspectionPlan plan(const Workbook& wb, const PlanConfig& cfg) {
  return plan(wb, FormulaIndex(wb), cfg);
}

std::string serialize_plan(const InspectionPlan& p) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  doc["teamSize"] = p.team_size;
  doc["rateCap"] = json_number(p.rate_cap);
  doc["sessionCapMinutes"] = json_number(p.session_cap_minutes);
  doc["rounds"] = p.rounds;
  doc["roundsRecommended"] = p.rounds_recommended;
  doc["totalMinutes"] = json_number(p.total_minutes());
  auto mods = nlohmann::ordered_json::array();
  for (const auto& m : p.modules) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    j["id"] = m.id;
    j["sheet"] = m.sheet;
    j["formulaCount"] = m.formula_count();
    j["effectiveCells"] = json_number(m.effective_cells);
    j["estimatedMinutes"] = json_number(m.estimated_minutes);
    j["overCap"] = m.over_cap;
    auto cells = nlohmann::ordered_json::array();
    for (const auto& c : m.cells) cells.push_back(to_a1(c.pos()));
    j["cells"] = std::move(cells);
    mods.push_back(std::move(j));
  }
  doc["modules"] = std::move(mods);
  doc["warnings"] = p.warnings;
  return doc.dump(2) + "\n";
}

std::string session_file_name(std::string_view workbook, std::string_view module_id,
                              std::string_view inspector_id) {
  std::string out(workbook);
  out += '.';
  out += module_id;
  out += '.';
  out += inspector_id;
  out += ".session";
  return out;
}

std::string serialize_session(const SessionFindings& s) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  doc["inspectorId"] = s.inspector_id;
  doc["moduleId"] = s.module_id;
  doc["durationMinutes"] = json_number(s.duration_minutes);
  auto items = nlohmann::ordered_json::array();
  for (const auto& it : s.items) {
    items.push_back({{"cell", to_a1(it.cell, true)},
                     {"note", it.note},
                     {"suspectedClass", it.suspected_class}});
  }
  doc["items"] = std::move(items);
  return doc.dump(2) + "\n";
}

SessionFindings parse_session(std::string_view document) {
  const auto doc = parse_json_document(document, "session");
  SessionFindings s;
  s.inspector_id = require<std::string>(doc, "inspectorId", "session");
  s.module_id = require<std::string>(doc, "moduleId", "session");
  s.duration_minutes = require<double>(doc, "durationMinutes", "session");
  if (!(s.duration_minutes > 0)) {
    throw Error(ErrorCode::kMalformedDocument, "session: durationMinutes must be positive");
  }
  const auto& items = doc.contains("items") ? doc.at("items") : nlohmann::json::array();
  if (!items.is_array()) throw Error(ErrorCode::kMalformedDocument, "session: bad items");
  for (const auto& j : items) {
    InspectionItem it;
    const auto cell = require<std::string>(j, "cell", "session item");
    const A1Ref ref = parse_a1(cell, "");
    if (!ref.qualified) {
      throw Error(ErrorCode::kMalformedDocument,
                  "session item cell '" + cell + "' must name its sheet");
    }
    it.cell = ref.address;
    it.note = optional_field<std::string>(j, "note", "", "session item");
    it.suspected_class = optional_field<std::string>(j, "suspectedClass", "", "session item");
    s.items.push_back(std::move(it));
  }
  return s;
}

namespace {

using ItemKey = std::pair<CellAddress, std::string>;

ItemKey key_of(const InspectionItem& it) { return {it.cell, it.suspected_class}; }

}  // namespace

Reconciliation reconcile(const std::vector<SessionFindings>& sessions,
                         const InspectionModule& module, double rate_cap) {
  if (sessions.empty()) throw Error(ErrorCode::kInvalidArgument, "no sessions to reconcile");
  Reconciliation out;
  out.module_id = module.id;
  const std::set<CellAddress> in_module(module.cells.begin(), module.cells.end());
  std::map<ItemKey, InspectionItem> merged;
  std::vector<std::set<ItemKey>> keys;
  for (const auto& s : sessions) {
    if (s.module_id != module.id) {
      throw Error(ErrorCode::kModuleMismatch, "session of inspector '" + s.inspector_id +
                                                  "' is for module " + s.module_id +
                                                  ", expected " + module.id);
    }
    if (!(s.duration_minutes > 0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "session of inspector '" + s.inspector_id + "' has no duration");
    }
    std::set<ItemKey> mine;
    for (const auto& it : s.items) {
      if (!in_module.count(it.cell)) {
        throw Error(ErrorCode::kModuleMismatch,
                    "cell " + to_a1(it.cell) + " is not in module " + module.id);
      }
      mine.insert(key_of(it));
      merged.emplace(key_of(it), it);
    }
    out.inspectors.push_back(s.inspector_id);
    out.per_inspector_counts[s.inspector_id] += mine.size();
    keys.push_back(std::move(mine));

    RateCheck rc;
    rc.inspector_id = s.inspector_id;
    rc.implied_rate = module.effective_cells * 60 / s.duration_minutes;
    rc.hasty = rc.implied_rate > 1.5 * rate_cap;
    out.rate_checks.push_back(rc);
  }
  for (auto& [k, it] : merged) out.union_items.push_back(it);

  const std::size_t n = keys.size();
  out.overlap.assign(n, std::vector<std::size_t>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t shared = 0;
      for (const auto& k : keys[i]) shared += keys[j].count(k);
      out.overlap[i][j] = shared;
    }
  }
  return out;
}

YieldReport yield_report(const std::vector<InspectionItem>& found,
                         const std::vector<CellAddress>& truth) {
  if (truth.empty()) throw Error(ErrorCode::kEmptyTruth, "no seeded defects to score against");
  std::set<CellAddress> hit;
  for (const auto& it : found) hit.insert(it.cell);
  const std::set<CellAddress> unique_truth(truth.begin(), truth.end());
  YieldReport r;
  for (const auto& t : unique_truth) (hit.count(t) ? r.detected : r.missed).push_back(t);
  r.yield_fraction =
      static_cast<double>(r.detected.size()) / static_cast<double>(unique_truth.size());
  return r;
}

}  // namespace gridaudit
