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

// Code-inspection planning and multi-inspector reconciliation.

#ifndef GRIDAUDIT_INSPECT_HPP_
#define GRIDAUDIT_INSPECT_HPP_

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "gridaudit/formula.hpp"
#include "gridaudit/model.hpp"
#include "gridaudit/risk.hpp"

namespace gridaudit {

struct PlanConfig {
  int target_module_size = 150;  // formula cells
  double rate_cap = 100;         // effective cells per hour
  int team_size = 3;
  int rounds = 3;
  double session_cap_minutes = 120;
  int long_formula_tokens = 10;
  double long_formula_factor = 0.5;  // extra effective cells per excess token
  bool allow_small_team = false;
};

double effective_cells(int token_count, const PlanConfig& cfg = {});

struct InspectionModule {
  std::string id;  // "M1", "M2", ...
  std::string sheet;
  std::vector<CellAddress> cells;  // formula cells, row-major
  double effective_cells = 0;
  double estimated_minutes = 0;
  // A single formula whose own budget is above the session cap.
  bool over_cap = false;

  std::size_t formula_count() const { return cells.size(); }
  bool contains(const CellAddress& a) const;
};

struct InspectionPlan {
  std::vector<InspectionModule> modules;
  int team_size = 3;
  double rate_cap = 100;
  double session_cap_minutes = 120;
  int rounds = 3;
  int rounds_recommended = 0;
  std::vector<std::string> warnings;

  const InspectionModule* find(std::string_view module_id) const;
  double total_minutes() const;
};

InspectionPlan plan(const Workbook& wb, const FormulaIndex& index, const PlanConfig& cfg = {},
                    const RiskParams& risk = {});
InspectionPlan plan(const Workbook& wb, const PlanConfig& cfg = {});

std::string serialize_plan(const InspectionPlan& p);

struct InspectionItem {
  CellAddress cell;
  std::string note;
  std::string suspected_class;

  bool operator==(const InspectionItem&) const = default;
};

struct SessionFindings {
  std::string inspector_id;
  std::string module_id;
  std::vector<InspectionItem> items;
  double duration_minutes = 0;

  bool operator==(const SessionFindings&) const = default;
};

std::string session_file_name(std::string_view workbook, std::string_view module_id,
                              std::string_view inspector_id);
std::string serialize_session(const SessionFindings& s);
// Throws MalformedDocument.
SessionFindings parse_session(std::string_view document);

struct RateCheck {
  std::string inspector_id;
  double implied_rate = 0;  // effective cells per hour
  bool hasty = false;
};

struct Reconciliation {
  std::string module_id;
  std::vector<InspectionItem> union_items;  // keyed by (cell, class)
  std::vector<std::string> inspectors;      // input order
  std::map<std::string, std::size_t> per_inspector_counts;
  std::vector<std::vector<std::size_t>> overlap;  // [i][j] shared items
  std::vector<RateCheck> rate_checks;
};

// Throws ModuleMismatch when sessions name different modules, a module other
// than `module`, or cells outside it; InvalidArgument on an empty list or a
// non-positive duration.
Reconciliation reconcile(const std::vector<SessionFindings>& sessions,
                         const InspectionModule& module, double rate_cap = 100);

struct YieldReport {
  std::vector<CellAddress> detected;
  std::vector<CellAddress> missed;
  double yield_fraction = 0;
};

// Matches by cell. Throws EmptyTruth.
YieldReport yield_report(const std::vector<InspectionItem>& found,
                         const std::vector<CellAddress>& truth);

}  // namespace gridaudit

#endif  // GRIDAUDIT_INSPECT_HPP_
