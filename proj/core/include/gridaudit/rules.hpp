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

// Detector suite. Every enabled rule is run against every cell of the
// workbook; there is no sampling. The per-rule coverage counters in RuleRun
// make that checkable after the fact.

#ifndef GRIDAUDIT_RULES_HPP_
#define GRIDAUDIT_RULES_HPP_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "gridaudit/engine.hpp"
#include "gridaudit/formula.hpp"
#include "gridaudit/graph.hpp"
#include "gridaudit/model.hpp"

namespace gridaudit {

enum class Severity { kInfo, kWarning, kError };
enum class FindingClass { kHonestError, kFraudIndicator, kControlGap };

std::string_view severity_name(Severity s);
std::optional<Severity> severity_from_name(std::string_view name);
std::string_view finding_class_name(FindingClass c);
std::optional<FindingClass> finding_class_from_name(std::string_view name);

namespace rule_id {
inline constexpr std::string_view kNumAsText = "NUM_AS_TEXT";
inline constexpr std::string_view kHardwired = "HARDWIRED";
inline constexpr std::string_view kJammed = "JAMMED";
inline constexpr std::string_view kDupLiteral = "DUP_LITERAL";
inline constexpr std::string_view kLongFormula = "LONG_FORMULA";
inline constexpr std::string_view kLongArc = "LONG_ARC";
inline constexpr std::string_view kXsheetRef = "XSHEET_REF";
inline constexpr std::string_view kOrphanOutput = "ORPHAN_OUTPUT";
inline constexpr std::string_view kFlowViolation = "FLOW_VIOLATION";
inline constexpr std::string_view kUnprotectedFormula = "UNPROTECTED_FORMULA";
inline constexpr std::string_view kVersionName = "VERSION_NAME";
// Emitted when a detector itself fails on a cell.
inline constexpr std::string_view kInternalError = "INTERNAL_ERROR";
}  // namespace rule_id

struct RuleDescriptor {
  std::string_view id;
  Severity severity;
  FindingClass finding_class;
  std::string_view summary;
};

// The eleven detectors, in registration order.
const std::vector<RuleDescriptor>& registered_rules();
const RuleDescriptor* find_rule(std::string_view id);

struct Finding {
  std::string rule_id;
  Severity severity = Severity::kWarning;
  FindingClass finding_class = FindingClass::kHonestError;
  std::optional<CellAddress> location;  // nullopt: workbook-level
  std::string message;
  std::map<std::string, std::string> evidence;

  bool operator==(const Finding&) const = default;
};

struct Suppression {
  std::optional<CellAddress> location;  // nullopt: workbook-level
  std::string rule_id;

  bool operator==(const Suppression&) const = default;
};

// "Sheet!A1:RULE_ID" or "workbook:RULE_ID".
Suppression parse_suppression(std::string_view text);
std::string format_suppression(const Suppression& s);

struct RuleThresholds {
  int long_formula_tokens = 10;
  int long_arc_distance = 25;
  double dup_literal_min_magnitude = 2;
  std::vector<double> dup_literal_exclusions{0, 1};
  int min_run_length_for_hardwire = 3;

  bool operator==(const RuleThresholds&) const = default;
};

struct RuleConfig {
  std::set<std::string> enabled;  // empty set is filled with every rule
  RuleThresholds thresholds;
  std::map<std::string, Severity> severity_overrides;
  std::vector<Suppression> suppressions;
  Tolerance recheck_tolerance;

  static RuleConfig defaults();
  // Throws InvalidConfig.
  void validate() const;
};

RuleConfig parse_rule_config(std::string_view document);
std::string serialize_rule_config(const RuleConfig& cfg);

struct RuleCoverage {
  std::string rule_id;
  std::size_t applicable = 0;
  std::size_t examined = 0;

  bool operator==(const RuleCoverage&) const = default;
};

struct RuleRun {
  std::vector<Finding> findings;
  std::size_t suppressed_count = 0;
  std::vector<RuleCoverage> coverage;
  std::size_t total_cells = 0;
  std::size_t cross_sheet_refs = 0;

  // True when every enabled rule examined every applicable cell.
  bool coverage_complete() const;
  std::size_t count_at_least(Severity s) const;
};

RuleRun run_rules(const Workbook& wb, const FormulaIndex& index, const DepGraph& g,
                  const RuleConfig& cfg);
RuleRun run_rules(const Workbook& wb, const DepGraph& g, const RuleConfig& cfg);

// Deterministic order: workbook-level first, then sheet order, row, column,
// rule id.
void sort_findings(std::vector<Finding>& findings, const Workbook& wb);

}  // namespace gridaudit

#endif  // GRIDAUDIT_RULES_HPP_
