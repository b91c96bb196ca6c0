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

// Audit report: the combined output of graph, rules and risk for one
// workbook, with a lossless machine form and a line-oriented text form.

#ifndef GRIDAUDIT_REPORT_HPP_
#define GRIDAUDIT_REPORT_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "gridaudit/graph.hpp"
#include "gridaudit/risk.hpp"
#include "gridaudit/rules.hpp"

namespace gridaudit {

struct ChainSummary {
  std::size_t longest_chain_length = 0;
  std::vector<OutputClosure> closures;
  std::vector<std::vector<CellAddress>> cycles;

  bool operator==(const ChainSummary& o) const;
};

struct AuditReport {
  std::string tool_version;
  std::string workbook_name;
  std::string workbook_modified;
  std::string generated_at;
  std::size_t total_cells = 0;
  std::size_t formula_cells = 0;
  std::vector<Finding> findings;
  std::size_t suppressed_count = 0;
  std::vector<RuleCoverage> coverage;
  bool coverage_complete = true;
  ChainSummary chains;
  RiskReport risk;

  bool operator==(const AuditReport&) const = default;
};

// Runs graph, rules and risk. `generated_at` is written verbatim.
AuditReport build_audit_report(const Workbook& wb, const RuleConfig& cfg,
                               const RiskParams& params, std::string generated_at);

std::string serialize_risk_report(const RiskReport& r);
std::string serialize_report(const AuditReport& r);
// Throws MalformedDocument.
AuditReport parse_report(std::string_view document);

std::string render_risk_text(const RiskReport& r);
std::string render_report_text(const AuditReport& r);

}  // namespace gridaudit

#endif  // GRIDAUDIT_REPORT_HPP_
