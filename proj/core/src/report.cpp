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

#include "gridaudit/report.hpp"

#include <iomanip>
#include <sstream>

#include "gridaudit/error.hpp"
#include "gridaudit/version.hpp"
#include "json_util.hpp"

namespace gridaudit {

bool ChainSummary::operator==(const ChainSummary& o) const {
  if (longest_chain_length != o.longest_chain_length || cycles != o.cycles ||
      closures.size() != o.closures.size()) {
    return false;
  }
  for (std::size_t i = 0; i < closures.size(); ++i) {
    if (closures[i].output != o.closures[i].output ||
        closures[i].closure_size != o.closures[i].closure_size) {
      return false;
    }
  }
  return true;
}

AuditReport build_audit_report(const Workbook& wb, const RuleConfig& cfg,
                               const RiskParams& params, std::string generated_at) {
  const FormulaIndex index(wb);
  const DepGraph g = build_graph(wb, index);
  RuleRun run = run_rules(wb, index, g, cfg);

  AuditReport r;
  r.tool_version = kVersion;
  r.workbook_name = wb.name;
  r.workbook_modified = wb.meta.modified;
  r.generated_at = std::move(generated_at);
  r.total_cells = run.total_cells;
  r.formula_cells = index.size();
  r.suppressed_count = run.suppressed_count;
  r.coverage = run.coverage;
  r.coverage_complete = run.coverage_complete();
  std::size_t fraud = 0;
  for (const auto& f : run.findings) fraud += f.finding_class == FindingClass::kFraudIndicator;
  r.findings = std::move(run.findings);

  ChainStats stats = chain_stats(g, wb.meta.outputs);
  r.chains.longest_chain_length = stats.longest_chain_length;
  r.chains.closures = std::move(stats.closures);
  r.chains.cycles = std::move(stats.cycles);
  r.risk = assess(wb, index, g, params, fraud);
  return r;
}

// ---------------------------------------------------------------------------
// Machine form

namespace {

using ojson = nlohmann::ordered_json;
using json = nlohmann::json;

const std::string kWhat = "report";

ojson address_json(const std::optional<CellAddress>& a) {
  return a ? ojson(to_a1(*a, true)) : ojson(nullptr);
}

CellAddress address_from(const json& j) {
  return parse_a1(j.get<std::string>(), "").address;
}

ojson params_json(const RiskParams& p) {
  ojson j = ojson::object();
  j["p"] = p.p;
  j["pAudit"] = p.p_audit;
  j["seriousFraction"] = p.serious_fraction;
  j["materiality"] = p.materiality;
  ojson table = ojson::object();
  for (const auto& [k, d] : p.yield_table) table[std::to_string(k)] = d;
  j["yieldTable"] = std::move(table);
  j["genericYield"] = p.generic_yield;
  j["residualTargetBand"] = {p.residual_band_low, p.residual_band_high};
  j["complexityDivisor"] = json_number(p.complexity_divisor);
  j["complexityCap"] = json_number(p.complexity_cap);
  j["teamSize"] = p.team_size;
  j["rounds"] = p.rounds;
  j["weights"] = {{"size", json_number(p.weights.size)},
                  {"complexity", json_number(p.weights.complexity)},
                  {"chain", json_number(p.weights.chain)},
                  {"crossSheet", json_number(p.weights.cross_sheet)},
                  {"fraud", json_number(p.weights.fraud)}};
  return j;
}

RiskParams params_from(const json& j) {
  RiskParams p;
  p.p = j.at("p").get<double>();
  p.p_audit = j.at("pAudit").get<double>();
  p.serious_fraction = j.at("seriousFraction").get<double>();
  p.materiality = j.at("materiality").get<double>();
  p.yield_table.clear();
  for (const auto& [k, d] : j.at("yieldTable").items()) {
    p.yield_table[std::stoi(k)] = d.get<double>();
  }
  p.generic_yield = j.at("genericYield").get<double>();
  p.residual_band_low = j.at("residualTargetBand").at(0).get<double>();
  p.residual_band_high = j.at("residualTargetBand").at(1).get<double>();
  p.complexity_divisor = j.at("complexityDivisor").get<double>();
  p.complexity_cap = j.at("complexityCap").get<double>();
  p.team_size = j.at("teamSize").get<int>();
  p.rounds = j.at("rounds").get<int>();
  const auto& w = j.at("weights");
  p.weights.size = w.at("size").get<double>();
  p.weights.complexity = w.at("complexity").get<double>();
  p.weights.chain = w.at("chain").get<double>();
  p.weights.cross_sheet = w.at("crossSheet").get<double>();
  p.weights.fraud = w.at("fraud").get<double>();
  return p;
}

ojson risk_json(const RiskReport& r) {
  ojson j = ojson::object();
  j["uniqueFormulas"] = r.unique_formulas;
  j["meanTokens"] = json_number(r.mean_tokens);
  j["complexityMultiplier"] = json_number(r.multiplier);
  j["expectedErrors"] = json_number(r.expected_errors);
  j["pAnyError"] = json_number(r.p_any_error);
  ojson outs = ojson::array();
  for (const auto& o : r.per_output) {
    outs.push_back({{"output", to_a1(o.output, true)},
                    {"L", o.chain_length},
                    {"pChainCorrect", json_number(o.p_chain_correct)},
                    {"pMaterial", json_number(o.p_material)}});
  }
  j["perOutput"] = std::move(outs);
  j["detectionYield"] = json_number(r.detection_yield);
  ojson residual = ojson::array();
  for (double v : r.residual_after_rounds) residual.push_back(json_number(v));
  j["residualAfterRounds"] = std::move(residual);
  j["riskScore"] = json_number(r.risk_score);
  j["params"] = params_json(r.params);
  j["warnings"] = r.warnings;
  return j;
}

RiskReport risk_from(const json& j) {
  RiskReport r;
  r.unique_formulas = j.at("uniqueFormulas").get<std::size_t>();
  r.mean_tokens = j.at("meanTokens").get<double>();
  r.multiplier = j.at("complexityMultiplier").get<double>();
  r.expected_errors = j.at("expectedErrors").get<double>();
  r.p_any_error = j.at("pAnyError").get<double>();
  for (const auto& o : j.at("perOutput")) {
    OutputRisk out;
    out.output = address_from(o.at("output"));
    out.chain_length = o.at("L").get<std::size_t>();
    out.p_chain_correct = o.at("pChainCorrect").get<double>();
    out.p_material = o.at("pMaterial").get<double>();
    r.per_output.push_back(out);
  }
  r.detection_yield = j.at("detectionYield").get<double>();
  r.residual_after_rounds = j.at("residualAfterRounds").get<std::vector<double>>();
  r.risk_score = j.at("riskScore").get<double>();
  r.params = params_from(j.at("params"));
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  return r;
}

ojson finding_json(const Finding& f) {
  ojson j = ojson::object();
  j["ruleId"] = f.rule_id;
  j["severity"] = std::string(severity_name(f.severity));
  j["class"] = std::string(finding_class_name(f.finding_class));
  j["location"] = address_json(f.location);
  j["message"] = f.message;
  ojson ev = ojson::object();
  for (const auto& [k, v] : f.evidence) ev[k] = v;
  j["evidence"] = std::move(ev);
  return j;
}

Finding finding_from(const json& j) {
  Finding f;
  f.rule_id = j.at("ruleId").get<std::string>();
  const auto sev = severity_from_name(j.at("severity").get<std::string>());
  const auto cls = finding_class_from_name(j.at("class").get<std::string>());
  if (!sev || !cls) throw Error(ErrorCode::kMalformedDocument, "report: bad finding");
  f.severity = *sev;
  f.finding_class = *cls;
  if (!j.at("location").is_null()) f.location = address_from(j.at("location"));
  f.message = j.at("message").get<std::string>();
  f.evidence = j.at("evidence").get<std::map<std::string, std::string>>();
  return f;
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

}  // namespace

std::string serialize_risk_report(const RiskReport& r) { return risk_json(r).dump(2) + "\n"; }

std::string serialize_report(const AuditReport& r) {
  ojson doc = ojson::object();
  doc["toolVersion"] = r.tool_version;
  doc["generatedAt"] = r.generated_at;
  doc["workbook"] = {{"name", r.workbook_name},
                     {"modified", r.workbook_modified},
                     {"totalCells", r.total_cells},
                     {"formulaCells", r.formula_cells}};
  ojson findings = ojson::array();
  for (const auto& f : r.findings) findings.push_back(finding_json(f));
  doc["findings"] = std::move(findings);
  doc["suppressedCount"] = r.suppressed_count;
  ojson cov = ojson::array();
  for (const auto& c : r.coverage) {
    cov.push_back({{"ruleId", c.rule_id}, {"applicable", c.applicable}, {"examined", c.examined}});
  }
  doc["coverage"] = {{"complete", r.coverage_complete}, {"rules", std::move(cov)}};
  ojson closures = ojson::array();
  for (const auto& c : r.chains.closures) {
    closures.push_back({{"output", to_a1(c.output, true)}, {"closureSize", c.closure_size}});
  }
  ojson cycles = ojson::array();
  for (const auto& cyc : r.chains.cycles) {
    ojson one = ojson::array();
    for (const auto& a : cyc) one.push_back(to_a1(a, true));
    cycles.push_back(std::move(one));
  }
  doc["chains"] = {{"longestChainLength", r.chains.longest_chain_length},
                   {"closures", std::move(closures)},
                   {"cycles", std::move(cycles)}};
  doc["risk"] = risk_json(r.risk);
  return doc.dump(2) + "\n";
}

AuditReport parse_report(std::string_view document) {
  const json doc = parse_json_document(document, kWhat);
  try {
    AuditReport r;
    r.tool_version = doc.at("toolVersion").get<std::string>();
    r.generated_at = doc.at("generatedAt").get<std::string>();
    const auto& wb = doc.at("workbook");
    r.workbook_name = wb.at("name").get<std::string>();
    r.workbook_modified = wb.at("modified").get<std::string>();
    r.total_cells = wb.at("totalCells").get<std::size_t>();
    r.formula_cells = wb.at("formulaCells").get<std::size_t>();
    for (const auto& f : doc.at("findings")) r.findings.push_back(finding_from(f));
    r.suppressed_count = doc.at("suppressedCount").get<std::size_t>();
    r.coverage_complete = doc.at("coverage").at("complete").get<bool>();
    for (const auto& c : doc.at("coverage").at("rules")) {
      r.coverage.push_back({c.at("ruleId").get<std::string>(),
                            c.at("applicable").get<std::size_t>(),
                            c.at("examined").get<std::size_t>()});
    }
    const auto& ch = doc.at("chains");
    r.chains.longest_chain_length = ch.at("longestChainLength").get<std::size_t>();
    for (const auto& c : ch.at("closures")) {
      r.chains.closures.push_back(
          {address_from(c.at("output")), c.at("closureSize").get<std::size_t>()});
    }
    for (const auto& cyc : ch.at("cycles")) {
      std::vector<CellAddress> one;
      for (const auto& a : cyc) one.push_back(address_from(a));
      r.chains.cycles.push_back(std::move(one));
    }
    r.risk = risk_from(doc.at("risk"));
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedDocument, kWhat + ": " + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kMalformedDocument) throw;
    throw Error(ErrorCode::kMalformedDocument, kWhat + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Text form

std::string render_risk_text(const RiskReport& r) {
  std::ostringstream os;
  os << "risk:\n";
  os << "  unique formulas (U):     " << r.unique_formulas << "\n";
  os << "  mean tokens:             " << fixed(r.mean_tokens, 2) << "\n";
  os << "  complexity multiplier:   " << fixed(r.multiplier, 4) << "\n";
  os << "  base error rate (p):     " << format_number(r.params.p) << "\n";
  os << "  expected errors (E):     " << fixed(r.expected_errors, 4) << "\n";
  os << "  P(at least one error):   " << fixed(r.p_any_error, 4) << "\n";
  for (const auto& o : r.per_output) {
    os << "  output " << to_a1(o.output, true) << ": L=" << o.chain_length
       << " P(correct)=" << fixed(o.p_chain_correct, 4)
       << " P(serious error)=" << fixed(o.p_material, 4) << "\n";
  }
  os << "  inspection team " << r.params.team_size << ", yield per round "
     << fixed(r.detection_yield, 4) << "\n";
  for (std::size_t i = 0; i < r.residual_after_rounds.size(); ++i) {
    os << "  residual after round " << (i + 1) << ": " << fixed(r.residual_after_rounds[i], 4)
       << "\n";
  }
  os << "  risk score:              " << fixed(r.risk_score, 2) << "\n";
  for (const auto& w : r.warnings) os << "  note: " << w << "\n";
  return os.str();
}

std::string render_report_text(const AuditReport& r) {
  std::ostringstream os;
  os << "gridaudit " << r.tool_version << "\n";
  os << "workbook: " << r.workbook_name << "\n";
  os << "generated: " << r.generated_at << "\n";
  os << "cells: " << r.total_cells << " (" << r.formula_cells << " formulas)\n";
  os << "findings: " << r.findings.size() << " (suppressed " << r.suppressed_count << ")\n";
  for (const auto& f : r.findings) {
    os << "  " << severity_name(f.severity) << " " << f.rule_id << " "
       << (f.location ? to_a1(*f.location, true) : std::string("workbook")) << ": "
       << f.message << "\n";
  }
  os << "coverage: " << (r.coverage_complete ? "complete" : "INCOMPLETE") << "\n";
  for (const auto& c : r.coverage) {
    os << "  " << c.rule_id << " " << c.examined << "/" << c.applicable << "\n";
  }
  os << "longest chain: " << r.chains.longest_chain_length << "\n";
  for (const auto& cyc : r.chains.cycles) {
    os << "cycle:";
    for (const auto& a : cyc) os << " " << to_a1(a, true);
    os << "\n";
  }
  os << render_risk_text(r.risk);
  return os.str();
}

}  // namespace gridaudit
