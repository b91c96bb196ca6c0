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

#include "gridaudit/risk.hpp"

#include <algorithm>
#include <cmath>

#include "gridaudit/error.hpp"

namespace gridaudit {

namespace {

bool is_probability(double v) { return v >= 0 && v <= 1; }

double clamp_probability(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

void RiskParams::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::kInvalidArgument, what); };
  if (!is_probability(p)) bad("p must be in [0,1]");
  if (!is_probability(p_audit)) bad("pAudit must be in [0,1]");
  if (!is_probability(serious_fraction)) bad("serious fraction must be in [0,1]");
  if (!is_probability(materiality)) bad("materiality must be in [0,1]");
  if (!is_probability(generic_yield)) bad("generic yield must be in [0,1]");
  if (yield_table.empty()) bad("yield table is empty");
  double last = -1;
  for (const auto& [k, d] : yield_table) {
    if (k < 1) bad("yield table team sizes must be >= 1");
    if (!is_probability(d)) bad("yield table entries must be in [0,1]");
    if (d < last) bad("yield must be non-decreasing in team size");
    last = d;
  }
  if (!(residual_band_low >= 0 && residual_band_low <= residual_band_high)) {
    bad("residual band must satisfy 0 <= low <= high");
  }
  if (!(complexity_divisor > 0)) bad("complexity divisor must be positive");
  if (!(complexity_cap >= 1)) bad("complexity cap must be >= 1");
  if (team_size < 1) throw Error(ErrorCode::kInvalidTeamSize, "team size must be >= 1");
  if (rounds < 0) bad("rounds must be >= 0");
}

double complexity_multiplier(double mean_tokens, const RiskParams& params) {
  return std::clamp(mean_tokens / params.complexity_divisor, 1.0, params.complexity_cap);
}

double detection_yield(int team_size, const RiskParams& params) {
  if (team_size < 1) {
    throw Error(ErrorCode::kInvalidTeamSize,
                "team size " + std::to_string(team_size) + " is below 1");
  }
  const auto& t = params.yield_table;
  if (t.empty()) return params.generic_yield;
  if (team_size <= t.begin()->first) return t.begin()->second;
  if (team_size >= t.rbegin()->first) return t.rbegin()->second;
  auto hi = t.lower_bound(team_size);
  if (hi->first == team_size) return hi->second;
  auto lo = std::prev(hi);
  const double frac = static_cast<double>(team_size - lo->first) / (hi->first - lo->first);
  return lo->second + frac * (hi->second - lo->second);
}

double expected_errors(double p, double multiplier, double unique_formulas) {
  return p * multiplier * unique_formulas;
}

double p_any_error(double p_effective, double unique_formulas) {
  return clamp_probability(1 - std::pow(1 - clamp_probability(p_effective), unique_formulas));
}

double p_chain_correct(double p_effective, double chain_length) {
  return clamp_probability(std::pow(1 - clamp_probability(p_effective), chain_length));
}

double p_material(double p_effective, double serious_fraction, double chain_length) {
  return p_any_error(p_effective * serious_fraction, chain_length);
}

std::vector<double> residual_with_yield(double expected, double yield, int rounds) {
  if (rounds < 0) throw Error(ErrorCode::kInvalidArgument, "rounds must be >= 0");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(rounds));
  double r = expected;
  for (int i = 0; i < rounds; ++i) {
    r *= 1 - yield;
    out.push_back(r);
  }
  return out;
}

std::vector<double> residual_after_inspection(double expected, int team_size, int rounds,
                                              const RiskParams& params) {
  return residual_with_yield(expected, detection_yield(team_size, params), rounds);
}

int rounds_to_band(double p_effective, double yield, const RiskParams& params) {
  double fraction = p_effective;
  for (int r = 0; r <= 64; ++r) {
    if (fraction <= params.residual_band_high) return r;
    fraction *= 1 - yield;
  }
  return -1;
}

double risk_score(const ScoreInputs& in, const RiskParams& params) {
  const auto& w = params.weights;
  const double mult = complexity_multiplier(in.mean_tokens, params);
  return w.size * std::log10(1 + in.unique_formulas) +
         w.complexity * std::min(params.complexity_cap, mult) +
         w.chain * std::log10(1 + in.max_chain) +
         w.cross_sheet * std::log10(1 + in.cross_sheet_refs) +
         w.fraud * (in.fraud_findings > 0 ? 1 : 0);
}

RiskReport assess(const Workbook& wb, const FormulaIndex& index, const DepGraph& g,
                  const RiskParams& params, std::size_t fraud_findings) {
  params.validate();
  RiskReport rep;
  rep.params = params;
  rep.unique_formulas = unique_formula_count(index);

  double tokens = 0;
  double cross_sheet = 0;
  for (const auto& pf : index.all()) {
    tokens += pf.metrics.token_count;
    cross_sheet += pf.metrics.cross_sheet_ref_count;
  }
  rep.mean_tokens = index.size() ? tokens / static_cast<double>(index.size()) : 0;
  rep.multiplier = complexity_multiplier(rep.mean_tokens, params);
  const double pe = std::min(1.0, params.p * rep.multiplier);
  const double u = static_cast<double>(rep.unique_formulas);
  rep.expected_errors = expected_errors(params.p, rep.multiplier, u);
  rep.p_any_error = p_any_error(pe, u);

  const ChainStats chains = chain_stats(g, wb.meta.outputs);
  std::size_t max_l = 0;
  for (const auto& c : chains.closures) {
    OutputRisk o;
    o.output = c.output;
    o.chain_length = c.closure_size;
    o.p_chain_correct = p_chain_correct(pe, static_cast<double>(c.closure_size));
    o.p_material =
        p_material(pe, params.serious_fraction, static_cast<double>(c.closure_size));
    max_l = std::max(max_l, c.closure_size);
    rep.per_output.push_back(o);
  }
  if (wb.meta.outputs.empty()) {
    rep.warnings.push_back("no declared outputs; per-output risk not computed");
    max_l = chains.longest_chain_length;
  }
  rep.warnings.push_back(
      "formula errors are modelled as independent events, one per unique formula");

  rep.detection_yield = detection_yield(params.team_size, params);
  rep.residual_after_rounds =
      residual_with_yield(rep.expected_errors, rep.detection_yield, params.rounds);
  rep.risk_score = risk_score({u, rep.mean_tokens, static_cast<double>(max_l), cross_sheet,
                               fraud_findings},
                              params);
  return rep;
}

RiskReport assess(const Workbook& wb, const RiskParams& params) {
  const FormulaIndex index(wb);
  const DepGraph g = build_graph(wb, index);
  return assess(wb, index, g, params, 0);
}

}  // namespace gridaudit
