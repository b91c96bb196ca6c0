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

// Defect-rate risk model. Formula errors are treated as independent
// Bernoulli events, one per unique formula; the report states this.

#ifndef GRIDAUDIT_RISK_HPP_
#define GRIDAUDIT_RISK_HPP_

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "gridaudit/formula.hpp"
#include "gridaudit/graph.hpp"
#include "gridaudit/model.hpp"

namespace gridaudit {

struct ScoreWeights {
  double size = 10;
  double complexity = 3;
  double chain = 2;
  double cross_sheet = 1;
  double fraud = 5;

  bool operator==(const ScoreWeights&) const = default;
};

struct RiskParams {
  double p = 0.02;        // base error rate per unique formula
  double p_audit = 0.052;  // audited-corpus rate, for cross-checks
  double serious_fraction = 0.15;
  double materiality = 0.05;
  // Per-round detection yield by inspection team size.
  std::map<int, double> yield_table{{1, 0.63}, {3, 0.83}};
  double generic_yield = 0.60;
  double residual_band_low = 0.001;
  double residual_band_high = 0.003;
  double complexity_divisor = 6;
  double complexity_cap = 4;
  int team_size = 3;
  int rounds = 3;
  ScoreWeights weights;

  // Throws InvalidArgument.
  void validate() const;
  bool operator==(const RiskParams&) const = default;
};

// clamp(meanTokens / divisor, 1, cap)
double complexity_multiplier(double mean_tokens, const RiskParams& params = {});

// Table lookup with linear interpolation between listed team sizes,
// clamped to the end values outside. Throws InvalidTeamSize for k < 1.
double detection_yield(int team_size, const RiskParams& params = {});

double expected_errors(double p, double multiplier, double unique_formulas);
double p_any_error(double p_effective, double unique_formulas);
double p_chain_correct(double p_effective, double chain_length);
double p_material(double p_effective, double serious_fraction, double chain_length);

// residual_r = E * (1 - d(k))^r for r = 1..rounds.
std::vector<double> residual_after_inspection(double expected, int team_size, int rounds,
                                              const RiskParams& params = {});
// Same with an explicit per-round yield.
std::vector<double> residual_with_yield(double expected, double yield, int rounds);

// Smallest r >= 0 whose residual fraction (residual / U) is at or below the
// top of the target band; -1 if the yield is zero and the start is above it.
int rounds_to_band(double p_effective, double yield, const RiskParams& params = {});

struct ScoreInputs {
  double unique_formulas = 0;
  double mean_tokens = 0;
  double max_chain = 0;
  double cross_sheet_refs = 0;
  std::size_t fraud_findings = 0;
};

double risk_score(const ScoreInputs& in, const RiskParams& params = {});

struct OutputRisk {
  CellAddress output;
  std::size_t chain_length = 0;  // formula cells in the output's closure
  double p_chain_correct = 1;
  double p_material = 0;

  bool operator==(const OutputRisk&) const = default;
};

struct RiskReport {
  std::size_t unique_formulas = 0;
  double mean_tokens = 0;
  double multiplier = 1;
  double expected_errors = 0;
  double p_any_error = 0;
  std::vector<OutputRisk> per_output;
  double detection_yield = 0;
  std::vector<double> residual_after_rounds;
  double risk_score = 0;
  RiskParams params;
  std::vector<std::string> warnings;

  bool operator==(const RiskReport&) const = default;
};

RiskReport assess(const Workbook& wb, const FormulaIndex& index, const DepGraph& g,
                  const RiskParams& params, std::size_t fraud_findings = 0);
RiskReport assess(const Workbook& wb, const RiskParams& params = {});

}  // namespace gridaudit

#endif  // GRIDAUDIT_RISK_HPP_
