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

// Synthetic workbooks, defect seeding, and Monte Carlo oracles.
//
// Random streams come from std::mt19937_64. Results are reproducible from
// the seed with this library; no cross-implementation guarantee is made.

#ifndef GRIDAUDIT_SIMLAB_HPP_
#define GRIDAUDIT_SIMLAB_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gridaudit/model.hpp"
#include "gridaudit/risk.hpp"
#include "gridaudit/rules.hpp"

namespace gridaudit {

enum class Topology { kChain, kTree, kGrid };

std::string_view topology_name(Topology t);
std::optional<Topology> topology_from_name(std::string_view name);

// Defect classes: every rule id, plus the omission variant below, which
// static rules are not expected to catch.
inline constexpr std::string_view kWrongAlgorithm = "WRONG_ALGORITHM";
const std::vector<std::string>& defect_classes();

struct SeedSpec {
  Topology topology = Topology::kGrid;
  int formula_count = 100;
  int input_count = 10;  // a minimum; layouts add inputs they need
  double error_rate = 0.05;
  std::map<std::string, double> defect_mix{{"NUM_AS_TEXT", 0.2},  {"HARDWIRED", 0.2},
                                           {"JAMMED", 0.2},       {"DUP_LITERAL", 0.2},
                                           {"LONG_FORMULA", 0.1}, {"WRONG_ALGORITHM", 0.1}};
  std::uint64_t rng_seed = 1;

  // Throws InvalidArgument.
  void validate() const;
  bool operator==(const SeedSpec&) const = default;
};

std::string serialize_seed_spec(const SeedSpec& spec);
SeedSpec parse_seed_spec(std::string_view document);

inline constexpr std::string_view kModelSheet = "Model";
inline constexpr std::string_view kAuxSheet = "Aux";

// Deterministic for a fixed seed. Sheet "Model", inputs down column A,
// every formula locked, protection on, one declared output.
Workbook generate_clean(const SeedSpec& spec);

struct TruthEntry {
  std::optional<CellAddress> cell;  // nullopt: workbook-level
  std::string defect_class;
  std::optional<Cell> original;     // nullopt: the cell did not exist
  std::string original_name;        // workbook-level entries only

  bool operator==(const TruthEntry&) const = default;
};

struct SeededWorkbook {
  Workbook workbook;
  std::vector<TruthEntry> truth;
};

// Each formula cell is drawn with probability error_rate; its class comes
// from defect_mix restricted to the classes that can still be placed there
// without hiding an earlier defect. Cells with no such class stay clean.
SeededWorkbook seed_defects(const Workbook& clean, const SeedSpec& spec,
                            const RuleThresholds& thresholds = {});

std::string serialize_truth(const SeededWorkbook& seeded);
std::vector<TruthEntry> parse_truth(std::string_view document);

struct MonteCarloResult {
  int trials = 0;
  double p_any_error = 0;
  double p_any_error_se = 0;
  double p_chain_correct = 0;
  double p_chain_correct_se = 0;
};

// Bernoulli(p) per unique formula (U of them) and per chain cell (L of
// them); trial t draws from a generator seeded with seed + t.
// Throws InvalidArgument when trials < 1000.
MonteCarloResult monte_carlo(double p, std::int64_t unique_formulas, std::int64_t chain_length,
                             int trials, std::uint64_t seed = 1);

struct DetectionResult {
  int trials = 0;
  std::size_t initial = 0;
  std::vector<double> mean_residual;  // rounds 1..r
  std::vector<double> std_error;
};

// Binomial thinning: each round removes each remaining defect with
// probability `yield`. Throws EmptyTruth.
DetectionResult detection_experiment(const SeededWorkbook& seeded, double yield, int rounds,
                                     int trials, std::uint64_t seed = 1);
DetectionResult detection_experiment(const SeededWorkbook& seeded, int team_size, int rounds,
                                     const RiskParams& params, int trials,
                                     std::uint64_t seed = 1);

}  // namespace gridaudit

#endif  // GRIDAUDIT_SIMLAB_HPP_
