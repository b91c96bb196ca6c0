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

// Deterministic evaluator for the supported formula grammar, and the
// snapshot/recheck pair used for execution (regression) testing.
//
// Coercion rules are deliberately asymmetric, as in mainstream spreadsheet
// programs:
//   * arithmetic and comparison operators coerce numeric-looking text to a
//     number; other text yields #VALUE!;
//   * SUM, AVERAGE, MIN, MAX and COUNT skip text, booleans and empty cells
//     reached through a reference or range.
// A number typed as text therefore still works in "=A1+1" but silently
// drops out of "=SUM(A1:A3)".

#ifndef GRIDAUDIT_ENGINE_HPP_
#define GRIDAUDIT_ENGINE_HPP_

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gridaudit/formula.hpp"
#include "gridaudit/graph.hpp"
#include "gridaudit/model.hpp"

namespace gridaudit {

enum class ErrorValue { kDiv0, kValue, kRef, kCycle };

std::string_view error_value_text(ErrorValue e);
std::optional<ErrorValue> error_value_from_text(std::string_view text);

struct Empty {
  bool operator==(const Empty&) const = default;
};

struct Value {
  std::variant<Empty, double, std::string, bool, ErrorValue> data;

  static Value number(double v) { return Value{v}; }
  static Value text(std::string v) { return Value{std::move(v)}; }
  static Value boolean(bool v) { return Value{v}; }
  static Value error(ErrorValue e) { return Value{e}; }

  bool is_empty() const { return std::holds_alternative<Empty>(data); }
  bool is_number() const { return std::holds_alternative<double>(data); }
  bool is_text() const { return std::holds_alternative<std::string>(data); }
  bool is_boolean() const { return std::holds_alternative<bool>(data); }
  bool is_error() const { return std::holds_alternative<ErrorValue>(data); }
  double as_number() const { return std::get<double>(data); }
  const std::string& as_text() const { return std::get<std::string>(data); }
  bool as_boolean() const { return std::get<bool>(data); }
  ErrorValue as_error() const { return std::get<ErrorValue>(data); }

  bool operator==(const Value&) const = default;
};

std::string display(const Value& v);

// The value a constant cell contributes. Numbers declared with the text
// format evaluate as text.
Value constant_value(const Cell& cell);

using ValueMap = std::map<CellAddress, Value>;

// Values for every defined cell. Formula errors propagate as FormulaError.
ValueMap evaluate(const Workbook& wb);
ValueMap evaluate(const Workbook& wb, const FormulaIndex& index, const DepGraph& graph);

// Incremental form of evaluate(). `base` holds the values of `wb` as is.
// Returns the values of `changed` and of every formula downstream of it once
// that cell's content is replaced by the constant `replacement`; all other
// values are unchanged. Throws InvalidArgument.
ValueMap reevaluate(const Workbook& wb, const FormulaIndex& index, const DepGraph& graph,
                    const ValueMap& base, const CellAddress& changed, const Cell& replacement);

struct Tolerance {
  double relative = 1e-9;
  double absolute = 1e-12;
};

// Numbers compare within tolerance; everything else exactly.
bool values_match(const Value& expected, const Value& actual, Tolerance tol = {});

struct Snapshot {
  std::string workbook_name;
  std::string created_at;
  std::map<CellAddress, Cell> inputs;  // constant cells (content + format)
  std::map<CellAddress, Value> outputs;

  bool operator==(const Snapshot&) const = default;
};

// Throws NoDeclaredOutputs or OutputIsError.
Snapshot snapshot(const Workbook& wb, std::string created_at);

struct Mismatch {
  CellAddress cell;
  Value expected;
  Value actual;
};

struct RecheckReport {
  std::vector<CellAddress> matches;
  std::vector<Mismatch> mismatches;
  std::vector<CellAddress> missing;

  std::size_t failure_count() const { return mismatches.size() + missing.size(); }
  bool passed() const { return failure_count() == 0; }
};

// Re-applies the snapshot's inputs over the workbook's constants,
// re-evaluates, and compares outputs. Throws MissingInputCell when an input
// address no longer exists.
RecheckReport recheck(const Workbook& wb, const Snapshot& snap, Tolerance tol = {});

std::string serialize_snapshot(const Snapshot& snap);
Snapshot parse_snapshot(std::string_view document);

}  // namespace gridaudit

#endif  // GRIDAUDIT_ENGINE_HPP_
