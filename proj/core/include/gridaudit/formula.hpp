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

// Formula lexing, parsing, copy-invariant normalization and complexity
// metrics.
//
// Operator precedence, loosest first:
//   comparisons (= <> < <= > >=), &, + -, * /, ^, unary + -
// All binary tiers are left-associative. Unary minus binds tighter than ^,
// so "-2^2" is (-2)^2 = 4, as in mainstream spreadsheet programs.
//
// Named ranges are not supported; an identifier that is neither a function,
// a boolean, nor a cell reference is rejected with UnknownName.

#ifndef GRIDAUDIT_FORMULA_HPP_
#define GRIDAUDIT_FORMULA_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gridaudit/model.hpp"

namespace gridaudit {

enum class BinaryOp { kAdd, kSub, kMul, kDiv, kPow, kConcat, kEq, kNe, kLt, kLe, kGt, kGe };
enum class UnaryOp { kNeg, kPlus };
enum class Function { kSum, kAverage, kMin, kMax, kCount, kIf, kAnd, kOr, kNot, kRound, kAbs };

std::string_view function_name(Function f);
std::optional<Function> function_from_name(std::string_view name);
// SUM, AVERAGE, MIN, MAX, COUNT: reference arguments skip non-numbers.
bool is_aggregate(Function f);
std::string_view binary_op_text(BinaryOp op);

// One cell reference as written. Coordinates may fall outside the grid
// (e.g. "A1048577"); such references evaluate to #REF!.
struct RefTarget {
  std::string sheet;  // resolved: host sheet when unqualified
  std::int64_t row = 1;
  std::int64_t col = 1;
  bool row_absolute = false;
  bool col_absolute = false;
  bool qualified = false;

  CellAddress address() const { return {sheet, row, col}; }
  bool in_bounds() const { return in_grid(row, col); }
  bool operator==(const RefTarget&) const = default;
};

struct Expr {
  enum class Kind { kNumber, kText, kBoolean, kCellRef, kRangeRef, kUnary, kBinary, kCall };

  Kind kind = Kind::kNumber;
  double number = 0;
  std::string text;
  bool boolean = false;
  RefTarget ref;   // kCellRef, or the top-left corner of kRangeRef
  RefTarget ref2;  // bottom-right corner of kRangeRef
  UnaryOp unary = UnaryOp::kNeg;
  BinaryOp binary = BinaryOp::kAdd;
  Function function = Function::kSum;
  std::vector<Expr> args;  // operands or call arguments
  std::size_t offset = 0;  // source position; ignored by ==

  bool operator==(const Expr& other) const;
};

struct FormulaAst {
  Expr root;
  CellAddress host;
};

FormulaAst parse_formula(std::string_view src, const CellAddress& host);

// A1-style source with minimal parentheses; reparsing yields an equal tree.
std::string render_a1(const FormulaAst& ast);

struct NormalizedFormula {
  std::string text;                 // e.g. "=R[-1]C*2"
  std::vector<double> literals;     // number literals, sorted
  std::vector<std::string> references;  // R1C1 text, source order
  int token_count = 0;
};

NormalizedFormula normalize(const FormulaAst& ast);

struct FormulaMetrics {
  int token_count = 0;
  int literal_count = 0;
  std::int64_t max_ref_distance = 0;
  int off_axis_ref_count = 0;
  int cross_sheet_ref_count = 0;
};

// Same-sheet references only contribute to distance and off-axis counts.
// A range's distance is measured to its nearest cell.
FormulaMetrics metrics(const FormulaAst& ast);
int token_count(const Expr& e);

// Row/column offsets from the host to the nearest cell of a reference.
struct RefOffset {
  std::int64_t drow = 0;
  std::int64_t dcol = 0;
};
RefOffset nearest_offset(const Expr& ref_node, const CellAddress& host);

// Visits every kCellRef and kRangeRef node, in source order.
void for_each_reference(const Expr& e, const std::function<void(const Expr&)>& fn);
void for_each_reference(Expr& e, const std::function<void(Expr&)>& fn);
std::vector<double> number_literals(const Expr& e);

// A parsed formula cell with its derived forms, computed once per workbook.
struct ParsedFormula {
  CellAddress host;
  FormulaAst ast;
  NormalizedFormula normal;
  FormulaMetrics metrics;
};

class FormulaIndex {
 public:
  // Parses every formula; SyntaxError / UnknownFunction / UnknownName are
  // rethrown with the offending cell's address in the message.
  explicit FormulaIndex(const Workbook& wb);

  const ParsedFormula* find(const CellAddress& addr) const;
  // Workbook order: sheets as listed, cells row-major.
  const std::vector<ParsedFormula>& all() const { return formulas_; }
  std::size_t size() const { return formulas_.size(); }

 private:
  std::vector<ParsedFormula> formulas_;
  std::map<CellAddress, std::size_t> by_address_;
};

// Distinct (sheet, normal form) pairs over all formula cells.
std::size_t unique_formula_count(const Workbook& wb);
std::size_t unique_formula_count(const FormulaIndex& index);

}  // namespace gridaudit

#endif  // GRIDAUDIT_FORMULA_HPP_
