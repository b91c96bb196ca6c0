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

// Workbook data model: cell addressing, cell contents, sheets, and the
// canonical on-disk document every other module consumes.

#ifndef GRIDAUDIT_MODEL_HPP_
#define GRIDAUDIT_MODEL_HPP_

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace gridaudit {

inline constexpr std::int64_t kMaxRows = 1048576;
inline constexpr std::int64_t kMaxCols = 16384;

// Row-major position inside one sheet. Ordering is row first, then column.
struct GridPos {
  std::int64_t row = 1;
  std::int64_t col = 1;

  auto operator<=>(const GridPos&) const = default;
};

bool in_grid(std::int64_t row, std::int64_t col);

struct CellAddress {
  std::string sheet;
  std::int64_t row = 1;
  std::int64_t col = 1;

  GridPos pos() const { return {row, col}; }
  auto operator<=>(const CellAddress&) const = default;
};

// Result of parsing an A1 reference. The `$` markers are kept apart from
// the coordinates so that the address itself stays a plain location.
struct A1Ref {
  CellAddress address;
  bool row_absolute = false;
  bool col_absolute = false;
  bool qualified = false;  // an explicit sheet prefix was present
};

// "A" -> 1, "Z" -> 26, "AA" -> 27. Returns nullopt for anything else or for
// columns beyond kMaxCols.
std::optional<std::int64_t> column_from_letters(std::string_view letters);
std::string column_letters(std::int64_t col);

// Sheet names that contain anything other than [A-Za-z0-9_.] or start with
// a digit are written quoted: 'My Sheet'!A1.
bool sheet_needs_quotes(std::string_view name);
std::string quote_sheet(std::string_view name);

A1Ref parse_a1(std::string_view ref, std::string_view host_sheet);
std::string to_a1(GridPos pos);
std::string to_a1(const CellAddress& addr, bool qualify = true);
std::string to_a1(const A1Ref& ref, bool qualify);

// Shortest decimal text that round-trips to the same double.
std::string format_number(double value);
// Strict numeric parse of text content (surrounding blanks allowed).
std::optional<double> parse_number(std::string_view text);

enum class DeclaredFormat { kGeneral, kText };

struct Formula {
  std::string source;  // includes the leading '='
  bool operator==(const Formula&) const = default;
};

using Constant = std::variant<double, std::string, bool>;

struct Cell {
  std::variant<double, std::string, bool, Formula> content;
  bool locked = false;
  std::optional<DeclaredFormat> format;

  static Cell number(double v) { return Cell{v, false, std::nullopt}; }
  static Cell text(std::string v) { return Cell{std::move(v), false, std::nullopt}; }
  static Cell boolean(bool v) { return Cell{v, false, std::nullopt}; }
  static Cell formula(std::string src, bool locked = false) {
    return Cell{Formula{std::move(src)}, locked, std::nullopt};
  }

  bool is_formula() const { return std::holds_alternative<Formula>(content); }
  bool is_number() const { return std::holds_alternative<double>(content); }
  bool is_text() const { return std::holds_alternative<std::string>(content); }
  bool is_boolean() const { return std::holds_alternative<bool>(content); }
  const std::string& formula_source() const {
    return std::get<Formula>(content).source;
  }
  std::optional<Constant> constant() const;

  bool operator==(const Cell&) const = default;
};

// A number that a spreadsheet stores as text: either a text constant whose
// content parses as a number, or a number declared with the text format.
// Both spellings are treated the same everywhere downstream.
std::optional<double> numeric_text_value(const Cell& cell);

struct Sheet {
  std::string name;
  std::map<GridPos, Cell> cells;

  const Cell* find(GridPos pos) const;
  bool operator==(const Sheet&) const = default;
};

struct WorkbookMeta {
  std::string modified;  // ISO-8601 date-time
  std::vector<CellAddress> outputs;
  bool protection_enabled = false;

  bool operator==(const WorkbookMeta&) const = default;
};

struct Workbook {
  std::string name;
  std::vector<Sheet> sheets;
  WorkbookMeta meta;

  const Sheet* find_sheet(std::string_view name) const;
  Sheet* find_sheet(std::string_view name);
  const Cell* find_cell(const CellAddress& addr) const;
  // Index of the sheet in workbook order, or -1.
  int sheet_index(std::string_view name) const;
  std::size_t cell_count() const;
  std::size_t formula_count() const;

  bool operator==(const Workbook&) const = default;
};

// Checks every model invariant and throws Error on the first violation.
void validate(const Workbook& wb);

// Orders addresses by sheet position in the workbook, then row-major. Sheets
// the workbook does not know sort after all known ones, by name.
class LocationOrder {
 public:
  explicit LocationOrder(const Workbook& wb);
  int sheet_rank(std::string_view sheet) const;
  bool operator()(const CellAddress& a, const CellAddress& b) const;

 private:
  std::map<std::string, int, std::less<>> rank_;
};

// Canonical document format.
struct Diagnostic {
  std::string location;
  std::string message;
};

Workbook parse_workbook(std::string_view document,
                        std::vector<Diagnostic>* warnings = nullptr);
std::string serialize_workbook(const Workbook& wb);

// Cell object as it appears under "cells", e.g. {"f":"=A1*2","locked":true}.
std::string serialize_cell(const Cell& cell);

Workbook load_workbook(const std::string& path,
                       std::vector<Diagnostic>* warnings = nullptr);
void save_workbook(const Workbook& wb, const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace gridaudit

#endif  // GRIDAUDIT_MODEL_HPP_
