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

// Small helpers for building workbooks in tests.

#ifndef GRIDAUDIT_TESTS_BUILDERS_HPP_
#define GRIDAUDIT_TESTS_BUILDERS_HPP_

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "gridaudit/model.hpp"

namespace gridaudit::testing {

inline Cell num(double v) { return Cell::number(v); }
inline Cell txt(std::string v) { return Cell::text(std::move(v)); }
inline Cell f(std::string src, bool locked = true) { return Cell::formula(std::move(src), locked); }

// Cells keyed by "A1" (first sheet) or "Sheet!A1". Sheets are created in
// order of first mention. Name and date satisfy the naming check.
inline Workbook book(std::initializer_list<std::pair<std::string, Cell>> cells,
                     std::vector<std::string> outputs = {},
                     std::string first_sheet = "Sheet1") {
  Workbook wb;
  wb.name = "model_v1_2026-01-01";
  wb.meta.modified = "2026-01-01T09:30:00Z";
  wb.meta.protection_enabled = true;
  wb.sheets.push_back(Sheet{first_sheet, {}});
  for (const auto& [where, cell] : cells) {
    const A1Ref ref = parse_a1(where, first_sheet);
    Sheet* s = wb.find_sheet(ref.address.sheet);
    if (!s) {
      wb.sheets.push_back(Sheet{ref.address.sheet, {}});
      s = &wb.sheets.back();
    }
    s->cells[ref.address.pos()] = cell;
  }
  for (const auto& o : outputs) wb.meta.outputs.push_back(parse_a1(o, first_sheet).address);
  return wb;
}

inline CellAddress at(const std::string& where, const std::string& sheet = "Sheet1") {
  return parse_a1(where, sheet).address;
}

// Random but valid workbook for round-trip properties: awkward sheet
// names, every constant type, both formats, formulas with cross-sheet and
// absolute references.
inline Workbook random_workbook(std::mt19937_64& rng) {
  static const std::vector<std::string> kNames{"Sheet1", "Data 2024", "O'Brien", "calc",
                                               "Résumé", "x-y", "Totals!"};
  static const std::vector<std::string> kTexts{"", "hello", "300", "  12 ", "with \"quotes\"",
                                               "naïve ünïcode", "line\nbreak", "TRUE"};
  std::uniform_int_distribution<int> n_sheets(1, 3);
  std::uniform_int_distribution<int> n_cells(0, 12);
  std::uniform_int_distribution<std::int64_t> row(1, 40);
  std::uniform_int_distribution<std::int64_t> col(1, 30);
  std::uniform_int_distribution<int> kind(0, 5);
  std::uniform_real_distribution<double> real(-1e6, 1e6);
  std::uniform_int_distribution<std::size_t> pick(0, 1000);

  Workbook wb;
  wb.name = "random_" + std::to_string(rng() % 100000);
  wb.meta.modified = "2025-06-30T12:00:00Z";
  wb.meta.protection_enabled = rng() % 2 == 0;
  std::vector<std::string> names = kNames;
  std::shuffle(names.begin(), names.end(), rng);
  names.resize(static_cast<std::size_t>(n_sheets(rng)));
  for (const auto& n : names) wb.sheets.push_back(Sheet{n, {}});
  for (auto& s : wb.sheets) {
    const int count = n_cells(rng);
    for (int i = 0; i < count; ++i) {
      Cell c;
      switch (kind(rng)) {
        case 0: c = Cell::number(std::round(real(rng))); break;
        case 1: c = Cell::number(real(rng) / 7.0); break;
        case 2: c = Cell::text(kTexts[pick(rng) % kTexts.size()]); break;
        case 3: c = Cell::boolean(rng() % 2 == 0); break;
        case 4: {
          const auto& other = wb.sheets[pick(rng) % wb.sheets.size()].name;
          c = Cell::formula("=SUM(" + quote_sheet(other) + "!$A$1:B3)*2");
          break;
        }
        default: c = Cell::formula("=IF(A1>0,A1&\"x\",-A1)"); break;
      }
      c.locked = rng() % 2 == 0;
      if (!c.is_formula() && rng() % 4 == 0) c.format = DeclaredFormat::kText;
      if (!c.is_formula() && rng() % 4 == 1) c.format = DeclaredFormat::kGeneral;
      s.cells[{row(rng), col(rng)}] = c;
    }
  }
  for (const auto& s : wb.sheets) {
    if (!s.cells.empty() && rng() % 2 == 0) {
      wb.meta.outputs.push_back({s.name, s.cells.begin()->first.row, s.cells.begin()->first.col});
    }
  }
  return wb;
}

}  // namespace gridaudit::testing

#endif  // GRIDAUDIT_TESTS_BUILDERS_HPP_
