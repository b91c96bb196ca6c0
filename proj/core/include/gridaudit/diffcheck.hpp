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

// Cell-level workbook comparison for two-copy change control.

#ifndef GRIDAUDIT_DIFFCHECK_HPP_
#define GRIDAUDIT_DIFFCHECK_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gridaudit/model.hpp"

namespace gridaudit {

enum class DiffKind {
  kAdded,
  kRemoved,
  kValueChanged,
  kFormulaChanged,
  kFormulaToConstant,
  kConstantToFormula,
  kLockChanged,
};

std::string_view diff_kind_name(DiffKind k);
std::optional<DiffKind> diff_kind_from_name(std::string_view name);

struct DiffEntry {
  CellAddress location;
  DiffKind kind = DiffKind::kValueChanged;
  std::optional<Cell> before;
  std::optional<Cell> after;
  // Set on formula-to-constant replacements (the hardwiring pattern).
  bool fraud_indicator = false;

  bool operator==(const DiffEntry&) const = default;
};

// Numbers equal within 1e-12 absolute; text and booleans exactly; formulas
// by source text. Lock state is compared separately.
bool same_content(const Cell& a, const Cell& b);
bool same_cell(const Cell& a, const Cell& b);

// Entries ordered by sheet (a's order, then sheets new in b), row, column,
// kind. Lock changes are reported only where the content is unchanged.
std::vector<DiffEntry> diff(const Workbook& a, const Workbook& b);

struct ThreeWayEntry {
  CellAddress location;
  std::optional<Cell> base;
  std::optional<Cell> copy1;
  std::optional<Cell> copy2;
};

struct ThreeWayResult {
  std::vector<ThreeWayEntry> agreeing;
  // Copies that differ from each other, including a change made in only
  // one copy.
  std::vector<ThreeWayEntry> conflicting;
};

ThreeWayResult three_way_check(const Workbook& base, const Workbook& copy1,
                               const Workbook& copy2);

std::string serialize_diff(const Workbook& a, const Workbook& b,
                           const std::vector<DiffEntry>& entries);
std::string serialize_three_way(const ThreeWayResult& r);

}  // namespace gridaudit

#endif  // GRIDAUDIT_DIFFCHECK_HPP_
