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

#include "gridaudit/diffcheck.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "json_util.hpp"

namespace gridaudit {

namespace {

constexpr struct {
  DiffKind kind;
  std::string_view name;
} kKindNames[] = {
    {DiffKind::kAdded, "added"},
    {DiffKind::kRemoved, "removed"},
    {DiffKind::kValueChanged, "valueChanged"},
    {DiffKind::kFormulaChanged, "formulaChanged"},
    {DiffKind::kFormulaToConstant, "formulaToConstant"},
    {DiffKind::kConstantToFormula, "constantToFormula"},
    {DiffKind::kLockChanged, "lockChanged"},
};

// Sheet ranks over the union: first workbook's order, then new sheets.
std::map<std::string, std::size_t> sheet_ranks(const std::vector<const Workbook*>& wbs) {
  std::map<std::string, std::size_t> rank;
  for (const auto* wb : wbs) {
    for (const auto& s : wb->sheets) rank.emplace(s.name, rank.size());
  }
  return rank;
}

std::vector<CellAddress> all_locations(const std::vector<const Workbook*>& wbs,
                                       const std::map<std::string, std::size_t>& rank) {
  std::set<CellAddress> seen;
  for (const auto* wb : wbs) {
    for (const auto& s : wb->sheets) {
      for (const auto& [pos, cell] : s.cells) seen.insert({s.name, pos.row, pos.col});
    }
  }
  std::vector<CellAddress> out(seen.begin(), seen.end());
  std::stable_sort(out.begin(), out.end(), [&](const CellAddress& x, const CellAddress& y) {
    const auto rx = rank.at(x.sheet);
    const auto ry = rank.at(y.sheet);
    if (rx != ry) return rx < ry;
    return x.pos() < y.pos();
  });
  return out;
}

std::optional<Cell> lookup(const Workbook& wb, const CellAddress& at) {
  const Cell* c = wb.find_cell(at);
  return c ? std::optional<Cell>(*c) : std::nullopt;
}

bool same_slot(const std::optional<Cell>& a, const std::optional<Cell>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || same_cell(*a, *b);
}

nlohmann::ordered_json optional_cell_json(const std::optional<Cell>& c) {
  return c ? cell_to_json(*c) : nlohmann::ordered_json(nullptr);
}

}  // namespace

std::string_view diff_kind_name(DiffKind k) {
  for (const auto& e : kKindNames) {
    if (e.kind == k) return e.name;
  }
  return "valueChanged";
}

std::optional<DiffKind> diff_kind_from_name(std::string_view name) {
  for (const auto& e : kKindNames) {
    if (e.name == name) return e.kind;
  }
  return std::nullopt;
}

bool same_content(const Cell& a, const Cell& b) {
  if (a.content.index() != b.content.index()) return false;
  if (a.format.value_or(DeclaredFormat::kGeneral) != b.format.value_or(DeclaredFormat::kGeneral)) {
    return false;
  }
  if (const auto* x = std::get_if<double>(&a.content)) {
    return std::fabs(*x - std::get<double>(b.content)) <= 1e-12;
  }
  return a.content == b.content;
}

bool same_cell(const Cell& a, const Cell& b) {
  return a.locked == b.locked && same_content(a, b);
}

std::vector<DiffEntry> diff(const Workbook& a, const Workbook& b) {
  const std::vector<const Workbook*> both{&a, &b};
  const auto rank = sheet_ranks(both);
  std::vector<DiffEntry> out;
  for (const auto& at : all_locations(both, rank)) {
    const auto before = lookup(a, at);
    const auto after = lookup(b, at);
    auto push = [&](DiffKind k) { out.push_back({at, k, before, after, false}); };
    if (!before) {
      push(DiffKind::kAdded);
      continue;
    }
    if (!after) {
      push(DiffKind::kRemoved);
      continue;
    }
    if (!same_content(*before, *after)) {
      if (before->is_formula() && after->is_formula()) {
        push(DiffKind::kFormulaChanged);
      } else if (before->is_formula()) {
        push(DiffKind::kFormulaToConstant);
        out.back().fraud_indicator = true;
      } else if (after->is_formula()) {
        push(DiffKind::kConstantToFormula);
      } else {
        push(DiffKind::kValueChanged);
      }
    } else if (before->locked != after->locked) {
      // A content change already carries both lock states.
      push(DiffKind::kLockChanged);
    }
  }
  return out;
}

ThreeWayResult three_way_check(const Workbook& base, const Workbook& copy1,
                               const Workbook& copy2) {
  const std::vector<const Workbook*> all{&base, &copy1, &copy2};
  const auto rank = sheet_ranks(all);
  ThreeWayResult r;
  for (const auto& at : all_locations(all, rank)) {
    ThreeWayEntry e{at, lookup(base, at), lookup(copy1, at), lookup(copy2, at)};
    const bool changed1 = !same_slot(e.base, e.copy1);
    const bool changed2 = !same_slot(e.base, e.copy2);
    if (!changed1 && !changed2) continue;
    if (changed1 && changed2 && same_slot(e.copy1, e.copy2)) {
      r.agreeing.push_back(std::move(e));
    } else {
      r.conflicting.push_back(std::move(e));
    }
  }
  return r;
}

std::string serialize_diff(const Workbook& a, const Workbook& b,
                           const std::vector<DiffEntry>& entries) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  doc["before"] = a.name;
  doc["after"] = b.name;
  std::map<std::string, std::size_t> counts;
  auto list = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    j["location"] = to_a1(e.location, true);
    j["kind"] = std::string(diff_kind_name(e.kind));
    j["before"] = optional_cell_json(e.before);
    j["after"] = optional_cell_json(e.after);
    if (e.fraud_indicator) j["tag"] = "fraud-indicator";
    ++counts[std::string(diff_kind_name(e.kind))];
    list.push_back(std::move(j));
  }
  doc["entries"] = std::move(list);
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  for (const auto& [k, n] : counts) summary[k] = n;
  doc["summary"] = std::move(summary);
  return doc.dump(2) + "\n";
}

std::string serialize_three_way(const ThreeWayResult& r) {
  auto list = [](const std::vector<ThreeWayEntry>& v) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& e : v) {
      nlohmann::ordered_json j = nlohmann::ordered_json::object();
      j["location"] = to_a1(e.location, true);
      j["base"] = optional_cell_json(e.base);
      j["copy1"] = optional_cell_json(e.copy1);
      j["copy2"] = optional_cell_json(e.copy2);
      arr.push_back(std::move(j));
    }
    return arr;
  };
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  doc["agreeing"] = list(r.agreeing);
  doc["conflicting"] = list(r.conflicting);
  return doc.dump(2) + "\n";
}

}  // namespace gridaudit
