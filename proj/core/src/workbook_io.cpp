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

// Canonical workbook document: JSON, UTF-8, deterministic key order on write.

#include <cmath>
#include <string>

#include "gridaudit/error.hpp"
#include "gridaudit/model.hpp"
#include "json_util.hpp"

namespace gridaudit {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void warn(std::vector<Diagnostic>* warnings, std::string location,
          std::string message) {
  if (warnings) warnings->push_back({std::move(location), std::move(message)});
}

[[noreturn]] void malformed(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::kMalformedDocument, where + ": " + what);
}

Cell parse_cell(const json& obj, const std::string& where,
                std::vector<Diagnostic>* warnings) {
  if (!obj.is_object()) malformed(where, "cell must be an object");
  const bool has_v = obj.contains("v");
  const bool has_f = obj.contains("f");
  if (has_v && has_f) {
    throw Error(ErrorCode::kInvalidCell,
                where + ": constant and formula are mutually exclusive");
  }
  if (!has_v && !has_f) {
    throw Error(ErrorCode::kInvalidCell, where + ": needs \"v\" or \"f\"");
  }
  Cell cell;
  if (has_f) {
    const auto& f = obj.at("f");
    if (!f.is_string()) malformed(where, "\"f\" must be a string");
    auto src = f.get<std::string>();
    if (src.size() < 2 || src.front() != '=') {
      throw Error(ErrorCode::kInvalidCell,
                  where + ": formula must be '=' followed by an expression");
    }
    cell.content = Formula{std::move(src)};
  } else {
    const auto& v = obj.at("v");
    if (v.is_boolean()) {
      cell.content = v.get<bool>();
    } else if (v.is_number()) {
      const double d = v.get<double>();
      if (!std::isfinite(d)) {
        throw Error(ErrorCode::kInvalidCell, where + ": non-finite number");
      }
      cell.content = d;
    } else if (v.is_string()) {
      cell.content = v.get<std::string>();
    } else {
      throw Error(ErrorCode::kInvalidCell,
                  where + ": \"v\" must be a number, string, or boolean");
    }
  }
  for (const auto& [key, value] : obj.items()) {
    if (key == "v" || key == "f") continue;
    if (key == "locked") {
      if (!value.is_boolean()) malformed(where, "\"locked\" must be a boolean");
      cell.locked = value.get<bool>();
    } else if (key == "fmt") {
      if (!value.is_string()) malformed(where, "\"fmt\" must be a string");
      const auto fmt = value.get<std::string>();
      if (fmt == "text") {
        cell.format = DeclaredFormat::kText;
      } else if (fmt == "general") {
        cell.format = DeclaredFormat::kGeneral;
      } else {
        malformed(where, "\"fmt\" must be \"text\" or \"general\"");
      }
    } else {
      warn(warnings, where, "unknown cell key '" + key + "' ignored");
    }
  }
  return cell;
}

}  // namespace

ordered_json cell_to_json(const Cell& cell) {
  ordered_json obj = ordered_json::object();
  if (cell.is_formula()) {
    obj["f"] = cell.formula_source();
  } else if (const auto* d = std::get_if<double>(&cell.content)) {
    obj["v"] = json_number(*d);
  } else if (const auto* s = std::get_if<std::string>(&cell.content)) {
    obj["v"] = *s;
  } else {
    obj["v"] = std::get<bool>(cell.content);
  }
  if (cell.locked) obj["locked"] = true;
  if (cell.format) {
    obj["fmt"] = *cell.format == DeclaredFormat::kText ? "text" : "general";
  }
  return obj;
}

Cell cell_from_json(const nlohmann::json& obj, const std::string& where) {
  return parse_cell(obj, where, nullptr);
}

std::string serialize_cell(const Cell& cell) { return cell_to_json(cell).dump(); }

Workbook parse_workbook(std::string_view document,
                        std::vector<Diagnostic>* warnings) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kMalformedDocument,
                "byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) malformed("document", "top level must be an object");

  Workbook wb;
  bool saw_version = false;
  for (const auto& [key, value] : doc.items()) {
    if (key == "version") {
      if (!value.is_number_integer() || value.get<int>() != 1) {
        malformed("version", "only version 1 is supported");
      }
      saw_version = true;
    } else if (key == "name") {
      if (!value.is_string()) malformed("name", "must be a string");
      wb.name = value.get<std::string>();
    } else if (key != "meta" && key != "sheets") {
      warn(warnings, "document", "unknown key '" + key + "' ignored");
    }
  }
  if (!saw_version) malformed("version", "missing");
  if (!doc.contains("name")) malformed("name", "missing");

  if (doc.contains("sheets")) {
    const auto& sheets = doc.at("sheets");
    if (!sheets.is_array()) malformed("sheets", "must be an array");
    for (std::size_t i = 0; i < sheets.size(); ++i) {
      const auto& s = sheets[i];
      const std::string where = "sheets[" + std::to_string(i) + "]";
      if (!s.is_object()) malformed(where, "must be an object");
      if (!s.contains("name") || !s.at("name").is_string()) {
        malformed(where, "sheet needs a string \"name\"");
      }
      Sheet sheet;
      sheet.name = s.at("name").get<std::string>();
      if (sheet.name.empty()) malformed(where, "sheet name is empty");
      if (wb.find_sheet(sheet.name)) {
        throw Error(ErrorCode::kDuplicateSheet, "sheet '" + sheet.name + "'");
      }
      for (const auto& [key, value] : s.items()) {
        if (key != "name" && key != "cells") {
          warn(warnings, where, "unknown sheet key '" + key + "' ignored");
        }
      }
      if (s.contains("cells")) {
        const auto& cells = s.at("cells");
        if (!cells.is_object()) malformed(where, "\"cells\" must be an object");
        for (const auto& [key, value] : cells.items()) {
          const std::string cell_where = quote_sheet(sheet.name) + "!" + key;
          const A1Ref ref = parse_a1(key, sheet.name);
          if (ref.qualified || ref.row_absolute || ref.col_absolute) {
            throw Error(ErrorCode::kInvalidAddress,
                        cell_where + ": cell keys are plain A1 addresses");
          }
          sheet.cells.emplace(ref.address.pos(),
                              parse_cell(value, cell_where, warnings));
        }
      }
      wb.sheets.push_back(std::move(sheet));
    }
  }

  if (doc.contains("meta")) {
    const auto& meta = doc.at("meta");
    if (!meta.is_object()) malformed("meta", "must be an object");
    for (const auto& [key, value] : meta.items()) {
      if (key == "modified") {
        if (!value.is_string()) malformed("meta.modified", "must be a string");
        wb.meta.modified = value.get<std::string>();
      } else if (key == "protectionEnabled") {
        if (!value.is_boolean()) {
          malformed("meta.protectionEnabled", "must be a boolean");
        }
        wb.meta.protection_enabled = value.get<bool>();
      } else if (key == "outputs") {
        if (!value.is_array()) malformed("meta.outputs", "must be an array");
        const std::string host = wb.sheets.empty() ? "" : wb.sheets.front().name;
        for (const auto& o : value) {
          if (!o.is_string()) malformed("meta.outputs", "entries must be strings");
          const auto text = o.get<std::string>();
          const A1Ref ref = parse_a1(text, host);
          if (!wb.find_cell(ref.address)) {
            throw Error(ErrorCode::kDanglingOutput,
                        "meta.outputs '" + text + "' names no existing cell");
          }
          wb.meta.outputs.push_back(ref.address);
        }
      } else {
        warn(warnings, "meta", "unknown key '" + key + "' ignored");
      }
    }
  }

  validate(wb);
  return wb;
}

std::string serialize_workbook(const Workbook& wb) {
  ordered_json doc = ordered_json::object();
  doc["version"] = 1;
  doc["name"] = wb.name;
  ordered_json meta = ordered_json::object();
  meta["modified"] = wb.meta.modified;
  ordered_json outputs = ordered_json::array();
  for (const auto& o : wb.meta.outputs) outputs.push_back(to_a1(o));
  meta["outputs"] = std::move(outputs);
  meta["protectionEnabled"] = wb.meta.protection_enabled;
  doc["meta"] = std::move(meta);
  ordered_json sheets = ordered_json::array();
  for (const auto& sheet : wb.sheets) {
    ordered_json s = ordered_json::object();
    s["name"] = sheet.name;
    ordered_json cells = ordered_json::object();
    for (const auto& [pos, cell] : sheet.cells) {
      cells[to_a1(pos)] = cell_to_json(cell);
    }
    s["cells"] = std::move(cells);
    sheets.push_back(std::move(s));
  }
  doc["sheets"] = std::move(sheets);
  return doc.dump(2) + "\n";
}

}  // namespace gridaudit
