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

#include "gridaudit/model.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "gridaudit/error.hpp"

namespace gridaudit {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedDocument: return "MalformedDocument";
    case ErrorCode::kInvalidAddress: return "InvalidAddress";
    case ErrorCode::kInvalidCell: return "InvalidCell";
    case ErrorCode::kDuplicateSheet: return "DuplicateSheet";
    case ErrorCode::kDanglingOutput: return "DanglingOutput";
    case ErrorCode::kSyntaxError: return "SyntaxError";
    case ErrorCode::kUnknownFunction: return "UnknownFunction";
    case ErrorCode::kUnknownName: return "UnknownName";
    case ErrorCode::kExplosionCap: return "ExplosionCap";
    case ErrorCode::kNoDeclaredOutputs: return "NoDeclaredOutputs";
    case ErrorCode::kOutputIsError: return "OutputIsError";
    case ErrorCode::kMissingInputCell: return "MissingInputCell";
    case ErrorCode::kInvalidTeamSize: return "InvalidTeamSize";
    case ErrorCode::kModuleMismatch: return "ModuleMismatch";
    case ErrorCode::kEmptyTruth: return "EmptyTruth";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

bool in_grid(std::int64_t row, std::int64_t col) {
  return row >= 1 && row <= kMaxRows && col >= 1 && col <= kMaxCols;
}

std::optional<std::int64_t> column_from_letters(std::string_view letters) {
  if (letters.empty() || letters.size() > 3) return std::nullopt;
  std::int64_t col = 0;
  for (char ch : letters) {
    const auto c = static_cast<unsigned char>(ch);
    if (!std::isalpha(c)) return std::nullopt;
    col = col * 26 + (std::toupper(c) - 'A' + 1);
  }
  if (col > kMaxCols) return std::nullopt;
  return col;
}

std::string column_letters(std::int64_t col) {
  std::string out;
  while (col > 0) {
    const auto rem = (col - 1) % 26;
    out.insert(out.begin(), static_cast<char>('A' + rem));
    col = (col - 1) / 26;
  }
  return out;
}

bool sheet_needs_quotes(std::string_view name) {
  if (name.empty()) return true;
  if (std::isdigit(static_cast<unsigned char>(name.front()))) return true;
  for (char ch : name) {
    const auto c = static_cast<unsigned char>(ch);
    if (!(std::isalnum(c) || c == '_' || c == '.')) return true;
  }
  // A bare name that itself looks like a cell reference would be ambiguous.
  std::size_t i = 0;
  while (i < name.size() && std::isalpha(static_cast<unsigned char>(name[i]))) ++i;
  if (i > 0 && i < name.size()) {
    bool digits = true;
    for (std::size_t j = i; j < name.size(); ++j) {
      if (!std::isdigit(static_cast<unsigned char>(name[j]))) digits = false;
    }
    if (digits && column_from_letters(name.substr(0, i))) return true;
  }
  return false;
}

std::string quote_sheet(std::string_view name) {
  if (!sheet_needs_quotes(name)) return std::string(name);
  std::string out = "'";
  for (char ch : name) {
    if (ch == '\'') out += '\'';
    out += ch;
  }
  out += '\'';
  return out;
}

namespace {

[[noreturn]] void bad_address(std::string_view ref, const std::string& why) {
  throw Error(ErrorCode::kInvalidAddress,
              "'" + std::string(ref) + "': " + why);
}

}  // namespace

A1Ref parse_a1(std::string_view ref, std::string_view host_sheet) {
  A1Ref out;
  std::string_view rest = ref;
  std::string sheet(host_sheet);

  if (!rest.empty() && rest.front() == '\'') {
    std::string name;
    std::size_t i = 1;
    bool closed = false;
    while (i < rest.size()) {
      if (rest[i] == '\'') {
        if (i + 1 < rest.size() && rest[i + 1] == '\'') {
          name += '\'';
          i += 2;
          continue;
        }
        closed = true;
        ++i;
        break;
      }
      name += rest[i++];
    }
    if (!closed || i >= rest.size() || rest[i] != '!') {
      bad_address(ref, "unterminated sheet qualifier");
    }
    sheet = name;
    out.qualified = true;
    rest = rest.substr(i + 1);
  } else if (auto bang = rest.find('!'); bang != std::string_view::npos) {
    sheet = std::string(rest.substr(0, bang));
    out.qualified = true;
    rest = rest.substr(bang + 1);
  }
  if (sheet.empty()) bad_address(ref, "empty sheet name");

  std::size_t i = 0;
  if (i < rest.size() && rest[i] == '$') {
    out.col_absolute = true;
    ++i;
  }
  const std::size_t letters_begin = i;
  while (i < rest.size() && std::isalpha(static_cast<unsigned char>(rest[i]))) ++i;
  const auto letters = rest.substr(letters_begin, i - letters_begin);
  if (i < rest.size() && rest[i] == '$') {
    out.row_absolute = true;
    ++i;
  }
  const std::size_t digits_begin = i;
  while (i < rest.size() && std::isdigit(static_cast<unsigned char>(rest[i]))) ++i;
  const auto digits = rest.substr(digits_begin, i - digits_begin);
  if (i != rest.size() || letters.empty() || digits.empty()) {
    bad_address(ref, "expected column letters followed by row digits");
  }
  const auto col = column_from_letters(letters);
  if (!col) bad_address(ref, "column out of range");
  if (digits.size() > 7 || digits.front() == '0') {
    bad_address(ref, "row out of range");
  }
  std::int64_t row = 0;
  std::from_chars(digits.data(), digits.data() + digits.size(), row);
  if (row < 1 || row > kMaxRows) bad_address(ref, "row out of range");

  out.address = CellAddress{std::move(sheet), row, *col};
  return out;
}

std::string to_a1(GridPos pos) {
  return column_letters(pos.col) + std::to_string(pos.row);
}

std::string to_a1(const CellAddress& addr, bool qualify) {
  std::string out;
  if (qualify) out = quote_sheet(addr.sheet) + "!";
  return out + to_a1(addr.pos());
}

std::string to_a1(const A1Ref& ref, bool qualify) {
  std::string out;
  if (qualify) out = quote_sheet(ref.address.sheet) + "!";
  if (ref.col_absolute) out += '$';
  out += column_letters(ref.address.col);
  if (ref.row_absolute) out += '$';
  out += std::to_string(ref.address.row);
  return out;
}

std::string format_number(double value) {
  if (value == 0.0) return "0";  // folds -0
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) return "0";
  return std::string(buf.data(), end);
}

std::optional<double> parse_number(std::string_view text) {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  if (b == e) return std::nullopt;
  std::string_view body = text.substr(b, e - b);
  if (body.front() == '+') body.remove_prefix(1);
  if (body.empty()) return std::nullopt;
  // from_chars accepts "inf"/"nan"; spreadsheets do not.
  for (char ch : body) {
    const auto c = static_cast<unsigned char>(ch);
    if (!(std::isdigit(c) || ch == '.' || ch == '-' || ch == 'e' ||
          ch == 'E' || ch == '+')) {
      return std::nullopt;
    }
  }
  double value = 0;
  auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
  if (ec != std::errc{} || ptr != body.data() + body.size()) return std::nullopt;
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

std::optional<Constant> Cell::constant() const {
  if (const auto* d = std::get_if<double>(&content)) return Constant{*d};
  if (const auto* s = std::get_if<std::string>(&content)) return Constant{*s};
  if (const auto* b = std::get_if<bool>(&content)) return Constant{*b};
  return std::nullopt;
}

std::optional<double> numeric_text_value(const Cell& cell) {
  if (const auto* s = std::get_if<std::string>(&cell.content)) {
    return parse_number(*s);
  }
  if (const auto* d = std::get_if<double>(&cell.content)) {
    if (cell.format == DeclaredFormat::kText) return *d;
  }
  return std::nullopt;
}

const Cell* Sheet::find(GridPos pos) const {
  auto it = cells.find(pos);
  return it == cells.end() ? nullptr : &it->second;
}

const Sheet* Workbook::find_sheet(std::string_view sheet_name) const {
  for (const auto& s : sheets) {
    if (s.name == sheet_name) return &s;
  }
  return nullptr;
}

Sheet* Workbook::find_sheet(std::string_view sheet_name) {
  for (auto& s : sheets) {
    if (s.name == sheet_name) return &s;
  }
  return nullptr;
}

const Cell* Workbook::find_cell(const CellAddress& addr) const {
  const Sheet* s = find_sheet(addr.sheet);
  return s ? s->find(addr.pos()) : nullptr;
}

int Workbook::sheet_index(std::string_view sheet_name) const {
  for (std::size_t i = 0; i < sheets.size(); ++i) {
    if (sheets[i].name == sheet_name) return static_cast<int>(i);
  }
  return -1;
}

std::size_t Workbook::cell_count() const {
  std::size_t n = 0;
  for (const auto& s : sheets) n += s.cells.size();
  return n;
}

std::size_t Workbook::formula_count() const {
  std::size_t n = 0;
  for (const auto& s : sheets) {
    for (const auto& [pos, cell] : s.cells) n += cell.is_formula() ? 1 : 0;
  }
  return n;
}

void validate(const Workbook& wb) {
  std::set<std::string> names;
  for (const auto& sheet : wb.sheets) {
    if (sheet.name.empty()) {
      throw Error(ErrorCode::kMalformedDocument, "sheet with empty name");
    }
    if (!names.insert(sheet.name).second) {
      throw Error(ErrorCode::kDuplicateSheet, "sheet '" + sheet.name + "'");
    }
    for (const auto& [pos, cell] : sheet.cells) {
      if (!in_grid(pos.row, pos.col)) {
        throw Error(ErrorCode::kInvalidAddress,
                    sheet.name + " row " + std::to_string(pos.row) + " col " +
                        std::to_string(pos.col));
      }
      if (cell.is_formula()) {
        const auto& src = cell.formula_source();
        if (src.size() < 2 || src.front() != '=') {
          throw Error(ErrorCode::kInvalidCell,
                      to_a1(CellAddress{sheet.name, pos.row, pos.col}) +
                          ": formula must be '=' followed by an expression");
        }
      } else if (const auto* d = std::get_if<double>(&cell.content)) {
        if (!std::isfinite(*d)) {
          throw Error(ErrorCode::kInvalidCell,
                      to_a1(CellAddress{sheet.name, pos.row, pos.col}) +
                          ": non-finite number");
        }
      }
    }
  }
  for (const auto& out : wb.meta.outputs) {
    if (!wb.find_cell(out)) {
      throw Error(ErrorCode::kDanglingOutput, to_a1(out));
    }
  }
}

LocationOrder::LocationOrder(const Workbook& wb) {
  for (std::size_t i = 0; i < wb.sheets.size(); ++i) {
    rank_.emplace(wb.sheets[i].name, static_cast<int>(i));
  }
}

int LocationOrder::sheet_rank(std::string_view sheet) const {
  auto it = rank_.find(sheet);
  return it == rank_.end() ? static_cast<int>(rank_.size()) : it->second;
}

bool LocationOrder::operator()(const CellAddress& a, const CellAddress& b) const {
  const int ra = sheet_rank(a.sheet);
  const int rb = sheet_rank(b.sheet);
  if (ra != rb) return ra < rb;
  if (a.sheet != b.sheet) return a.sheet < b.sheet;
  return a.pos() < b.pos();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write '" + path + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::kIoError, "short write to '" + path + "'");
}

Workbook load_workbook(const std::string& path, std::vector<Diagnostic>* warnings) {
  return parse_workbook(read_file(path), warnings);
}

void save_workbook(const Workbook& wb, const std::string& path) {
  write_file(path, serialize_workbook(wb));
}

}  // namespace gridaudit
