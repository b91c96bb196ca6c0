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

#include "gridaudit/engine.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "gridaudit/error.hpp"
#include "json_util.hpp"

namespace gridaudit {

std::string_view error_value_text(ErrorValue e) {
  switch (e) {
    case ErrorValue::kDiv0: return "#DIV/0!";
    case ErrorValue::kValue: return "#VALUE!";
    case ErrorValue::kRef: return "#REF!";
    case ErrorValue::kCycle: return "#CYCLE!";
  }
  return "#VALUE!";
}

std::optional<ErrorValue> error_value_from_text(std::string_view text) {
  for (auto e : {ErrorValue::kDiv0, ErrorValue::kValue, ErrorValue::kRef, ErrorValue::kCycle}) {
    if (error_value_text(e) == text) return e;
  }
  return std::nullopt;
}

std::string display(const Value& v) {
  if (v.is_empty()) return "(empty)";
  if (v.is_number()) return format_number(v.as_number());
  if (v.is_text()) return "\"" + v.as_text() + "\"";
  if (v.is_boolean()) return v.as_boolean() ? "TRUE" : "FALSE";
  return std::string(error_value_text(v.as_error()));
}

Value constant_value(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell.content)) {
    if (cell.format == DeclaredFormat::kText) return Value::text(format_number(*d));
    return Value::number(*d);
  }
  if (const auto* s = std::get_if<std::string>(&cell.content)) return Value::text(*s);
  if (const auto* b = std::get_if<bool>(&cell.content)) return Value::boolean(*b);
  return Value{};
}

namespace {

struct Num {
  double value = 0;
  std::optional<ErrorValue> error;
};

Num to_number(const Value& v) {
  if (v.is_empty()) return {0, {}};
  if (v.is_number()) return {v.as_number(), {}};
  if (v.is_boolean()) return {v.as_boolean() ? 1.0 : 0.0, {}};
  if (v.is_error()) return {0, v.as_error()};
  if (auto d = parse_number(v.as_text())) return {*d, {}};
  return {0, ErrorValue::kValue};
}

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

// A boolean, or the error that prevented coercion.
Value to_bool(const Value& v) {
  if (v.is_error()) return v;
  if (v.is_boolean()) return v;
  if (v.is_empty()) return Value::boolean(false);
  if (v.is_number()) return Value::boolean(v.as_number() != 0.0);
  const auto up = upper(v.as_text());
  if (up == "TRUE") return Value::boolean(true);
  if (up == "FALSE") return Value::boolean(false);
  return Value::error(ErrorValue::kValue);
}

Value finite_or_error(double x) {
  if (!std::isfinite(x)) return Value::error(ErrorValue::kValue);
  return Value::number(x);
}

class Evaluator {
 public:
  Evaluator(const Workbook& wb, const DepGraph& g, const std::vector<Value>& values)
      : wb_(wb), g_(g), values_(values) {}

  Value eval_formula(const Expr& root) {
    Value v = eval(root);
    if (v.is_empty()) return Value::number(0);
    return v;
  }

 private:
  bool resolvable(const RefTarget& r) const {
    return r.in_bounds() && wb_.find_sheet(r.sheet) != nullptr;
  }

  Value lookup(const CellAddress& addr) const {
    auto id = g_.find(addr);
    if (!id) return Value{};
    return values_[*id];
  }

  Value eval(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::kNumber: return Value::number(e.number);
      case Expr::Kind::kText: return Value::text(e.text);
      case Expr::Kind::kBoolean: return Value::boolean(e.boolean);
      case Expr::Kind::kCellRef:
        if (!resolvable(e.ref)) return Value::error(ErrorValue::kRef);
        return lookup(e.ref.address());
      case Expr::Kind::kRangeRef:
        // No implicit intersection: a bare range is not a scalar.
        if (!resolvable(e.ref) || !resolvable(e.ref2)) return Value::error(ErrorValue::kRef);
        return Value::error(ErrorValue::kValue);
      case Expr::Kind::kUnary: {
        const Num x = to_number(eval(e.args[0]));
        if (x.error) return Value::error(*x.error);
        return Value::number(e.unary == UnaryOp::kNeg ? -x.value : x.value);
      }
      case Expr::Kind::kBinary: return binary(e);
      case Expr::Kind::kCall: return call(e);
    }
    return Value::error(ErrorValue::kValue);
  }

  Value binary(const Expr& e) {
    const Value lhs = eval(e.args[0]);
    const Value rhs = eval(e.args[1]);
    if (lhs.is_error()) return lhs;
    if (rhs.is_error()) return rhs;
    switch (e.binary) {
      case BinaryOp::kConcat: return Value::text(as_text(lhs) + as_text(rhs));
      case BinaryOp::kEq: case BinaryOp::kNe: case BinaryOp::kLt:
      case BinaryOp::kLe: case BinaryOp::kGt: case BinaryOp::kGe:
        return compare(e.binary, lhs, rhs);
      default: break;
    }
    const Num a = to_number(lhs);
    if (a.error) return Value::error(*a.error);
    const Num b = to_number(rhs);
    if (b.error) return Value::error(*b.error);
    switch (e.binary) {
      case BinaryOp::kAdd: return finite_or_error(a.value + b.value);
      case BinaryOp::kSub: return finite_or_error(a.value - b.value);
      case BinaryOp::kMul: return finite_or_error(a.value * b.value);
      case BinaryOp::kDiv:
        if (b.value == 0.0) return Value::error(ErrorValue::kDiv0);
        return finite_or_error(a.value / b.value);
      case BinaryOp::kPow:
        if (a.value == 0.0 && b.value < 0.0) return Value::error(ErrorValue::kDiv0);
        return finite_or_error(std::pow(a.value, b.value));
      default: break;
    }
    return Value::error(ErrorValue::kValue);
  }

  static std::string as_text(const Value& v) {
    if (v.is_empty()) return "";
    if (v.is_number()) return format_number(v.as_number());
    if (v.is_boolean()) return v.as_boolean() ? "TRUE" : "FALSE";
    return v.as_text();
  }

  // Type order for mixed comparisons: numbers < text < booleans. Text
  // compares case-insensitively. An empty operand takes the other side's
  // zero value.
  static Value compare(BinaryOp op, Value a, Value b) {
    auto zero_like = [](const Value& other) {
      if (other.is_text()) return Value::text("");
      if (other.is_boolean()) return Value::boolean(false);
      return Value::number(0);
    };
    if (a.is_empty()) a = zero_like(b);
    if (b.is_empty()) b = zero_like(a);
    auto rank = [](const Value& v) { return v.is_number() ? 0 : v.is_text() ? 1 : 2; };
    int cmp = 0;
    if (rank(a) != rank(b)) {
      cmp = rank(a) < rank(b) ? -1 : 1;
    } else if (a.is_number()) {
      cmp = a.as_number() < b.as_number() ? -1 : a.as_number() > b.as_number() ? 1 : 0;
    } else if (a.is_text()) {
      const auto x = upper(a.as_text());
      const auto y = upper(b.as_text());
      cmp = x < y ? -1 : x > y ? 1 : 0;
    } else {
      cmp = static_cast<int>(a.as_boolean()) - static_cast<int>(b.as_boolean());
    }
    switch (op) {
      case BinaryOp::kEq: return Value::boolean(cmp == 0);
      case BinaryOp::kNe: return Value::boolean(cmp != 0);
      case BinaryOp::kLt: return Value::boolean(cmp < 0);
      case BinaryOp::kLe: return Value::boolean(cmp <= 0);
      case BinaryOp::kGt: return Value::boolean(cmp > 0);
      default: return Value::boolean(cmp >= 0);
    }
  }

  // Values reached through a reference argument, or nullopt if `arg` is an
  // ordinary expression. A broken reference yields a single #REF!.
  std::optional<std::vector<Value>> referenced(const Expr& arg) {
    if (arg.kind == Expr::Kind::kCellRef) {
      if (!resolvable(arg.ref)) return std::vector<Value>{Value::error(ErrorValue::kRef)};
      return std::vector<Value>{lookup(arg.ref.address())};
    }
    if (arg.kind == Expr::Kind::kRangeRef) {
      if (!resolvable(arg.ref) || !resolvable(arg.ref2)) {
        return std::vector<Value>{Value::error(ErrorValue::kRef)};
      }
      std::vector<Value> out;
      for (auto r = arg.ref.row; r <= arg.ref2.row; ++r) {
        for (auto c = arg.ref.col; c <= arg.ref2.col; ++c) {
          out.push_back(lookup({arg.ref.sheet, r, c}));
        }
      }
      return out;
    }
    return std::nullopt;
  }

  struct Collected {
    std::vector<double> numbers;
    std::optional<ErrorValue> error;
  };

  Collected aggregate_inputs(const Expr& call) {
    Collected out;
    for (const auto& arg : call.args) {
      if (auto refs = referenced(arg)) {
        for (const auto& v : *refs) {
          if (v.is_error()) {
            out.error = v.as_error();
            return out;
          }
          if (v.is_number()) out.numbers.push_back(v.as_number());
        }
        continue;
      }
      const Value v = eval(arg);
      const Num n = to_number(v);
      if (n.error) {
        out.error = n.error;
        return out;
      }
      out.numbers.push_back(n.value);
    }
    return out;
  }

  Value logical(const Expr& call) {
    std::vector<bool> seen;
    for (const auto& arg : call.args) {
      if (auto refs = referenced(arg)) {
        for (const auto& v : *refs) {
          if (v.is_error()) return v;
          if (v.is_boolean()) seen.push_back(v.as_boolean());
          if (v.is_number()) seen.push_back(v.as_number() != 0.0);
        }
        continue;
      }
      const Value b = to_bool(eval(arg));
      if (b.is_error()) return b;
      seen.push_back(b.as_boolean());
    }
    if (seen.empty()) return Value::error(ErrorValue::kValue);
    if (call.function == Function::kAnd) {
      return Value::boolean(std::all_of(seen.begin(), seen.end(), [](bool x) { return x; }));
    }
    return Value::boolean(std::any_of(seen.begin(), seen.end(), [](bool x) { return x; }));
  }

  Value call(const Expr& e) {
    switch (e.function) {
      case Function::kSum:
      case Function::kAverage:
      case Function::kMin:
      case Function::kMax:
      case Function::kCount: {
        const Collected c = aggregate_inputs(e);
        if (c.error) return Value::error(*c.error);
        const auto& xs = c.numbers;
        switch (e.function) {
          case Function::kSum: {
            double s = 0;
            for (double x : xs) s += x;
            return finite_or_error(s);
          }
          case Function::kAverage: {
            if (xs.empty()) return Value::error(ErrorValue::kDiv0);
            double s = 0;
            for (double x : xs) s += x;
            return finite_or_error(s / static_cast<double>(xs.size()));
          }
          case Function::kMin:
            return Value::number(xs.empty() ? 0 : *std::min_element(xs.begin(), xs.end()));
          case Function::kMax:
            return Value::number(xs.empty() ? 0 : *std::max_element(xs.begin(), xs.end()));
          default:
            return Value::number(static_cast<double>(xs.size()));
        }
      }
      case Function::kIf: {
        const Value cond = to_bool(eval(e.args[0]));
        if (cond.is_error()) return cond;
        if (cond.as_boolean()) return eval(e.args[1]);
        if (e.args.size() > 2) return eval(e.args[2]);
        return Value::boolean(false);
      }
      case Function::kAnd:
      case Function::kOr:
        return logical(e);
      case Function::kNot: {
        const Value b = to_bool(eval(e.args[0]));
        if (b.is_error()) return b;
        return Value::boolean(!b.as_boolean());
      }
      case Function::kRound: {
        const Num x = to_number(eval(e.args[0]));
        if (x.error) return Value::error(*x.error);
        const Num d = to_number(eval(e.args[1]));
        if (d.error) return Value::error(*d.error);
        const double digits = std::trunc(d.value);
        const double scale = std::pow(10.0, digits);
        // std::round is half-away-from-zero, matching spreadsheet ROUND.
        return finite_or_error(std::round(x.value * scale) / scale);
      }
      case Function::kAbs: {
        const Num x = to_number(eval(e.args[0]));
        if (x.error) return Value::error(*x.error);
        return Value::number(std::fabs(x.value));
      }
    }
    return Value::error(ErrorValue::kValue);
  }

  const Workbook& wb_;
  const DepGraph& g_;
  const std::vector<Value>& values_;
};

}  // namespace

ValueMap evaluate(const Workbook& wb, const FormulaIndex& index, const DepGraph& g) {
  std::vector<Value> values(g.nodes().size());
  for (NodeId id = 0; id < g.nodes().size(); ++id) {
    const auto& n = g.node(id);
    if (n.is_ref_error) {
      values[id] = Value::error(ErrorValue::kRef);
    } else if (const Cell* c = wb.find_cell(n.address); c && !c->is_formula()) {
      values[id] = constant_value(*c);
    }
  }
  const auto cyc = g.on_cycle();
  Evaluator ev(wb, g, values);
  for (const auto& comp : g.components()) {
    for (NodeId id : comp) {
      const auto& n = g.node(id);
      if (!n.is_formula) continue;
      if (cyc[id]) {
        values[id] = Value::error(ErrorValue::kCycle);
        continue;
      }
      values[id] = ev.eval_formula(index.find(n.address)->ast.root);
    }
  }
  ValueMap out;
  for (const auto& sheet : wb.sheets) {
    for (const auto& [pos, cell] : sheet.cells) {
      CellAddress addr{sheet.name, pos.row, pos.col};
      out.emplace(addr, values[*g.find(addr)]);
    }
  }
  return out;
}

ValueMap reevaluate(const Workbook& wb, const FormulaIndex& index, const DepGraph& g,
                    const ValueMap& base, const CellAddress& changed, const Cell& replacement) {
  if (replacement.is_formula()) {
    throw Error(ErrorCode::kInvalidArgument, "replacement for " + to_a1(changed, true) +
                                                 " must be a constant");
  }
  const auto start = g.find(changed);
  if (!start) {
    throw Error(ErrorCode::kInvalidArgument, to_a1(changed, true) + " is not in the graph");
  }
  std::vector<Value> values(g.nodes().size());
  for (NodeId id = 0; id < g.nodes().size(); ++id) {
    const auto& n = g.node(id);
    if (n.is_ref_error) {
      values[id] = Value::error(ErrorValue::kRef);
    } else if (auto it = base.find(n.address); it != base.end()) {
      values[id] = it->second;
    }
  }
  values[*start] = constant_value(replacement);

  std::vector<bool> dirty(g.nodes().size(), false);
  std::vector<NodeId> stack{*start};
  dirty[*start] = true;
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    for (NodeId d : g.node(id).dependents) {
      if (!dirty[d]) {
        dirty[d] = true;
        stack.push_back(d);
      }
    }
  }

  const auto cyc = g.on_cycle();
  Evaluator ev(wb, g, values);
  ValueMap out;
  out.emplace(changed, values[*start]);
  for (const auto& comp : g.components()) {
    for (NodeId id : comp) {
      const auto& n = g.node(id);
      if (!dirty[id] || id == *start || !n.is_formula) continue;
      values[id] = cyc[id] ? Value::error(ErrorValue::kCycle)
                           : ev.eval_formula(index.find(n.address)->ast.root);
      out.emplace(n.address, values[id]);
    }
  }
  return out;
}

ValueMap evaluate(const Workbook& wb) {
  FormulaIndex index(wb);
  const DepGraph g = build_graph(wb, index);
  return evaluate(wb, index, g);
}

bool values_match(const Value& expected, const Value& actual, Tolerance tol) {
  if (expected.is_number() && actual.is_number()) {
    const double a = expected.as_number();
    const double b = actual.as_number();
    const double scale = std::max(std::fabs(a), std::fabs(b));
    return std::fabs(a - b) <= std::max(tol.absolute, tol.relative * scale);
  }
  return expected == actual;
}

Snapshot snapshot(const Workbook& wb, std::string created_at) {
  if (wb.meta.outputs.empty()) {
    throw Error(ErrorCode::kNoDeclaredOutputs, "workbook '" + wb.name + "'");
  }
  const ValueMap values = evaluate(wb);
  Snapshot snap;
  snap.workbook_name = wb.name;
  snap.created_at = std::move(created_at);
  for (const auto& sheet : wb.sheets) {
    for (const auto& [pos, cell] : sheet.cells) {
      if (cell.is_formula()) continue;
      Cell input = cell;
      input.locked = false;
      snap.inputs.emplace(CellAddress{sheet.name, pos.row, pos.col}, std::move(input));
    }
  }
  for (const auto& out : wb.meta.outputs) {
    const Value& v = values.at(out);
    if (v.is_error()) {
      throw Error(ErrorCode::kOutputIsError,
                  to_a1(out) + " evaluates to " + std::string(error_value_text(v.as_error())));
    }
    snap.outputs.emplace(out, v);
  }
  return snap;
}

RecheckReport recheck(const Workbook& wb, const Snapshot& snap, Tolerance tol) {
  Workbook applied = wb;
  for (const auto& [addr, input] : snap.inputs) {
    Sheet* sheet = applied.find_sheet(addr.sheet);
    Cell* cell = nullptr;
    if (sheet) {
      if (auto it = sheet->cells.find(addr.pos()); it != sheet->cells.end()) cell = &it->second;
    }
    if (!cell) throw Error(ErrorCode::kMissingInputCell, to_a1(addr));
    if (cell->is_formula()) continue;  // the logic changed; keep it
    cell->content = input.content;
    cell->format = input.format;
  }
  const ValueMap values = evaluate(applied);
  RecheckReport report;
  for (const auto& [addr, expected] : snap.outputs) {
    auto it = values.find(addr);
    if (it == values.end()) {
      report.missing.push_back(addr);
    } else if (values_match(expected, it->second, tol)) {
      report.matches.push_back(addr);
    } else {
      report.mismatches.push_back({addr, expected, it->second});
    }
  }
  return report;
}

namespace {

nlohmann::ordered_json value_to_json(const Value& v) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  if (v.is_empty()) {
    j["type"] = "empty";
  } else if (v.is_number()) {
    j["type"] = "number";
    j["value"] = json_number(v.as_number());
  } else if (v.is_text()) {
    j["type"] = "text";
    j["value"] = v.as_text();
  } else if (v.is_boolean()) {
    j["type"] = "boolean";
    j["value"] = v.as_boolean();
  } else {
    j["type"] = "error";
    j["value"] = std::string(error_value_text(v.as_error()));
  }
  return j;
}

Value value_from_json(const nlohmann::json& j, const std::string& where) {
  const auto type = require<std::string>(j, "type", where);
  if (type == "empty") return Value{};
  if (type == "number") return Value::number(require<double>(j, "value", where));
  if (type == "text") return Value::text(require<std::string>(j, "value", where));
  if (type == "boolean") return Value::boolean(require<bool>(j, "value", where));
  if (type == "error") {
    if (auto e = error_value_from_text(require<std::string>(j, "value", where))) {
      return Value::error(*e);
    }
  }
  throw Error(ErrorCode::kMalformedDocument, where + ": bad value");
}

}  // namespace

nlohmann::ordered_json value_json(const Value& v) { return value_to_json(v); }
Value value_from_json_doc(const nlohmann::json& j, const std::string& where) {
  return value_from_json(j, where);
}

std::string serialize_snapshot(const Snapshot& snap) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  doc["version"] = 1;
  doc["workbookName"] = snap.workbook_name;
  doc["createdAt"] = snap.created_at;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  for (const auto& [addr, cell] : snap.inputs) inputs[to_a1(addr)] = cell_to_json(cell);
  doc["inputCells"] = std::move(inputs);
  nlohmann::ordered_json outputs = nlohmann::ordered_json::object();
  for (const auto& [addr, v] : snap.outputs) outputs[to_a1(addr)] = value_to_json(v);
  doc["outputValues"] = std::move(outputs);
  return doc.dump(2) + "\n";
}

Snapshot parse_snapshot(std::string_view document) {
  const auto doc = parse_json_document(document, "snapshot");
  Snapshot snap;
  snap.workbook_name = require<std::string>(doc, "workbookName", "snapshot");
  snap.created_at = optional_field<std::string>(doc, "createdAt", "", "snapshot");
  if (doc.contains("inputCells")) {
    for (const auto& [key, value] : doc.at("inputCells").items()) {
      const A1Ref ref = parse_a1(key, "");
      Cell cell = cell_from_json(value, "snapshot input " + key);
      if (cell.is_formula()) {
        throw Error(ErrorCode::kMalformedDocument, "snapshot input " + key + " is a formula");
      }
      snap.inputs.emplace(ref.address, std::move(cell));
    }
  }
  if (doc.contains("outputValues")) {
    for (const auto& [key, value] : doc.at("outputValues").items()) {
      const A1Ref ref = parse_a1(key, "");
      snap.outputs.emplace(ref.address, value_from_json(value, "snapshot output " + key));
    }
  }
  return snap;
}

}  // namespace gridaudit
