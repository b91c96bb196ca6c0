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

#include "gridaudit/formula.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <set>
#include <utility>

#include "gridaudit/error.hpp"

namespace gridaudit {

namespace {

struct FunctionInfo {
  Function id;
  std::string_view name;
  int min_args;
  int max_args;  // -1: unbounded
};

constexpr std::array<FunctionInfo, 11> kFunctions = {{
    {Function::kSum, "SUM", 1, -1},
    {Function::kAverage, "AVERAGE", 1, -1},
    {Function::kMin, "MIN", 1, -1},
    {Function::kMax, "MAX", 1, -1},
    {Function::kCount, "COUNT", 1, -1},
    {Function::kIf, "IF", 2, 3},
    {Function::kAnd, "AND", 1, -1},
    {Function::kOr, "OR", 1, -1},
    {Function::kNot, "NOT", 1, 1},
    {Function::kRound, "ROUND", 2, 2},
    {Function::kAbs, "ABS", 1, 1},
}};

const FunctionInfo& info(Function f) {
  for (const auto& fi : kFunctions) {
    if (fi.id == f) return fi;
  }
  return kFunctions.front();
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return out;
}

}  // namespace

std::string_view function_name(Function f) { return info(f).name; }

std::optional<Function> function_from_name(std::string_view name) {
  const auto up = upper(name);
  for (const auto& fi : kFunctions) {
    if (fi.name == up) return fi.id;
  }
  return std::nullopt;
}

bool is_aggregate(Function f) {
  return f == Function::kSum || f == Function::kAverage || f == Function::kMin ||
         f == Function::kMax || f == Function::kCount;
}

std::string_view binary_op_text(BinaryOp op) {
  switch (op) {
    case BinaryOp::kAdd: return "+";
    case BinaryOp::kSub: return "-";
    case BinaryOp::kMul: return "*";
    case BinaryOp::kDiv: return "/";
    case BinaryOp::kPow: return "^";
    case BinaryOp::kConcat: return "&";
    case BinaryOp::kEq: return "=";
    case BinaryOp::kNe: return "<>";
    case BinaryOp::kLt: return "<";
    case BinaryOp::kLe: return "<=";
    case BinaryOp::kGt: return ">";
    case BinaryOp::kGe: return ">=";
  }
  return "?";
}

bool Expr::operator==(const Expr& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case Kind::kNumber: return number == o.number;
    case Kind::kText: return text == o.text;
    case Kind::kBoolean: return boolean == o.boolean;
    case Kind::kCellRef: return ref == o.ref;
    case Kind::kRangeRef: return ref == o.ref && ref2 == o.ref2;
    case Kind::kUnary: return unary == o.unary && args == o.args;
    case Kind::kBinary: return binary == o.binary && args == o.args;
    case Kind::kCall: return function == o.function && args == o.args;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

enum class Tok {
  kNumber, kString, kBool, kRef, kFunc, kOp, kLParen, kRParen, kComma, kColon, kEnd
};

struct Token {
  Tok type = Tok::kEnd;
  std::size_t offset = 0;
  double number = 0;
  std::string text;  // string literal body, operator text, function name
  bool boolean = false;
  RefTarget ref;
};

class Lexer {
 public:
  Lexer(std::string_view src, std::size_t base, std::string host_sheet)
      : src_(src), base_(base), host_(std::move(host_sheet)) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.offset = base_ + pos_;
      if (pos_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      const char c = src_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c)) ||
          (c == '.' && pos_ + 1 < src_.size() &&
           std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        lex_number(t);
      } else if (c == '"') {
        lex_string(t);
      } else if (c == '\'') {
        lex_quoted_ref(t);
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
        lex_word(t);
      } else {
        lex_punct(t);
      }
      out.push_back(std::move(t));
    }
  }

 private:
  [[noreturn]] void fail(const std::string& what, std::size_t at,
                         ErrorCode code = ErrorCode::kSyntaxError) const {
    throw FormulaError(code, what, base_ + at);
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) {
      ++pos_;
    }
  }

  void lex_number(Token& t) {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        digits();
      } else {
        pos_ = save;
      }
    }
    double v = 0;
    auto [p, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, v);
    if (ec != std::errc{} || p != src_.data() + pos_) fail("bad number", start);
    t.type = Tok::kNumber;
    t.number = v;
  }

  void lex_string(Token& t) {
    const std::size_t start = pos_++;
    std::string body;
    for (;;) {
      if (pos_ >= src_.size()) fail("unterminated string", start);
      const char c = src_[pos_++];
      if (c == '"') {
        if (pos_ < src_.size() && src_[pos_] == '"') {
          body += '"';
          ++pos_;
          continue;
        }
        break;
      }
      body += c;
    }
    t.type = Tok::kString;
    t.text = std::move(body);
  }

  // 'Sheet name'!A1
  void lex_quoted_ref(Token& t) {
    const std::size_t start = pos_++;
    std::string name;
    for (;;) {
      if (pos_ >= src_.size()) fail("unterminated sheet name", start);
      const char c = src_[pos_++];
      if (c == '\'') {
        if (pos_ < src_.size() && src_[pos_] == '\'') {
          name += '\'';
          ++pos_;
          continue;
        }
        break;
      }
      name += c;
    }
    if (name.empty()) fail("empty sheet name", start);
    if (pos_ >= src_.size() || src_[pos_] != '!') fail("expected '!' after sheet name", pos_);
    ++pos_;
    const std::size_t ref_start = pos_;
    const auto word = read_word();
    if (!cell_ref(word, name, true, t.ref)) fail("expected a cell reference", ref_start);
    t.type = Tok::kRef;
  }

  std::string_view read_word() {
    const std::size_t start = pos_;
    while (pos_ < src_.size()) {
      const auto c = static_cast<unsigned char>(src_[pos_]);
      if (std::isalnum(c) || c == '_' || c == '.' || c == '$') {
        ++pos_;
      } else {
        break;
      }
    }
    return src_.substr(start, pos_ - start);
  }

  // $?LETTERS$?DIGITS, rows up to nine digits and columns up to three
  // letters; coordinates outside the grid are kept and resolve to #REF!.
  static bool cell_ref(std::string_view w, std::string sheet, bool qualified,
                       RefTarget& out) {
    std::size_t i = 0;
    RefTarget r;
    if (i < w.size() && w[i] == '$') {
      r.col_absolute = true;
      ++i;
    }
    const std::size_t lb = i;
    while (i < w.size() && std::isalpha(static_cast<unsigned char>(w[i]))) ++i;
    const std::size_t nletters = i - lb;
    if (nletters == 0 || nletters > 3) return false;
    std::int64_t col = 0;
    for (std::size_t k = lb; k < i; ++k) {
      col = col * 26 + (std::toupper(static_cast<unsigned char>(w[k])) - 'A' + 1);
    }
    if (i < w.size() && w[i] == '$') {
      r.row_absolute = true;
      ++i;
    }
    const std::size_t db = i;
    while (i < w.size() && std::isdigit(static_cast<unsigned char>(w[i]))) ++i;
    const std::size_t ndigits = i - db;
    if (i != w.size() || ndigits == 0 || ndigits > 9 || w[db] == '0') return false;
    std::int64_t row = 0;
    std::from_chars(w.data() + db, w.data() + i, row);
    r.sheet = std::move(sheet);
    r.row = row;
    r.col = col;
    r.qualified = qualified;
    out = std::move(r);
    return true;
  }

  void lex_word(Token& t) {
    const std::size_t start = pos_;
    const auto word = read_word();
    if (pos_ < src_.size() && src_[pos_] == '!') {
      if (word.find('$') != std::string_view::npos) fail("bad sheet name", start);
      ++pos_;
      const std::size_t ref_start = pos_;
      const auto ref_word = read_word();
      if (!cell_ref(ref_word, std::string(word), true, t.ref)) {
        fail("expected a cell reference", ref_start);
      }
      t.type = Tok::kRef;
      return;
    }
    std::size_t look = pos_;
    while (look < src_.size() && std::isspace(static_cast<unsigned char>(src_[look]))) ++look;
    if (look < src_.size() && src_[look] == '(') {
      const auto f = function_from_name(word);
      if (!f) {
        fail("unknown function '" + std::string(word) + "'", start,
             ErrorCode::kUnknownFunction);
      }
      t.type = Tok::kFunc;
      t.text = std::string(function_name(*f));
      return;
    }
    const auto up = upper(word);
    if (up == "TRUE" || up == "FALSE") {
      t.type = Tok::kBool;
      t.boolean = up == "TRUE";
      return;
    }
    if (cell_ref(word, host_, false, t.ref)) {
      t.type = Tok::kRef;
      return;
    }
    fail("unknown name '" + std::string(word) + "'", start, ErrorCode::kUnknownName);
  }

  void lex_punct(Token& t) {
    const char c = src_[pos_];
    const char n = pos_ + 1 < src_.size() ? src_[pos_ + 1] : '\0';
    auto op = [&](std::string text) {
      t.type = Tok::kOp;
      pos_ += text.size();
      t.text = std::move(text);
    };
    switch (c) {
      case '(': t.type = Tok::kLParen; ++pos_; return;
      case ')': t.type = Tok::kRParen; ++pos_; return;
      case ',': t.type = Tok::kComma; ++pos_; return;
      case ':': t.type = Tok::kColon; ++pos_; return;
      case '+': case '-': case '*': case '/': case '^': case '&': case '=':
        op(std::string(1, c));
        return;
      case '<':
        if (n == '=' || n == '>') {
          op(std::string{c, n});
        } else {
          op("<");
        }
        return;
      case '>':
        if (n == '=') {
          op(">=");
        } else {
          op(">");
        }
        return;
      default:
        fail(std::string("unexpected character '") + c + "'", pos_);
    }
  }

  std::string_view src_;
  std::size_t base_;
  std::string host_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Expr parse() {
    Expr e = comparison();
    if (peek().type != Tok::kEnd) fail("unexpected trailing input");
    return e;
  }

 private:
  const Token& peek() const { return toks_[i_]; }
  Token take() { return toks_[i_++]; }

  [[noreturn]] void fail(const std::string& what) const {
    throw FormulaError(ErrorCode::kSyntaxError, what, peek().offset);
  }

  bool is_op(std::string_view text) const {
    return peek().type == Tok::kOp && peek().text == text;
  }

  static Expr binary(BinaryOp op, Expr lhs, Expr rhs, std::size_t offset) {
    Expr e;
    e.kind = Expr::Kind::kBinary;
    e.binary = op;
    e.offset = offset;
    e.args.push_back(std::move(lhs));
    e.args.push_back(std::move(rhs));
    return e;
  }

  Expr comparison() {
    Expr lhs = concat();
    for (;;) {
      std::optional<BinaryOp> op;
      if (is_op("=")) op = BinaryOp::kEq;
      else if (is_op("<>")) op = BinaryOp::kNe;
      else if (is_op("<")) op = BinaryOp::kLt;
      else if (is_op("<=")) op = BinaryOp::kLe;
      else if (is_op(">")) op = BinaryOp::kGt;
      else if (is_op(">=")) op = BinaryOp::kGe;
      if (!op) return lhs;
      const auto at = take().offset;
      lhs = binary(*op, std::move(lhs), concat(), at);
    }
  }

  Expr concat() {
    Expr lhs = additive();
    while (is_op("&")) {
      const auto at = take().offset;
      lhs = binary(BinaryOp::kConcat, std::move(lhs), additive(), at);
    }
    return lhs;
  }

  Expr additive() {
    Expr lhs = multiplicative();
    while (is_op("+") || is_op("-")) {
      const auto t = take();
      lhs = binary(t.text == "+" ? BinaryOp::kAdd : BinaryOp::kSub, std::move(lhs),
                   multiplicative(), t.offset);
    }
    return lhs;
  }

  Expr multiplicative() {
    Expr lhs = power();
    while (is_op("*") || is_op("/")) {
      const auto t = take();
      lhs = binary(t.text == "*" ? BinaryOp::kMul : BinaryOp::kDiv, std::move(lhs),
                   power(), t.offset);
    }
    return lhs;
  }

  Expr power() {
    Expr lhs = unary();
    while (is_op("^")) {
      const auto at = take().offset;
      lhs = binary(BinaryOp::kPow, std::move(lhs), unary(), at);
    }
    return lhs;
  }

  Expr unary() {
    if (is_op("-") || is_op("+")) {
      const auto t = take();
      Expr e;
      e.kind = Expr::Kind::kUnary;
      e.unary = t.text == "-" ? UnaryOp::kNeg : UnaryOp::kPlus;
      e.offset = t.offset;
      e.args.push_back(unary());
      return e;
    }
    return primary();
  }

  Expr primary() {
    const Token& t = peek();
    Expr e;
    e.offset = t.offset;
    switch (t.type) {
      case Tok::kNumber:
        e.kind = Expr::Kind::kNumber;
        e.number = take().number;
        return e;
      case Tok::kString:
        e.kind = Expr::Kind::kText;
        e.text = take().text;
        return e;
      case Tok::kBool:
        e.kind = Expr::Kind::kBoolean;
        e.boolean = take().boolean;
        return e;
      case Tok::kRef:
        return reference();
      case Tok::kFunc:
        return call();
      case Tok::kLParen: {
        take();
        Expr inner = comparison();
        if (peek().type != Tok::kRParen) fail("expected ')'");
        take();
        return inner;
      }
      case Tok::kEnd:
        fail("unexpected end of formula");
      default:
        fail("unexpected token");
    }
  }

  Expr reference() {
    Token first = take();
    Expr e;
    e.offset = first.offset;
    if (peek().type != Tok::kColon) {
      e.kind = Expr::Kind::kCellRef;
      e.ref = std::move(first.ref);
      return e;
    }
    take();
    if (peek().type != Tok::kRef) fail("expected a cell reference after ':'");
    Token second = take();
    if (second.ref.qualified && second.ref.sheet != first.ref.sheet) {
      throw FormulaError(ErrorCode::kSyntaxError, "range corners on different sheets",
                         second.offset);
    }
    second.ref.sheet = first.ref.sheet;
    // Normalize to top-left / bottom-right; absolute flags travel with
    // their coordinate.
    RefTarget a = first.ref;
    RefTarget b = second.ref;
    if (b.row < a.row) {
      std::swap(a.row, b.row);
      std::swap(a.row_absolute, b.row_absolute);
    }
    if (b.col < a.col) {
      std::swap(a.col, b.col);
      std::swap(a.col_absolute, b.col_absolute);
    }
    b.qualified = false;
    e.kind = Expr::Kind::kRangeRef;
    e.ref = std::move(a);
    e.ref2 = std::move(b);
    return e;
  }

  Expr call() {
    Token name = take();
    Expr e;
    e.kind = Expr::Kind::kCall;
    e.offset = name.offset;
    e.function = *function_from_name(name.text);
    if (peek().type != Tok::kLParen) fail("expected '('");
    take();
    if (peek().type != Tok::kRParen) {
      for (;;) {
        e.args.push_back(comparison());
        if (peek().type == Tok::kComma) {
          take();
          continue;
        }
        break;
      }
    }
    if (peek().type != Tok::kRParen) fail("expected ',' or ')'");
    take();
    const auto& fi = info(e.function);
    const int n = static_cast<int>(e.args.size());
    if (n < fi.min_args || (fi.max_args >= 0 && n > fi.max_args)) {
      throw FormulaError(ErrorCode::kSyntaxError,
                         std::string(fi.name) + " takes " + std::to_string(fi.min_args) +
                             (fi.max_args < 0 ? "+"
                              : fi.max_args == fi.min_args
                                  ? ""
                                  : "-" + std::to_string(fi.max_args)) +
                             " arguments, got " + std::to_string(n),
                         name.offset);
    }
    return e;
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

}  // namespace

FormulaAst parse_formula(std::string_view src, const CellAddress& host) {
  if (src.empty() || src.front() != '=') {
    throw FormulaError(ErrorCode::kSyntaxError, "formula must start with '='", 0);
  }
  Lexer lexer(src.substr(1), 1, host.sheet);
  Parser parser(lexer.run());
  return FormulaAst{parser.parse(), host};
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

int level(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::kBinary:
      switch (e.binary) {
        case BinaryOp::kEq: case BinaryOp::kNe: case BinaryOp::kLt:
        case BinaryOp::kLe: case BinaryOp::kGt: case BinaryOp::kGe:
          return 1;
        case BinaryOp::kConcat: return 2;
        case BinaryOp::kAdd: case BinaryOp::kSub: return 3;
        case BinaryOp::kMul: case BinaryOp::kDiv: return 4;
        case BinaryOp::kPow: return 5;
      }
      return 1;
    case Expr::Kind::kUnary:
      return 6;
    default:
      return 7;
  }
}

std::string quote_text(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

using RefRenderer = std::function<std::string(const Expr&)>;

std::string render(const Expr& e, const RefRenderer& refs) {
  switch (e.kind) {
    case Expr::Kind::kNumber: return format_number(e.number);
    case Expr::Kind::kText: return quote_text(e.text);
    case Expr::Kind::kBoolean: return e.boolean ? "TRUE" : "FALSE";
    case Expr::Kind::kCellRef:
    case Expr::Kind::kRangeRef:
      return refs(e);
    case Expr::Kind::kUnary: {
      const Expr& x = e.args[0];
      std::string inner = render(x, refs);
      if (level(x) < 6) inner = "(" + inner + ")";
      return (e.unary == UnaryOp::kNeg ? "-" : "+") + inner;
    }
    case Expr::Kind::kBinary: {
      const int me = level(e);
      std::string lhs = render(e.args[0], refs);
      std::string rhs = render(e.args[1], refs);
      if (level(e.args[0]) < me) lhs = "(" + lhs + ")";
      if (level(e.args[1]) <= me) rhs = "(" + rhs + ")";
      return lhs + std::string(binary_op_text(e.binary)) + rhs;
    }
    case Expr::Kind::kCall: {
      std::string out(function_name(e.function));
      out += '(';
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ',';
        out += render(e.args[i], refs);
      }
      return out + ')';
    }
  }
  return {};
}

std::string a1_part(const RefTarget& r) {
  std::string out;
  if (r.col_absolute) out += '$';
  out += column_letters(r.col);
  if (r.row_absolute) out += '$';
  out += std::to_string(r.row);
  return out;
}

std::string r1c1_part(const RefTarget& r, const CellAddress& host) {
  std::string out = "R";
  if (r.row_absolute) {
    out += std::to_string(r.row);
  } else if (r.row != host.row) {
    out += "[" + std::to_string(r.row - host.row) + "]";
  }
  out += 'C';
  if (r.col_absolute) {
    out += std::to_string(r.col);
  } else if (r.col != host.col) {
    out += "[" + std::to_string(r.col - host.col) + "]";
  }
  return out;
}

}  // namespace

std::string render_a1(const FormulaAst& ast) {
  const auto& host = ast.host;
  auto refs = [&](const Expr& e) {
    std::string out;
    if (e.ref.qualified || e.ref.sheet != host.sheet) out = quote_sheet(e.ref.sheet) + "!";
    out += a1_part(e.ref);
    if (e.kind == Expr::Kind::kRangeRef) out += ":" + a1_part(e.ref2);
    return out;
  };
  return "=" + render(ast.root, refs);
}

NormalizedFormula normalize(const FormulaAst& ast) {
  NormalizedFormula nf;
  const auto& host = ast.host;
  auto refs = [&](const Expr& e) {
    std::string out;
    if (e.ref.sheet != host.sheet) out = quote_sheet(e.ref.sheet) + "!";
    out += r1c1_part(e.ref, host);
    if (e.kind == Expr::Kind::kRangeRef) out += ":" + r1c1_part(e.ref2, host);
    nf.references.push_back(out);
    return out;
  };
  nf.text = "=" + render(ast.root, refs);
  nf.literals = number_literals(ast.root);
  std::sort(nf.literals.begin(), nf.literals.end());
  nf.token_count = token_count(ast.root);
  return nf;
}

// ---------------------------------------------------------------------------
// Metrics

int token_count(const Expr& e) {
  int n = 1;
  for (const auto& a : e.args) n += token_count(a);
  return n;
}

void for_each_reference(const Expr& e, const std::function<void(const Expr&)>& fn) {
  if (e.kind == Expr::Kind::kCellRef || e.kind == Expr::Kind::kRangeRef) {
    fn(e);
    return;
  }
  for (const auto& a : e.args) for_each_reference(a, fn);
}

void for_each_reference(Expr& e, const std::function<void(Expr&)>& fn) {
  if (e.kind == Expr::Kind::kCellRef || e.kind == Expr::Kind::kRangeRef) {
    fn(e);
    return;
  }
  for (auto& a : e.args) for_each_reference(a, fn);
}

std::vector<double> number_literals(const Expr& e) {
  std::vector<double> out;
  std::function<void(const Expr&)> walk = [&](const Expr& x) {
    if (x.kind == Expr::Kind::kNumber) out.push_back(x.number);
    for (const auto& a : x.args) walk(a);
  };
  walk(e);
  return out;
}

RefOffset nearest_offset(const Expr& ref_node, const CellAddress& host) {
  auto axis = [](std::int64_t lo, std::int64_t hi, std::int64_t at) -> std::int64_t {
    if (at < lo) return lo - at;
    if (at > hi) return hi - at;
    return 0;
  };
  const auto& a = ref_node.ref;
  const auto& b = ref_node.kind == Expr::Kind::kRangeRef ? ref_node.ref2 : ref_node.ref;
  return {axis(a.row, b.row, host.row), axis(a.col, b.col, host.col)};
}

FormulaMetrics metrics(const FormulaAst& ast) {
  FormulaMetrics m;
  m.token_count = token_count(ast.root);
  m.literal_count = static_cast<int>(number_literals(ast.root).size());
  for_each_reference(ast.root, [&](const Expr& r) {
    if (r.ref.sheet != ast.host.sheet) {
      ++m.cross_sheet_ref_count;
      return;
    }
    const auto off = nearest_offset(r, ast.host);
    m.max_ref_distance =
        std::max<std::int64_t>(m.max_ref_distance,
                               std::max(std::llabs(off.drow), std::llabs(off.dcol)));
    if (off.drow != 0 && off.dcol != 0) ++m.off_axis_ref_count;
  });
  return m;
}

// ---------------------------------------------------------------------------
// Workbook-level index

FormulaIndex::FormulaIndex(const Workbook& wb) {
  for (const auto& sheet : wb.sheets) {
    for (const auto& [pos, cell] : sheet.cells) {
      if (!cell.is_formula()) continue;
      CellAddress host{sheet.name, pos.row, pos.col};
      ParsedFormula pf;
      try {
        pf.ast = parse_formula(cell.formula_source(), host);
      } catch (const FormulaError& e) {
        throw FormulaError(e.code(), to_a1(host) + ": " + e.what(), e.offset());
      }
      pf.host = host;
      pf.normal = normalize(pf.ast);
      pf.metrics = metrics(pf.ast);
      by_address_.emplace(host, formulas_.size());
      formulas_.push_back(std::move(pf));
    }
  }
}

const ParsedFormula* FormulaIndex::find(const CellAddress& addr) const {
  auto it = by_address_.find(addr);
  return it == by_address_.end() ? nullptr : &formulas_[it->second];
}

std::size_t unique_formula_count(const FormulaIndex& index) {
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& pf : index.all()) seen.emplace(pf.host.sheet, pf.normal.text);
  return seen.size();
}

std::size_t unique_formula_count(const Workbook& wb) {
  return unique_formula_count(FormulaIndex(wb));
}

}  // namespace gridaudit
