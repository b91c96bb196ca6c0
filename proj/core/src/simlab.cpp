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

#include "gridaudit/simlab.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>

#include "gridaudit/engine.hpp"
#include "gridaudit/error.hpp"
#include "gridaudit/formula.hpp"
#include "json_util.hpp"

namespace gridaudit {

std::string_view topology_name(Topology t) {
  switch (t) {
    case Topology::kChain: return "chain";
    case Topology::kTree: return "tree";
    case Topology::kGrid: return "grid";
  }
  return "grid";
}

std::optional<Topology> topology_from_name(std::string_view name) {
  if (name == "chain") return Topology::kChain;
  if (name == "tree") return Topology::kTree;
  if (name == "grid") return Topology::kGrid;
  return std::nullopt;
}

const std::vector<std::string>& defect_classes() {
  static const std::vector<std::string> kClasses = [] {
    std::vector<std::string> out;
    for (const auto& r : registered_rules()) out.emplace_back(r.id);
    out.emplace_back(kWrongAlgorithm);
    return out;
  }();
  return kClasses;
}

void SeedSpec::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::kInvalidArgument, what); };
  if (formula_count < 0 || input_count < 0) bad("counts must be >= 0");
  if (!(error_rate >= 0 && error_rate <= 1)) bad("error rate must be in [0,1]");
  if (defect_mix.empty()) bad("defect mix is empty");
  double sum = 0;
  const auto& known = defect_classes();
  for (const auto& [cls, w] : defect_mix) {
    if (std::find(known.begin(), known.end(), cls) == known.end()) {
      bad("unknown defect class '" + cls + "'");
    }
    if (!(w >= 0)) bad("defect weights must be >= 0");
    sum += w;
  }
  if (std::fabs(sum - 1) > 1e-9) bad("defect weights must sum to 1");
}

std::string serialize_seed_spec(const SeedSpec& spec) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  doc["topology"] = std::string(topology_name(spec.topology));
  doc["formulaCount"] = spec.formula_count;
  doc["inputCount"] = spec.input_count;
  doc["errorRate"] = spec.error_rate;
  nlohmann::ordered_json mix = nlohmann::ordered_json::object();
  for (const auto& [cls, w] : spec.defect_mix) mix[cls] = w;
  doc["defectMix"] = std::move(mix);
  doc["rngSeed"] = spec.rng_seed;
  return doc.dump(2) + "\n";
}

SeedSpec parse_seed_spec(std::string_view document) {
  const auto doc = parse_json_document(document, "seed spec");
  SeedSpec spec;
  const auto topo = optional_field<std::string>(doc, "topology", "grid", "seed spec");
  const auto t = topology_from_name(topo);
  if (!t) throw Error(ErrorCode::kMalformedDocument, "seed spec: unknown topology " + topo);
  spec.topology = *t;
  spec.formula_count = optional_field<int>(doc, "formulaCount", spec.formula_count, "seed spec");
  spec.input_count = optional_field<int>(doc, "inputCount", spec.input_count, "seed spec");
  spec.error_rate = optional_field<double>(doc, "errorRate", spec.error_rate, "seed spec");
  if (doc.contains("defectMix")) {
    spec.defect_mix =
        require<std::map<std::string, double>>(doc, "defectMix", "seed spec");
  }
  spec.rng_seed = optional_field<std::uint64_t>(doc, "rngSeed", spec.rng_seed, "seed spec");
  spec.validate();
  return spec;
}

// ---------------------------------------------------------------------------
// Clean generator

namespace {

std::string a1(std::int64_t row, std::int64_t col) { return to_a1(GridPos{row, col}); }

class Builder {
 public:
  explicit Builder(const SeedSpec& spec) : rng_(spec.rng_seed) {
    wb_.name = "synthetic-" + std::to_string(spec.rng_seed) + "_v1_2026-01-01";
    wb_.meta.modified = "2026-01-01T00:00:00Z";
    wb_.meta.protection_enabled = true;
    wb_.sheets.push_back(Sheet{std::string(kModelSheet), {}});
  }

  std::string draw_k() {
    std::uniform_int_distribution<int> d(1, 9);
    return format_number(1 + d(rng_) / 1000.0);
  }

  void inputs(std::int64_t count) {
    const std::int64_t hi = std::max<std::int64_t>(9999, 10 * count + 10);
    std::uniform_int_distribution<std::int64_t> d(10, hi);
    std::set<std::int64_t> used;
    for (std::int64_t r = 1; r <= count; ++r) {
      std::int64_t v = d(rng_);
      while (!used.insert(v).second) v = d(rng_);
      sheet().cells[{r, 1}] = Cell::number(static_cast<double>(v));
    }
  }

  void formula(std::int64_t row, std::int64_t col, const std::string& src) {
    sheet().cells[{row, col}] = Cell::formula(src, true);
  }

  void output(std::int64_t row, std::int64_t col) {
    wb_.meta.outputs = {CellAddress{std::string(kModelSheet), row, col}};
  }

  Workbook take() { return std::move(wb_); }

 private:
  Sheet& sheet() { return wb_.sheets.front(); }

  std::mt19937_64 rng_;
  Workbook wb_;
};

void build_chain(Builder& b, int f, int n_inputs) {
  const int first = std::max(n_inputs, f > 0 ? 1 : 0);
  b.inputs(first);
  const std::string k = b.draw_k();
  for (int i = 1; i <= f; ++i) {
    const std::int64_t row = first + i;
    b.formula(row, 1, "=" + a1(row - 1, 1) + "*" + k);
  }
  if (f > 0) b.output(first + f, 1);
}

void build_tree(Builder& b, int f, int n_inputs) {
  if (f == 0) {
    b.inputs(n_inputs);
    return;
  }
  const std::string k = b.draw_k();
  if (f <= 2) {
    b.inputs(std::max(n_inputs, 1));
    b.formula(1, 2, "=A1*" + k);
    b.output(1, 2);
    if (f == 2) {
      b.formula(1, 3, "=SUM(B1:B1)");
      b.output(1, 3);
    }
    return;
  }
  const int blocks = (f - 1 + 5) / 6;
  const int leaves = f - 1 - blocks;
  b.inputs(std::max(n_inputs, leaves));
  for (int r = 1; r <= leaves; ++r) b.formula(r, 2, "=" + a1(r, 1) + "*" + k);
  int start = 1;
  for (int blk = 0; blk < blocks; ++blk) {
    const int size = leaves / blocks + (blk < leaves % blocks ? 1 : 0);
    const int end = start + size - 1;
    b.formula(end, 3, "=SUM(" + a1(start, 2) + ":" + a1(end, 2) + ")");
    start = end + 1;
  }
  b.formula(leaves, 4, "=SUM(C1:" + a1(leaves, 3) + ")");
  b.output(leaves, 4);
}

void build_grid(Builder& b, int f, int n_inputs) {
  if (f == 0) {
    b.inputs(n_inputs);
    return;
  }
  if (f <= 2) {
    b.inputs(std::max(n_inputs, 1));
    b.formula(1, 2, "=A1*" + b.draw_k());
    b.output(1, 2);
    if (f == 2) {
      b.formula(2, 2, "=SUM(B1:B1)");
      b.output(2, 2);
    }
    return;
  }
  // m = grid cells + one total per column; the grand total is the last.
  const std::int64_t m = f - 1;
  const std::int64_t rows =
      std::clamp<std::int64_t>(static_cast<std::int64_t>(std::sqrt(static_cast<double>(m))), 1,
                               50);
  std::int64_t cols = (m + rows) / (rows + 1);
  std::vector<std::int64_t> heights;
  const std::int64_t last = m - (rows + 1) * (cols - 1) - 1;
  if (last >= 1) {
    heights.assign(static_cast<std::size_t>(cols - 1), rows);
    heights.push_back(last);
  } else {
    cols -= 1;
    heights.assign(static_cast<std::size_t>(cols), rows);
    heights.front() = rows + 1;
  }
  const std::int64_t tall = *std::max_element(heights.begin(), heights.end());
  b.inputs(std::max<std::int64_t>(n_inputs, tall));
  const std::int64_t total_row = tall + 1;
  for (std::int64_t j = 0; j < cols; ++j) {
    const std::int64_t col = 2 + j;
    const std::string k = b.draw_k();
    // A short column sits at the bottom so its total stays adjacent.
    const std::int64_t top = j + 1 == cols ? tall - heights.back() + 1 : 1;
    const std::int64_t bottom = top + heights[static_cast<std::size_t>(j)] - 1;
    for (std::int64_t r = top; r <= bottom; ++r) {
      b.formula(r, col, "=" + a1(r, col - 1) + "*" + k);
    }
    b.formula(total_row, col, "=SUM(" + a1(top, col) + ":" + a1(bottom, col) + ")");
  }
  const std::int64_t grand = cols + 2;
  b.formula(total_row, grand, "=SUM(" + a1(total_row, 2) + ":" + a1(total_row, grand - 1) + ")");
  b.output(total_row, grand);
}

}  // namespace

Workbook generate_clean(const SeedSpec& spec) {
  spec.validate();
  Builder b(spec);
  switch (spec.topology) {
    case Topology::kChain: build_chain(b, spec.formula_count, spec.input_count); break;
    case Topology::kTree: build_tree(b, spec.formula_count, spec.input_count); break;
    case Topology::kGrid: build_grid(b, spec.formula_count, spec.input_count); break;
  }
  return b.take();
}

// ---------------------------------------------------------------------------
// Seeder

namespace {

bool wraps_body(std::string_view cls) {
  return cls == rule_id::kJammed || cls == rule_id::kLongFormula || cls == rule_id::kLongArc ||
         cls == rule_id::kXsheetRef || cls == rule_id::kFlowViolation;
}

bool changes_content(std::string_view cls) {
  return cls != rule_id::kUnprotectedFormula && cls != rule_id::kOrphanOutput &&
         cls != rule_id::kVersionName;
}

std::string body_of(const std::string& src) { return src.substr(1); }

class Seeder {
 public:
  Seeder(const Workbook& clean, const SeedSpec& spec, const RuleThresholds& th)
      : clean_(clean),
        spec_(spec),
        th_(th),
        index_(clean),
        rng_(spec.rng_seed ^ 0x9e3779b97f4a7c15ULL) {
    out_.workbook = clean;
    values_ = evaluate(clean, index_, build_graph(clean, index_));
    for (const auto& pf : index_.all()) normal_[pf.host] = pf.normal.text;
    for (const auto& sheet : clean.sheets) {
      for (const auto& [pos, cell] : sheet.cells) max_col_ = std::max(max_col_, pos.col);
    }
    index_coverage();
  }

  SeededWorkbook run() {
    std::bernoulli_distribution hit(spec_.error_rate);
    // A hit on a cell that cannot take any class in the mix moves on to the
    // next cell that can, wrapping around once, so the defect count stays
    // binomial.
    int pending = 0;
    std::set<CellAddress> done;
    auto try_apply = [&](const ParsedFormula& pf) {
      if (done.count(pf.host)) return;
      std::vector<std::pair<std::string, double>> options;
      for (const auto& [cls, w] : spec_.defect_mix) {
        if (w > 0 && eligible(cls, pf)) options.emplace_back(cls, w);
      }
      if (options.empty()) return;
      --pending;
      done.insert(pf.host);
      std::vector<double> weights;
      for (const auto& o : options) weights.push_back(o.second);
      std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
      apply(options[pick(rng_)].first, pf);
    };
    for (const auto& pf : index_.all()) {
      if (hit(rng_)) ++pending;
      if (pending > 0) try_apply(pf);
    }
    for (const auto& pf : index_.all()) {
      if (pending == 0) break;
      try_apply(pf);
    }
    return std::move(out_);
  }

 private:
  void index_coverage() {
    for (const auto& pf : index_.all()) {
      std::function<void(const Expr&)> walk = [&](const Expr& e) {
        if (e.kind == Expr::Kind::kCall && is_aggregate(e.function)) {
          for (const auto& arg : e.args) {
            if (arg.kind != Expr::Kind::kCellRef && arg.kind != Expr::Kind::kRangeRef) continue;
            const auto& lo = arg.ref;
            const auto& hi = arg.kind == Expr::Kind::kRangeRef ? arg.ref2 : arg.ref;
            for (auto r = lo.row; r <= hi.row; ++r) {
              for (auto c = lo.col; c <= hi.col; ++c) {
                cover_[{lo.sheet, r, c}].push_back(pf.host);
              }
            }
          }
        }
        for (const auto& a : e.args) walk(a);
      };
      walk(pf.ast.root);
    }
  }

  Cell& cell_at(const CellAddress& a) {
    return out_.workbook.find_sheet(a.sheet)->cells.at(a.pos());
  }

  std::optional<CellAddress> live_cover(const CellAddress& a) const {
    auto it = cover_.find(a);
    if (it == cover_.end()) return std::nullopt;
    for (const auto& h : it->second) {
      if (!broken_.count(h)) return h;
    }
    return std::nullopt;
  }

  const std::string* normal_at(const CellAddress& a) const {
    auto it = normal_.find(a);
    return it == normal_.end() ? nullptr : &it->second;
  }

  std::optional<std::pair<CellAddress, CellAddress>> run_neighbours(const CellAddress& a) const {
    for (const auto& [dr, dc] : {std::pair{1, 0}, std::pair{0, 1}}) {
      if (a.row - dr < 1 || a.col - dc < 1) continue;
      const CellAddress before{a.sheet, a.row - dr, a.col - dc};
      const CellAddress after{a.sheet, a.row + dr, a.col + dc};
      const auto* nb = normal_at(before);
      const auto* na = normal_at(after);
      if (nb && na && *nb == *na) return std::pair{before, after};
    }
    return std::nullopt;
  }

  std::optional<double> literal_for(const CellAddress& host) const {
    const Sheet* s = out_.workbook.find_sheet(host.sheet);
    for (const GridPos p : {GridPos{host.row, 1}, GridPos{1, 1}}) {
      const Cell* c = s->find(p);
      if (c && c->is_number() && c->format != DeclaredFormat::kText) {
        const double v = std::get<double>(c->content);
        const bool excluded = std::find(th_.dup_literal_exclusions.begin(),
                                        th_.dup_literal_exclusions.end(),
                                        v) != th_.dup_literal_exclusions.end();
        if (std::fabs(v) >= th_.dup_literal_min_magnitude && !excluded) return v;
      }
    }
    return std::nullopt;
  }

  static bool can_omit(const Expr& root) {
    if (root.kind == Expr::Kind::kBinary) return true;
    if (root.kind == Expr::Kind::kCall) {
      for (const auto& a : root.args) {
        if (a.kind == Expr::Kind::kRangeRef && (a.ref2.row > a.ref.row || a.ref2.col > a.ref.col)) {
          return true;
        }
      }
    }
    return false;
  }

  std::int64_t next_stray_col(std::int64_t row) const {
    auto it = stray_next_.find(row);
    return it == stray_next_.end() ? max_col_ + 2 : it->second;
  }

  std::int64_t arc_col() const { return max_col_ + th_.long_arc_distance + 3; }

  bool eligible(const std::string& cls, const ParsedFormula& pf) const {
    const auto& at = pf.host;
    if (changes_content(cls) && pinned_.count(at)) return false;
    if (cls == rule_id::kNumAsText) {
      const auto v = values_.find(at);
      return v != values_.end() && v->second.is_number() && live_cover(at).has_value();
    }
    if (cls == rule_id::kHardwired) {
      const auto v = values_.find(at);
      return v != values_.end() && v->second.is_number() && run_neighbours(at).has_value();
    }
    if (cls == rule_id::kDupLiteral) return literal_for(at).has_value();
    if (cls == kWrongAlgorithm) return can_omit(pf.ast.root);
    if (cls == rule_id::kOrphanOutput) return next_stray_col(at.row) < arc_col();
    if (cls == rule_id::kVersionName) return !renamed_;
    return true;
  }

  void set_source(const CellAddress& at, std::string src) {
    Cell& c = cell_at(at);
    c.content = Formula{std::move(src)};
    const auto ast = parse_formula(c.formula_source(), at);
    normal_[at] = normalize(ast).text;
  }

  void set_constant(const CellAddress& at, Cell replacement) {
    Cell& c = cell_at(at);
    replacement.locked = c.locked;
    c = std::move(replacement);
    normal_.erase(at);
  }

  void record(std::optional<CellAddress> at, const std::string& cls,
              std::optional<Cell> original, std::string original_name = {}) {
    out_.truth.push_back({std::move(at), cls, std::move(original), std::move(original_name)});
  }

  void apply(const std::string& cls, const ParsedFormula& pf) {
    const auto& at = pf.host;
    const Cell original = *clean_.find_cell(at);
    const std::string& src = original.formula_source();
    const std::string body = body_of(src);

    if (cls == rule_id::kUnprotectedFormula) {
      cell_at(at).locked = false;
      record(at, cls, original);
      return;
    }
    if (cls == rule_id::kOrphanOutput) {
      const std::int64_t col = next_stray_col(at.row);
      stray_next_[at.row] = col + 1;
      const CellAddress stray{at.sheet, at.row, col};
      out_.workbook.find_sheet(at.sheet)->cells[stray.pos()] =
          Cell::formula("=" + to_a1(at.pos()), true);
      normal_[stray] = normalize(parse_formula("=" + to_a1(at.pos()), stray)).text;
      record(stray, cls, std::nullopt);
      return;
    }
    if (cls == rule_id::kVersionName) {
      renamed_ = true;
      const std::string old = out_.workbook.name;
      out_.workbook.name = "synthetic-" + std::to_string(spec_.rng_seed) + "_2026-01-01";
      record(std::nullopt, cls, std::nullopt, old);
      return;
    }

    if (!wraps_body(cls)) broken_.insert(at);

    if (cls == rule_id::kNumAsText) {
      pinned_.insert(*live_cover(at));
      set_constant(at, Cell::text(format_number(values_.at(at).as_number())));
    } else if (cls == rule_id::kHardwired) {
      const auto [before, after] = *run_neighbours(at);
      pinned_.insert(before);
      pinned_.insert(after);
      set_constant(at, Cell::number(values_.at(at).as_number()));
    } else if (cls == rule_id::kJammed) {
      std::uniform_int_distribution<int> d(2, 9);
      const std::string a = std::to_string(d(rng_));
      set_source(at, "=(" + body + ")*" + a + "/" + a);
    } else if (cls == rule_id::kDupLiteral) {
      const double v = *literal_for(at);
      FormulaAst ast = parse_formula(src, at);
      bool done = false;
      for_each_reference(ast.root, [&](Expr& r) {
        if (done) return;
        done = true;
        r = Expr{};
        r.kind = Expr::Kind::kNumber;
        r.number = v;
      });
      set_source(at, render_a1(ast));
    } else if (cls == rule_id::kLongFormula) {
      std::string b = body;
      while (token_count(parse_formula("=" + b, at).root) <= th_.long_formula_tokens) {
        b = "ROUND(IF(" + b + ">0," + b + ",-(" + b + ")),6)";
      }
      set_source(at, "=" + b);
    } else if (cls == rule_id::kLongArc) {
      set_source(at, "=(" + body + ")+" + a1(at.row, arc_col()));
    } else if (cls == rule_id::kXsheetRef) {
      if (!out_.workbook.find_sheet(kAuxSheet)) {
        Sheet aux{std::string(kAuxSheet), {}};
        aux.cells[{1, 1}] = Cell::number(0);
        out_.workbook.sheets.push_back(std::move(aux));
      }
      set_source(at, "=(" + body + ")+" + std::string(kAuxSheet) + "!A1");
    } else if (cls == rule_id::kFlowViolation) {
      set_source(at, "=(" + body + ")+" + a1(at.row, max_col_ + 1));
    } else if (cls == kWrongAlgorithm) {
      FormulaAst ast = parse_formula(src, at);
      if (ast.root.kind == Expr::Kind::kBinary) {
        Expr left = ast.root.args.front();
        ast.root = std::move(left);
      } else {
        for (auto& a : ast.root.args) {
          if (a.kind != Expr::Kind::kRangeRef) continue;
          if (a.ref2.row > a.ref.row) {
            --a.ref2.row;
          } else if (a.ref2.col > a.ref.col) {
            --a.ref2.col;
          } else {
            continue;
          }
          break;
        }
      }
      set_source(at, render_a1(ast));
    }
    record(at, cls, original);
  }

  const Workbook& clean_;
  const SeedSpec& spec_;
  const RuleThresholds& th_;
  FormulaIndex index_;
  std::mt19937_64 rng_;
  SeededWorkbook out_;
  ValueMap values_;
  std::map<CellAddress, std::string> normal_;
  std::map<CellAddress, std::vector<CellAddress>> cover_;
  std::set<CellAddress> pinned_;
  std::set<CellAddress> broken_;
  std::map<std::int64_t, std::int64_t> stray_next_;
  std::int64_t max_col_ = 1;
  bool renamed_ = false;
};

}  // namespace

SeededWorkbook seed_defects(const Workbook& clean, const SeedSpec& spec,
                            const RuleThresholds& thresholds) {
  spec.validate();
  return Seeder(clean, spec, thresholds).run();
}

std::string serialize_truth(const SeededWorkbook& seeded) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  doc["workbook"] = seeded.workbook.name;
  auto entries = nlohmann::ordered_json::array();
  for (const auto& t : seeded.truth) {
    nlohmann::ordered_json e = nlohmann::ordered_json::object();
    e["cell"] = t.cell ? nlohmann::ordered_json(to_a1(*t.cell, true)) : nullptr;
    e["defectClass"] = t.defect_class;
    e["original"] = t.original ? cell_to_json(*t.original) : nullptr;
    if (!t.cell) e["originalName"] = t.original_name;
    entries.push_back(std::move(e));
  }
  doc["entries"] = std::move(entries);
  return doc.dump(2) + "\n";
}

std::vector<TruthEntry> parse_truth(std::string_view document) {
  const auto doc = parse_json_document(document, "truth");
  const auto entries = require<nlohmann::json>(doc, "entries", "truth");
  if (!entries.is_array()) throw Error(ErrorCode::kMalformedDocument, "truth: bad entries");
  std::vector<TruthEntry> out;
  for (const auto& e : entries) {
    TruthEntry t;
    if (e.contains("cell") && !e.at("cell").is_null()) {
      t.cell = parse_a1(require<std::string>(e, "cell", "truth entry"), "").address;
    }
    t.defect_class = require<std::string>(e, "defectClass", "truth entry");
    if (e.contains("original") && !e.at("original").is_null()) {
      t.original = cell_from_json(e.at("original"), "truth entry");
    }
    t.original_name = optional_field<std::string>(e, "originalName", "", "truth entry");
    out.push_back(std::move(t));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Monte Carlo

namespace {

// 53 random bits onto [0, 1).
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

bool any_failure(std::mt19937_64& rng, double p, std::int64_t n) {
  for (std::int64_t i = 0; i < n; ++i) {
    if (unit(rng) < p) return true;
  }
  return false;
}

double standard_error(double phat, int trials) {
  return std::sqrt(phat * (1 - phat) / trials);
}

}  // namespace

MonteCarloResult monte_carlo(double p, std::int64_t unique_formulas, std::int64_t chain_length,
                             int trials, std::uint64_t seed) {
  if (trials < 1000) throw Error(ErrorCode::kInvalidArgument, "need at least 1000 trials");
  if (!(p >= 0 && p <= 1)) throw Error(ErrorCode::kInvalidArgument, "p must be in [0,1]");
  if (unique_formulas < 0 || chain_length < 0) {
    throw Error(ErrorCode::kInvalidArgument, "U and L must be >= 0");
  }
  std::int64_t any = 0;
  std::int64_t chain_ok = 0;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(t));
    if (any_failure(rng, p, unique_formulas)) ++any;
    if (!any_failure(rng, p, chain_length)) ++chain_ok;
  }
  MonteCarloResult r;
  r.trials = trials;
  r.p_any_error = static_cast<double>(any) / trials;
  r.p_any_error_se = standard_error(r.p_any_error, trials);
  r.p_chain_correct = static_cast<double>(chain_ok) / trials;
  r.p_chain_correct_se = standard_error(r.p_chain_correct, trials);
  return r;
}

DetectionResult detection_experiment(const SeededWorkbook& seeded, double yield, int rounds,
                                     int trials, std::uint64_t seed) {
  if (seeded.truth.empty()) {
    throw Error(ErrorCode::kEmptyTruth, "detection experiment needs seeded defects");
  }
  if (rounds < 0 || trials < 1) {
    throw Error(ErrorCode::kInvalidArgument, "rounds must be >= 0 and trials >= 1");
  }
  if (!(yield >= 0 && yield <= 1)) throw Error(ErrorCode::kInvalidArgument, "bad yield");
  DetectionResult r;
  r.trials = trials;
  r.initial = seeded.truth.size();
  const auto n_rounds = static_cast<std::size_t>(rounds);
  std::vector<double> sum(n_rounds, 0);
  std::vector<double> sum_sq(n_rounds, 0);
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(t));
    std::size_t remaining = r.initial;
    for (std::size_t k = 0; k < n_rounds; ++k) {
      std::size_t survivors = 0;
      for (std::size_t i = 0; i < remaining; ++i) {
        if (!(unit(rng) < yield)) ++survivors;
      }
      remaining = survivors;
      sum[k] += static_cast<double>(remaining);
      sum_sq[k] += static_cast<double>(remaining) * static_cast<double>(remaining);
    }
  }
  for (std::size_t k = 0; k < n_rounds; ++k) {
    const double mean = sum[k] / trials;
    const double var = trials > 1 ? (sum_sq[k] - trials * mean * mean) / (trials - 1) : 0;
    r.mean_residual.push_back(mean);
    r.std_error.push_back(std::sqrt(std::max(0.0, var) / trials));
  }
  return r;
}

DetectionResult detection_experiment(const SeededWorkbook& seeded, int team_size, int rounds,
                                     const RiskParams& params, int trials, std::uint64_t seed) {
  return detection_experiment(seeded, detection_yield(team_size, params), rounds, trials, seed);
}

}  // namespace gridaudit
