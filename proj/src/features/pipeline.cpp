// Copyright 2026 The deskml Authors
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

#include "deskml/features/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "deskml/common/error.hpp"
#include "deskml/data/profile.hpp"

namespace deskml::features {

using data::ColumnType;

std::string_view imputation_name(Imputation v) noexcept {
  switch (v) {
    case Imputation::kMean: return "mean";
    case Imputation::kMedian: return "median";
    case Imputation::kMode: return "mode";
    case Imputation::kConstant: return "constant";
  }
  return "mean";
}

std::string_view encoder_name(Encoder v) noexcept { return v == Encoder::kOneHot ? "one_hot" : "ordinal"; }

std::string_view scaler_name(Scaler v) noexcept {
  switch (v) {
    case Scaler::kNone: return "none";
    case Scaler::kStandardize: return "standardize";
    case Scaler::kMinMax: return "min_max";
  }
  return "none";
}

std::string_view op_symbol(GenOp v) noexcept {
  switch (v) {
    case GenOp::kAdd: return "+";
    case GenOp::kSub: return "-";
    case GenOp::kMul: return "*";
    case GenOp::kDiv: return "/";
  }
  return "*";
}

namespace {

template <typename E, std::size_t N>
E from_name(std::string_view s, const E (&all)[N], std::string_view (*name)(E) noexcept, const char* what) {
  for (E e : all) {
    if (name(e) == s) return e;
  }
  fail(ErrorKind::kInvalidArgument, "INVALID_PIPELINE_SPEC", std::string("unknown ") + what + " '" + std::string(s) + "'");
}

constexpr Imputation kImputations[] = {Imputation::kMean, Imputation::kMedian, Imputation::kMode, Imputation::kConstant};
constexpr Encoder kEncoders[] = {Encoder::kOneHot, Encoder::kOrdinal};
constexpr Scaler kScalers[] = {Scaler::kNone, Scaler::kStandardize, Scaler::kMinMax};
constexpr GenOp kOps[] = {GenOp::kAdd, GenOp::kSub, GenOp::kMul, GenOp::kDiv};

const char* kPartNames[] = {"year", "month", "day", "weekday"};

}  // namespace

Imputation imputation_from_name(std::string_view s) { return from_name(s, kImputations, imputation_name, "imputation"); }
Encoder encoder_from_name(std::string_view s) { return from_name(s, kEncoders, encoder_name, "encoder"); }
Scaler scaler_from_name(std::string_view s) { return from_name(s, kScalers, scaler_name, "scaler"); }
GenOp op_from_symbol(std::string_view s) { return from_name(s, kOps, op_symbol, "operator"); }

std::string_view input_kind_name(InputKind k) noexcept {
  switch (k) {
    case InputKind::kNumeric: return "numeric";
    case InputKind::kBoolean: return "boolean";
    case InputKind::kOneHot: return "one_hot";
    case InputKind::kOrdinal: return "ordinal";
  }
  return "numeric";
}

double apply_op(GenOp op, double a, double b) noexcept {
  switch (op) {
    case GenOp::kAdd: return a + b;
    case GenOp::kSub: return a - b;
    case GenOp::kMul: return a * b;
    case GenOp::kDiv: return std::abs(b) < kSafeDivideEpsilon ? 0.0 : a / b;
  }
  return 0.0;
}

namespace {

double numeric_fill(const std::vector<double>& present, Imputation how, double constant, bool* fallback) {
  *fallback = false;
  if (how == Imputation::kConstant) return constant;
  if (present.empty()) {
    *fallback = true;
    return 0.0;
  }
  switch (how) {
    case Imputation::kMean: {
      double s = 0.0;
      for (double v : present) s += v;
      return s / static_cast<double>(present.size());
    }
    case Imputation::kMedian: {
      auto sorted = present;
      std::sort(sorted.begin(), sorted.end());
      return data::quantile_sorted(sorted, 0.5);
    }
    case Imputation::kMode: {
      std::map<double, std::size_t> counts;
      for (double v : present) ++counts[v];
      double best = counts.begin()->first;
      std::size_t best_n = 0;
      for (const auto& [v, n] : counts) {
        if (n > best_n) {
          best = v;
          best_n = n;
        }
      }
      return best;
    }
    case Imputation::kConstant: break;
  }
  return constant;
}

double date_part_value(double days, int part) {
  const auto p = data::date_parts(days);
  switch (part) {
    case 0: return p.year;
    case 1: return p.month;
    case 2: return p.day;
    default: return p.weekday;
  }
}

const data::Column& source(const data::Table& table, const std::string& name, ColumnType type) {
  const data::Column* col = table.find(name);
  if (!col) fail(ErrorKind::kInvalidArgument, "SCHEMA_MISMATCH", "input is missing column '" + name + "'");
  const bool compatible = col->type == type || (type == ColumnType::kCategorical && col->type != ColumnType::kNumeric &&
                                                col->type != ColumnType::kDatetime);
  if (!compatible) {
    fail(ErrorKind::kInvalidArgument, "SCHEMA_MISMATCH",
         "column '" + name + "' has type " + std::string(data::type_name(col->type)) + ", expected " +
             std::string(data::type_name(type)));
  }
  return *col;
}

bool is_scalable(InputKind k) { return k == InputKind::kNumeric; }

}  // namespace

SelectionTarget selection_target(const data::Table& table, const std::string& target,
                                 std::span<const std::size_t> rows) {
  const data::Column& col = table.column(table.index_of(target));
  SelectionTarget t;
  t.values.reserve(rows.size());
  if (col.type == ColumnType::kNumeric) {
    for (auto r : rows) t.values.push_back(col.values[r]);
    return t;
  }
  t.categorical = true;
  std::map<std::string, int> codes;
  for (auto r : rows) {
    if (!col.is_missing(r)) codes.emplace(col.cells[r], 0);
  }
  int next = 0;
  for (auto& [k, v] : codes) v = next++;
  for (auto r : rows) t.values.push_back(col.is_missing(r) ? -1.0 : codes.at(col.cells[r]));
  return t;
}

FittedPipeline fit(const PipelineSpec& spec, const data::Table& table, const std::string& target,
                   std::span<const std::size_t> rows) {
  table.index_of(target);
  FittedPipeline fp;
  fp.spec = spec;
  fp.target = target;

  std::set<std::string> include(spec.include.begin(), spec.include.end());
  for (const auto& name : include) table.index_of(name);

  for (const auto& col : table.columns()) {
    if (col.name == target) continue;
    if (!include.empty() && !include.contains(col.name)) continue;
    if (col.type == ColumnType::kText) {
      fp.warnings.push_back("text column '" + col.name + "' is not used as a feature");
      continue;
    }
    fp.source_columns.emplace_back(col.name, col.type);
    const Imputation how = spec.column_imputation.contains(col.name) ? spec.column_imputation.at(col.name)
                           : (col.type == ColumnType::kNumeric || col.type == ColumnType::kDatetime)
                               ? spec.numeric_imputation
                               : spec.categorical_imputation;

    if (col.type == ColumnType::kNumeric || col.type == ColumnType::kDatetime || col.type == ColumnType::kBoolean) {
      std::vector<double> present;
      for (auto r : rows) {
        if (!col.is_missing(r)) present.push_back(col.values[r]);
      }
      bool fallback = false;
      const Imputation eff = col.type == ColumnType::kBoolean && (how == Imputation::kMean || how == Imputation::kMedian)
                                 ? Imputation::kMode
                                 : how;
      double fill = numeric_fill(present, eff, col.type == ColumnType::kBoolean ? 0.0 : spec.numeric_fill, &fallback);
      if (fallback) {
        fp.warnings.push_back("column '" + col.name + "' has no values in the fitting rows; imputing constant 0");
      }
      if (col.type == ColumnType::kDatetime) {
        if (fallback) fill = 0.0;  // 1970-01-01
        for (int part = 0; part < 4; ++part) {
          EncodedInput in;
          in.name = col.name + "." + kPartNames[part];
          in.source_column = col.name;
          in.kind = InputKind::kNumeric;
          in.date_part = part;
          in.fill = date_part_value(fill, part);
          fp.inputs.push_back(std::move(in));
        }
      } else {
        EncodedInput in;
        in.name = col.name;
        in.source_column = col.name;
        in.kind = col.type == ColumnType::kBoolean ? InputKind::kBoolean : InputKind::kNumeric;
        in.fill = fill;
        fp.inputs.push_back(std::move(in));
      }
      continue;
    }

    // Categorical.
    std::map<std::string, std::size_t> counts;
    for (auto r : rows) {
      if (!col.is_missing(r)) ++counts[col.cells[r]];
    }
    CategoricalEncoding enc;
    enc.column = col.name;
    if (how == Imputation::kConstant || counts.empty()) {
      enc.fill_category = std::string(kMissingCategory);
    } else {
      std::size_t best = 0;
      for (const auto& [v, n] : counts) {
        if (n > best) {
          best = n;
          enc.fill_category = v;
        }
      }
    }
    bool any_missing = false;
    for (auto r : rows) any_missing = any_missing || col.is_missing(r);
    if (any_missing) counts.emplace(enc.fill_category, 0);
    for (const auto& [v, n] : counts) enc.vocabulary.push_back(v);

    enc.encoder = spec.column_encoder.contains(col.name) ? spec.column_encoder.at(col.name) : spec.encoder;
    if (enc.encoder == Encoder::kOneHot && enc.vocabulary.size() > kOneHotCap) {
      fp.warnings.push_back("column '" + col.name + "' has " + std::to_string(enc.vocabulary.size()) +
                            " categories; using ordinal encoding instead of one-hot");
      enc.encoder = Encoder::kOrdinal;
    }
    enc.first_input = fp.inputs.size();
    if (enc.encoder == Encoder::kOneHot) {
      for (const auto& v : enc.vocabulary) {
        EncodedInput in;
        in.name = col.name + "=" + v;
        in.source_column = col.name;
        in.kind = InputKind::kOneHot;
        in.category = v;
        fp.inputs.push_back(std::move(in));
      }
    } else {
      EncodedInput in;
      in.name = col.name;
      in.source_column = col.name;
      in.kind = InputKind::kOrdinal;
      fp.inputs.push_back(std::move(in));
    }
    fp.encodings.push_back(std::move(enc));
  }

  const Matrix encoded = fp.encode(table, rows);
  for (std::size_t i = 0; i < fp.inputs.size(); ++i) {
    double lo = 0.0, hi = 0.0;
    for (std::size_t r = 0; r < encoded.rows(); ++r) {
      const double v = encoded(r, i);
      if (r == 0 || v < lo) lo = v;
      if (r == 0 || v > hi) hi = v;
    }
    fp.inputs[i].lo = lo;
    fp.inputs[i].hi = hi;
  }

  // Rows with a known target drive generation scoring and selection.
  std::vector<std::size_t> labelled_pos;
  {
    const data::Column& tcol = table.column(table.index_of(target));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!tcol.is_missing(rows[i])) labelled_pos.push_back(i);
    }
  }
  std::vector<std::size_t> labelled_rows;
  for (auto p : labelled_pos) labelled_rows.push_back(rows[p]);
  const SelectionTarget tgt = selection_target(table, target, labelled_rows);

  auto values_of = [&](auto&& value_at) {
    std::vector<double> v;
    v.reserve(labelled_pos.size());
    for (auto p : labelled_pos) v.push_back(value_at(encoded.row(p)));
    return v;
  };

  if (spec.max_generated > 0 && !spec.generation_ops.empty()) {
    std::vector<GenOp> ops;
    for (GenOp op : kOps) {
      if (std::find(spec.generation_ops.begin(), spec.generation_ops.end(), op) != spec.generation_ops.end()) {
        ops.push_back(op);
      }
    }
    std::vector<std::size_t> numeric;
    for (std::size_t i = 0; i < fp.inputs.size(); ++i) {
      if (fp.inputs[i].kind == InputKind::kNumeric) numeric.push_back(i);
    }
    std::vector<std::pair<double, GeneratedFeature>> pool;
    for (std::size_t a = 0; a < numeric.size(); ++a) {
      for (std::size_t b = a + 1; b < numeric.size(); ++b) {
        for (GenOp op : ops) {
          GeneratedFeature g;
          g.left = numeric[a];
          g.right = numeric[b];
          g.op = op;
          g.name = "f(" + fp.inputs[g.left].name + "," + fp.inputs[g.right].name + "," + std::string(op_symbol(op)) + ")";
          const auto vals = values_of([&](std::span<const double> row) { return apply_op(op, row[g.left], row[g.right]); });
          pool.emplace_back(association_score(vals, tgt), std::move(g));
        }
      }
    }
    std::sort(pool.begin(), pool.end(), [](const auto& x, const auto& y) {
      if (x.first != y.first) return x.first > y.first;
      return x.second.name < y.second.name;
    });
    for (std::size_t i = 0; i < pool.size() && i < spec.max_generated; ++i) fp.generated.push_back(pool[i].second);
  }

  for (const auto& in : fp.inputs) fp.candidate_names.push_back(in.name);
  for (const auto& g : fp.generated) fp.candidate_names.push_back(g.name);
  const std::size_t n_candidates = fp.candidate_names.size();

  fp.scaling.assign(n_candidates, Affine{});
  if (spec.scaler != Scaler::kNone) {
    for (std::size_t c = 0; c < n_candidates; ++c) {
      if (c < fp.inputs.size() && !is_scalable(fp.inputs[c].kind)) continue;
      double sum = 0.0, lo = 0.0, hi = 0.0;
      const std::size_t n = encoded.rows();
      for (std::size_t r = 0; r < n; ++r) {
        const double v = fp.candidate_raw(encoded.row(r), c);
        sum += v;
        if (r == 0 || v < lo) lo = v;
        if (r == 0 || v > hi) hi = v;
      }
      Affine a;
      a.active = true;
      if (spec.scaler == Scaler::kStandardize) {
        a.shift = n ? sum / static_cast<double>(n) : 0.0;
        double ss = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          const double d = fp.candidate_raw(encoded.row(r), c) - a.shift;
          ss += d * d;
        }
        a.scale = n ? std::sqrt(ss / static_cast<double>(n)) : 0.0;
      } else {
        a.shift = lo;
        a.scale = hi - lo;
      }
      fp.scaling[c] = a;
    }
  }

  if (spec.selection != Selection::kNone && spec.select_k > 0) {
    std::vector<CandidateFeature> cands;
    cands.reserve(n_candidates);
    for (std::size_t c = 0; c < n_candidates; ++c) {
      cands.push_back({fp.candidate_names[c],
                       values_of([&](std::span<const double> row) { return fp.candidate_raw(row, c); })});
    }
    const auto chosen = select_features(cands, tgt, spec.selection, spec.select_k, &fp.warnings);
    std::set<std::string> keep(chosen.begin(), chosen.end());
    for (std::size_t c = 0; c < n_candidates; ++c) {
      if (keep.contains(fp.candidate_names[c])) fp.selected.push_back(c);
    }
  } else {
    for (std::size_t c = 0; c < n_candidates; ++c) fp.selected.push_back(c);
  }
  for (auto c : fp.selected) fp.output_names.push_back(fp.candidate_names[c]);
  return fp;
}

double FittedPipeline::candidate_raw(std::span<const double> row, std::size_t c) const {
  if (c < inputs.size()) return row[c];
  const auto& g = generated[c - inputs.size()];
  return apply_op(g.op, row[g.left], row[g.right]);
}

Matrix FittedPipeline::encode(const data::Table& table) const {
  std::vector<std::size_t> rows(table.row_count());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return encode(table, rows);
}

Matrix FittedPipeline::encode(const data::Table& table, std::span<const std::size_t> rows) const {
  Matrix out(rows.size(), inputs.size());
  std::size_t enc_index = 0;
  std::size_t i = 0;
  while (i < inputs.size()) {
    const EncodedInput& in = inputs[i];
    if (in.kind == InputKind::kOneHot || in.kind == InputKind::kOrdinal) {
      const CategoricalEncoding& enc = encodings[enc_index++];
      const data::Column& col = source(table, enc.column, ColumnType::kCategorical);
      const std::size_t width = enc.encoder == Encoder::kOneHot ? enc.vocabulary.size() : 1;
      for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::string& cell = col.is_missing(rows[r]) ? enc.fill_category : col.cells[rows[r]];
        auto it = std::lower_bound(enc.vocabulary.begin(), enc.vocabulary.end(), cell);
        const bool seen = it != enc.vocabulary.end() && *it == cell;
        const auto pos = static_cast<std::size_t>(it - enc.vocabulary.begin());
        if (enc.encoder == Encoder::kOneHot) {
          if (seen) out(r, i + pos) = 1.0;
        } else {
          out(r, i) = seen ? static_cast<double>(pos + 1) : 0.0;
        }
      }
      i += width;
      continue;
    }
    const bool is_date = in.date_part >= 0;
    const data::Column& col = source(table, in.source_column,
                                     is_date ? ColumnType::kDatetime
                                     : in.kind == InputKind::kBoolean ? ColumnType::kBoolean
                                                                      : ColumnType::kNumeric);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const std::size_t row = rows[r];
      if (col.is_missing(row)) {
        out(r, i) = in.fill;
      } else {
        out(r, i) = is_date ? date_part_value(col.values[row], in.date_part) : col.values[row];
      }
    }
    ++i;
  }
  return out;
}

Matrix FittedPipeline::finish(const Matrix& encoded) const {
  if (encoded.cols() != inputs.size()) {
    fail(ErrorKind::kInvalidArgument, "SCHEMA_MISMATCH",
         "encoded input has " + std::to_string(encoded.cols()) + " columns, expected " + std::to_string(inputs.size()));
  }
  Matrix out(encoded.rows(), selected.size());
  for (std::size_t r = 0; r < encoded.rows(); ++r) {
    const auto row = encoded.row(r);
    for (std::size_t k = 0; k < selected.size(); ++k) {
      const std::size_t c = selected[k];
      out(r, k) = scaling[c].apply(candidate_raw(row, c));
    }
  }
  return out;
}

Json to_json(const PipelineSpec& s) {
  Json ops = Json::array();
  for (GenOp op : s.generation_ops) ops.push_back(std::string(op_symbol(op)));
  Json col_imp = Json::object();
  for (const auto& [k, v] : s.column_imputation) col_imp[k] = std::string(imputation_name(v));
  Json col_enc = Json::object();
  for (const auto& [k, v] : s.column_encoder) col_enc[k] = std::string(encoder_name(v));
  return Json{{"numeric_imputation", std::string(imputation_name(s.numeric_imputation))},
              {"categorical_imputation", std::string(imputation_name(s.categorical_imputation))},
              {"column_imputation", col_imp},
              {"numeric_fill", s.numeric_fill},
              {"encoder", std::string(encoder_name(s.encoder))},
              {"column_encoder", col_enc},
              {"scaler", std::string(scaler_name(s.scaler))},
              {"generation", {{"operators", ops}, {"max_generated", s.max_generated}}},
              {"selection", {{"method", std::string(selection_name(s.selection))}, {"k", s.select_k}}},
              {"include", s.include}};
}

PipelineSpec pipeline_spec_from_json(const Json& j) {
  PipelineSpec s;
  s.numeric_imputation = imputation_from_name(j.value("numeric_imputation", "mean"));
  s.categorical_imputation = imputation_from_name(j.value("categorical_imputation", "mode"));
  if (j.contains("column_imputation")) {
    for (auto it = j["column_imputation"].begin(); it != j["column_imputation"].end(); ++it) {
      s.column_imputation[it.key()] = imputation_from_name(it.value().get<std::string>());
    }
  }
  s.numeric_fill = j.value("numeric_fill", 0.0);
  s.encoder = encoder_from_name(j.value("encoder", "one_hot"));
  if (j.contains("column_encoder")) {
    for (auto it = j["column_encoder"].begin(); it != j["column_encoder"].end(); ++it) {
      s.column_encoder[it.key()] = encoder_from_name(it.value().get<std::string>());
    }
  }
  s.scaler = scaler_from_name(j.value("scaler", "none"));
  if (j.contains("generation")) {
    for (const auto& op : j["generation"].value("operators", Json::array())) {
      s.generation_ops.push_back(op_from_symbol(op.get<std::string>()));
    }
    s.max_generated = j["generation"].value("max_generated", std::size_t{0});
  }
  if (j.contains("selection")) {
    s.selection = selection_from_name(j["selection"].value("method", "none"));
    s.select_k = j["selection"].value("k", std::size_t{0});
  }
  s.include = j.value("include", std::vector<std::string>{});
  return s;
}

Json to_json(const FittedPipeline& fp) {
  Json sources = Json::array();
  for (const auto& [name, type] : fp.source_columns) {
    sources.push_back({{"name", name}, {"type", std::string(data::type_name(type))}});
  }
  Json inputs = Json::array();
  for (const auto& in : fp.inputs) {
    inputs.push_back({{"name", in.name},
                      {"source_column", in.source_column},
                      {"kind", std::string(input_kind_name(in.kind))},
                      {"category", in.category},
                      {"date_part", in.date_part},
                      {"fill", in.fill},
                      {"lo", in.lo},
                      {"hi", in.hi}});
  }
  Json encodings = Json::array();
  for (const auto& e : fp.encodings) {
    encodings.push_back({{"column", e.column},
                         {"encoder", std::string(encoder_name(e.encoder))},
                         {"vocabulary", e.vocabulary},
                         {"fill_category", e.fill_category},
                         {"first_input", e.first_input}});
  }
  Json generated = Json::array();
  for (const auto& g : fp.generated) {
    generated.push_back(
        {{"name", g.name}, {"left", g.left}, {"right", g.right}, {"op", std::string(op_symbol(g.op))}});
  }
  Json scaling = Json::array();
  for (const auto& a : fp.scaling) scaling.push_back({{"active", a.active}, {"shift", a.shift}, {"scale", a.scale}});
  return Json{{"spec", to_json(fp.spec)},
              {"target", fp.target},
              {"source_columns", sources},
              {"inputs", inputs},
              {"encodings", encodings},
              {"generated", generated},
              {"candidates", fp.candidate_names},
              {"scaling", scaling},
              {"selected", fp.selected},
              {"output_names", fp.output_names},
              {"warnings", fp.warnings}};
}

FittedPipeline fitted_pipeline_from_json(const Json& j) {
  FittedPipeline fp;
  fp.spec = pipeline_spec_from_json(j.at("spec"));
  fp.target = j.at("target").get<std::string>();
  for (const auto& s : j.at("source_columns")) {
    fp.source_columns.emplace_back(s.at("name").get<std::string>(), data::type_from_name(s.at("type").get<std::string>()));
  }
  for (const auto& in : j.at("inputs")) {
    EncodedInput e;
    e.name = in.at("name").get<std::string>();
    e.source_column = in.at("source_column").get<std::string>();
    const auto kind = in.at("kind").get<std::string>();
    for (auto k : {InputKind::kNumeric, InputKind::kBoolean, InputKind::kOneHot, InputKind::kOrdinal}) {
      if (input_kind_name(k) == kind) e.kind = k;
    }
    e.category = in.at("category").get<std::string>();
    e.date_part = in.at("date_part").get<int>();
    e.fill = in.at("fill").get<double>();
    e.lo = in.at("lo").get<double>();
    e.hi = in.at("hi").get<double>();
    fp.inputs.push_back(std::move(e));
  }
  for (const auto& e : j.at("encodings")) {
    CategoricalEncoding c;
    c.column = e.at("column").get<std::string>();
    c.encoder = encoder_from_name(e.at("encoder").get<std::string>());
    c.vocabulary = e.at("vocabulary").get<std::vector<std::string>>();
    c.fill_category = e.at("fill_category").get<std::string>();
    c.first_input = e.at("first_input").get<std::size_t>();
    fp.encodings.push_back(std::move(c));
  }
  for (const auto& g : j.at("generated")) {
    fp.generated.push_back({g.at("name").get<std::string>(), g.at("left").get<std::size_t>(),
                            g.at("right").get<std::size_t>(), op_from_symbol(g.at("op").get<std::string>())});
  }
  fp.candidate_names = j.at("candidates").get<std::vector<std::string>>();
  for (const auto& a : j.at("scaling")) {
    fp.scaling.push_back({a.at("active").get<bool>(), a.at("shift").get<double>(), a.at("scale").get<double>()});
  }
  fp.selected = j.at("selected").get<std::vector<std::size_t>>();
  fp.output_names = j.at("output_names").get<std::vector<std::string>>();
  fp.warnings = j.at("warnings").get<std::vector<std::string>>();
  return fp;
}

}  // namespace deskml::features
