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

#include "deskml/codegen/ir.hpp"

#include <algorithm>
#include <cmath>

#include "deskml/common/error.hpp"
#include "deskml/models/tree.hpp"

namespace deskml::codegen {

std::string_view ensemble_kind_name(EnsembleKind k) noexcept {
  switch (k) {
    case EnsembleKind::kTree: return "tree";
    case EnsembleKind::kForest: return "forest";
    case EnsembleKind::kBoosting: return "boosting";
  }
  return "tree";
}

namespace {

EnsembleKind ensemble_kind_from_name(std::string_view s) {
  for (auto k : {EnsembleKind::kTree, EnsembleKind::kForest, EnsembleKind::kBoosting}) {
    if (ensemble_kind_name(k) == s) return k;
  }
  fail(ErrorKind::kInvalidArgument, "INVALID_IR", "unknown predictor kind '" + std::string(s) + "'");
}

bool same_input(const features::EncodedInput& a, const features::EncodedInput& b) {
  return a.name == b.name && a.source_column == b.source_column && a.kind == b.kind && a.category == b.category &&
         a.date_part == b.date_part && a.fill == b.fill && a.lo == b.lo && a.hi == b.hi;
}

bool same_encoding(const features::CategoricalEncoding& a, const features::CategoricalEncoding& b) {
  return a.column == b.column && a.encoder == b.encoder && a.vocabulary == b.vocabulary &&
         a.fill_category == b.fill_category && a.first_input == b.first_input;
}

void flatten(const models::TreeNode& node, FlatTree& out) {
  const auto index = out.nodes.size();
  out.nodes.emplace_back();
  if (node.is_leaf()) {
    out.nodes[index].value = static_cast<std::int32_t>(out.values.size() / out.width);
    out.values.insert(out.values.end(), node.value.begin(), node.value.end());
    return;
  }
  out.nodes[index].feature = node.feature;
  out.nodes[index].threshold = node.threshold;
  out.nodes[index].left = static_cast<std::int32_t>(out.nodes.size());
  flatten(*node.left, out);
  out.nodes[index].right = static_cast<std::int32_t>(out.nodes.size());
  flatten(*node.right, out);
}

FlatTree flatten(const models::TreeNode& root, std::size_t width) {
  FlatTree t;
  t.width = width;
  flatten(root, t);
  return t;
}

ModelIR lower_predictor(const models::TrainedModel& model, ModelIR ir) {
  using models::Family;
  ir.family = std::string(models::family_name(model.family));
  ir.output.task = model.task;
  ir.output.classes = model.classes;
  ir.output.count = model.is_classifier() ? model.classes.size() : 1;
  if (const auto* lin = std::get_if<models::LinearParams>(&model.params)) {
    ir.predictor = LinearPredictor{lin->weights, lin->bias};
    ir.output.transform = lin->transform;
    return ir;
  }
  const auto* ens = std::get_if<models::EnsembleParams>(&model.params);
  if (!ens || (model.family != Family::kDecisionTree && model.family != Family::kRandomForest &&
               model.family != Family::kGradientBoosting)) {
    fail(ErrorKind::kUnsupported, "UNSUPPORTED_FAMILY",
         "code generation supports linear models, decision trees, random forests and gradient boosting; not " +
             std::string(models::family_name(model.family)));
  }
  TreePredictor p;
  p.kind = model.family == Family::kDecisionTree   ? EnsembleKind::kTree
           : model.family == Family::kRandomForest ? EnsembleKind::kForest
                                                   : EnsembleKind::kBoosting;
  p.combiner = ens->combiner;
  p.learning_rate = ens->learning_rate;
  p.base = ens->base;
  const std::size_t width = ens->combiner == models::Combiner::kMean ? ir.output.count : 1;
  for (const auto& group : ens->groups) {
    auto& g = p.groups.emplace_back();
    for (const auto& tree : group) g.push_back(flatten(*tree, width));
  }
  ir.predictor = std::move(p);
  ir.output.transform = ens->transform;
  return ir;
}

}  // namespace

bool ModelIR::inputs_equal(const ModelIR& a, const ModelIR& b) {
  if (a.inputs.size() != b.inputs.size() || a.encodings.size() != b.encodings.size()) return false;
  for (std::size_t i = 0; i < a.inputs.size(); ++i) {
    if (!same_input(a.inputs[i], b.inputs[i])) return false;
  }
  for (std::size_t i = 0; i < a.encodings.size(); ++i) {
    if (!same_encoding(a.encodings[i], b.encodings[i])) return false;
  }
  return true;
}

std::size_t ModelIR::score_count() const {
  if (const auto* lin = std::get_if<LinearPredictor>(&predictor)) return lin->bias.size();
  const auto& t = std::get<TreePredictor>(predictor);
  return t.combiner == models::Combiner::kMean ? output.count : t.groups.size();
}

ModelIR lower(const models::TrainedModel& model, const features::FittedPipeline& pipeline) {
  if (model.feature_names != pipeline.output_names) {
    fail(ErrorKind::kInvalidArgument, "FEATURE_MISMATCH", "the model's features are not the pipeline's outputs");
  }
  ModelIR ir;
  ir.inputs = pipeline.inputs;
  ir.encodings = pipeline.encodings;
  for (std::size_t k = 0; k < pipeline.selected.size(); ++k) {
    const std::size_t c = pipeline.selected[k];
    IrFeature f;
    f.name = pipeline.output_names[k];
    if (c < pipeline.inputs.size()) {
      f.source = IrFeature::Source::kInput;
      f.input = c;
    } else {
      const auto& g = pipeline.generated[c - pipeline.inputs.size()];
      f.source = IrFeature::Source::kGenerated;
      f.op = g.op;
      f.left = g.left;
      f.right = g.right;
    }
    f.affine = pipeline.scaling[c];
    ir.features.push_back(std::move(f));
  }
  return lower_predictor(model, std::move(ir));
}

ModelIR lower(const models::TrainedModel& model) {
  ModelIR ir;
  for (std::size_t j = 0; j < model.feature_names.size(); ++j) {
    features::EncodedInput in;
    in.name = model.feature_names[j];
    in.source_column = model.feature_names[j];
    ir.inputs.push_back(in);
    IrFeature f;
    f.name = model.feature_names[j];
    f.input = j;
    ir.features.push_back(f);
  }
  return lower_predictor(model, std::move(ir));
}

void compute_features(const ModelIR& ir, std::span<const double> input, std::span<double> out) {
  for (std::size_t k = 0; k < ir.features.size(); ++k) {
    const auto& f = ir.features[k];
    double v = 0.0;
    switch (f.source) {
      case IrFeature::Source::kInput: v = input[f.input]; break;
      case IrFeature::Source::kGenerated: v = features::apply_op(f.op, input[f.left], input[f.right]); break;
      case IrFeature::Source::kConstant: v = f.constant; break;
    }
    out[k] = f.affine.apply(v);
  }
}

namespace {

const FlatNode& leaf_for(const FlatTree& t, std::span<const double> f) {
  const FlatNode* n = &t.nodes[0];
  while (!n->is_leaf()) n = &t.nodes[static_cast<std::size_t>(f[n->feature] <= n->threshold ? n->left : n->right)];
  return *n;
}

}  // namespace

void evaluate(const ModelIR& ir, std::span<const double> input, std::span<double> out, std::vector<double>& scratch) {
  const std::size_t nf = ir.features.size();
  const std::size_t scores = ir.score_count();
  scratch.assign(nf + scores, 0.0);
  const std::span<double> f(scratch.data(), nf);
  const std::span<double> s(scratch.data() + nf, scores);
  compute_features(ir, input, f);
  if (const auto* lin = std::get_if<LinearPredictor>(&ir.predictor)) {
    for (std::size_t k = 0; k < scores; ++k) {
      double acc = lin->bias[k];
      const auto w = lin->weights.row(k);
      for (std::size_t j = 0; j < nf; ++j) acc += w[j] * f[j];
      s[k] = acc;
    }
  } else {
    const auto& tp = std::get<TreePredictor>(ir.predictor);
    if (tp.combiner == models::Combiner::kMean) {
      const auto& trees = tp.groups.at(0);
      for (const auto& t : trees) {
        const auto off = t.leaf_offset(leaf_for(t, f));
        for (std::size_t k = 0; k < scores; ++k) s[k] += t.values[off + k];
      }
      for (auto& v : s) v /= static_cast<double>(trees.size());
    } else {
      for (std::size_t o = 0; o < scores; ++o) {
        double acc = 0.0;
        for (const auto& t : tp.groups[o]) acc += t.values[t.leaf_offset(leaf_for(t, f))];
        s[o] = tp.base[o] + tp.learning_rate * acc;
      }
    }
  }
  models::apply_output_transform(ir.output.transform, s, out);
}

Matrix evaluate(const ModelIR& ir, const Matrix& encoded) {
  if (encoded.cols() != ir.inputs.size()) {
    fail(ErrorKind::kInvalidArgument, "SCHEMA_MISMATCH",
         "input has " + std::to_string(encoded.cols()) + " columns, expected " + std::to_string(ir.inputs.size()));
  }
  Matrix out(encoded.rows(), ir.output.count);
  std::vector<double> scratch;
  for (std::size_t r = 0; r < encoded.rows(); ++r) evaluate(ir, encoded.row(r), out.row(r), scratch);
  return out;
}

std::size_t node_count(const TreePredictor& p) noexcept {
  std::size_t n = 0;
  for (const auto& g : p.groups) {
    for (const auto& t : g) n += t.nodes.size();
  }
  return n;
}

void validate(const ModelIR& ir) {
  auto bad = [](const std::string& msg) { fail(ErrorKind::kInternal, "INVALID_IR", msg); };
  for (const auto& f : ir.features) {
    const bool ok = f.source == IrFeature::Source::kConstant ||
                    (f.source == IrFeature::Source::kInput && f.input < ir.inputs.size()) ||
                    (f.source == IrFeature::Source::kGenerated && f.left < ir.inputs.size() &&
                     f.right < ir.inputs.size());
    if (!ok) bad("feature '" + f.name + "' reads an input out of range");
  }
  if (const auto* lin = std::get_if<LinearPredictor>(&ir.predictor)) {
    if (lin->weights.rows() != lin->bias.size() || lin->weights.cols() != ir.features.size()) {
      bad("linear weights do not match the feature count");
    }
    return;
  }
  const auto& tp = std::get<TreePredictor>(ir.predictor);
  for (const auto& g : tp.groups) {
    for (const auto& t : g) {
      if (t.nodes.empty()) bad("empty tree");
      std::vector<int> parents(t.nodes.size(), 0);
      const auto leaves = t.values.size() / t.width;
      for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        const auto& n = t.nodes[i];
        if (n.is_leaf()) {
          if (n.value < 0 || static_cast<std::size_t>(n.value) >= leaves) bad("leaf value out of range");
          continue;
        }
        if (static_cast<std::size_t>(n.feature) >= ir.features.size()) bad("split feature out of range");
        for (auto c : {n.left, n.right}) {
          if (c <= static_cast<std::int32_t>(i) || static_cast<std::size_t>(c) >= t.nodes.size()) {
            bad("child index does not follow its parent");
          }
          ++parents[static_cast<std::size_t>(c)];
        }
      }
      if (parents[0] != 0) bad("root has a parent");
      for (std::size_t i = 1; i < parents.size(); ++i) {
        if (parents[i] != 1) bad("node " + std::to_string(i) + " is unreachable or shared");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// JSON

namespace {

Json matrix_json(const Matrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::vector<double>(m.data().begin(), m.data().end())}};
}

Matrix matrix_from(const Json& j) {
  Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  const auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != m.rows() * m.cols()) fail(ErrorKind::kInvalidArgument, "INVALID_IR", "matrix size mismatch");
  std::copy(data.begin(), data.end(), m.data().begin());
  return m;
}

std::string_view source_name(IrFeature::Source s) {
  switch (s) {
    case IrFeature::Source::kInput: return "input";
    case IrFeature::Source::kGenerated: return "generated";
    case IrFeature::Source::kConstant: return "constant";
  }
  return "input";
}

Json tree_json(const FlatTree& t) {
  Json nodes = Json::array();
  for (const auto& n : t.nodes) nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value, n.visits});
  return {{"width", t.width}, {"values", t.values}, {"nodes", nodes}};
}

FlatTree tree_from(const Json& j) {
  FlatTree t;
  t.width = j.at("width").get<std::size_t>();
  t.values = j.at("values").get<std::vector<double>>();
  for (const auto& n : j.at("nodes")) {
    t.nodes.push_back({n.at(0).get<std::int32_t>(), n.at(1).get<double>(), n.at(2).get<std::int32_t>(),
                       n.at(3).get<std::int32_t>(), n.at(4).get<std::int32_t>(), n.at(5).get<double>()});
  }
  return t;
}

}  // namespace

Json to_json(const ModelIR& ir) {
  // Reuse the pipeline document layout for inputs and encodings.
  features::FittedPipeline shell;
  shell.inputs = ir.inputs;
  shell.encodings = ir.encodings;
  const Json pj = features::to_json(shell);

  Json feats = Json::array();
  for (const auto& f : ir.features) {
    Json fj{{"name", f.name}, {"source", source_name(f.source)}};
    switch (f.source) {
      case IrFeature::Source::kInput: fj["input"] = f.input; break;
      case IrFeature::Source::kGenerated:
        fj["op"] = features::op_symbol(f.op);
        fj["left"] = f.left;
        fj["right"] = f.right;
        break;
      case IrFeature::Source::kConstant: fj["constant"] = f.constant; break;
    }
    fj["affine"] = f.affine.active ? Json{{"shift", f.affine.shift}, {"scale", f.affine.scale}} : Json(nullptr);
    feats.push_back(std::move(fj));
  }

  Json pred;
  if (const auto* lin = std::get_if<LinearPredictor>(&ir.predictor)) {
    pred = {{"kind", "linear"}, {"weights", matrix_json(lin->weights)}, {"bias", lin->bias}};
  } else {
    const auto& tp = std::get<TreePredictor>(ir.predictor);
    Json groups = Json::array();
    for (const auto& g : tp.groups) {
      Json trees = Json::array();
      for (const auto& t : g) trees.push_back(tree_json(t));
      groups.push_back(std::move(trees));
    }
    pred = {{"kind", ensemble_kind_name(tp.kind)},
            {"combiner", models::combiner_name(tp.combiner)},
            {"learning_rate", tp.learning_rate},
            {"base", tp.base},
            {"groups", groups}};
  }
  return {{"format", "deskml-ir"},
          {"version", 1},
          {"family", ir.family},
          {"inputs", pj.at("inputs")},
          {"encodings", pj.at("encodings")},
          {"features", feats},
          {"predictor", pred},
          {"output",
           {{"task", models::task_name(ir.output.task)},
            {"classes", ir.output.classes},
            {"transform", models::output_transform_name(ir.output.transform)},
            {"count", ir.output.count}}},
          {"passes", ir.passes}};
}

ModelIR model_ir_from_json(const Json& j) {
  if (j.value("format", "") != "deskml-ir") fail(ErrorKind::kInvalidArgument, "INVALID_IR", "not a deskml IR document");
  ModelIR ir;
  ir.family = j.at("family").get<std::string>();
  Json shell = features::to_json(features::FittedPipeline{});
  shell["inputs"] = j.at("inputs");
  shell["encodings"] = j.at("encodings");
  const auto fp = features::fitted_pipeline_from_json(shell);
  ir.inputs = fp.inputs;
  ir.encodings = fp.encodings;
  for (const auto& fj : j.at("features")) {
    IrFeature f;
    f.name = fj.at("name").get<std::string>();
    const auto src = fj.at("source").get<std::string>();
    if (src == "input") {
      f.source = IrFeature::Source::kInput;
      f.input = fj.at("input").get<std::size_t>();
    } else if (src == "generated") {
      f.source = IrFeature::Source::kGenerated;
      f.op = features::op_from_symbol(fj.at("op").get<std::string>());
      f.left = fj.at("left").get<std::size_t>();
      f.right = fj.at("right").get<std::size_t>();
    } else if (src == "constant") {
      f.source = IrFeature::Source::kConstant;
      f.constant = fj.at("constant").get<double>();
    } else {
      fail(ErrorKind::kInvalidArgument, "INVALID_IR", "unknown feature source '" + src + "'");
    }
    if (!fj.at("affine").is_null()) {
      f.affine = {true, fj["affine"].at("shift").get<double>(), fj["affine"].at("scale").get<double>()};
    }
    ir.features.push_back(std::move(f));
  }
  const auto& pj = j.at("predictor");
  const auto kind = pj.at("kind").get<std::string>();
  if (kind == "linear") {
    ir.predictor = LinearPredictor{matrix_from(pj.at("weights")), pj.at("bias").get<std::vector<double>>()};
  } else {
    TreePredictor tp;
    tp.kind = ensemble_kind_from_name(kind);
    tp.combiner = pj.at("combiner").get<std::string>() == "mean" ? models::Combiner::kMean
                                                                  : models::Combiner::kSumShrinkage;
    tp.learning_rate = pj.at("learning_rate").get<double>();
    tp.base = pj.at("base").get<std::vector<double>>();
    for (const auto& g : pj.at("groups")) {
      auto& group = tp.groups.emplace_back();
      for (const auto& t : g) group.push_back(tree_from(t));
    }
    ir.predictor = std::move(tp);
  }
  const auto& oj = j.at("output");
  ir.output.task = models::task_from_name(oj.at("task").get<std::string>());
  ir.output.classes = oj.at("classes").get<std::vector<std::string>>();
  const auto transform = oj.at("transform").get<std::string>();
  for (auto t : {models::OutputTransform::kIdentity, models::OutputTransform::kSigmoid,
                 models::OutputTransform::kSoftmax, models::OutputTransform::kOvrSigmoid}) {
    if (models::output_transform_name(t) == transform) ir.output.transform = t;
  }
  ir.output.count = oj.at("count").get<std::size_t>();
  ir.passes = j.at("passes").get<std::vector<std::string>>();
  validate(ir);
  return ir;
}

}  // namespace deskml::codegen
