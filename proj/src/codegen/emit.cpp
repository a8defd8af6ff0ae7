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

#include "deskml/codegen/emit.hpp"

#include <cmath>
#include <cstdio>

#include "deskml/common/error.hpp"
#include "deskml/common/files.hpp"
#include "deskml/common/hash.hpp"

namespace deskml::codegen {

std::string_view dialect_name(Dialect d) noexcept {
  return d == Dialect::kPortableC ? "portable_c" : "engine_native";
}

Dialect dialect_from_name(std::string_view name) {
  if (name == "portable_c" || name == "c") return Dialect::kPortableC;
  if (name == "engine_native" || name == "native") return Dialect::kEngineNative;
  fail(ErrorKind::kUnsupported, "UNSUPPORTED_DIALECT",
       "unknown dialect '" + std::string(name) + "'; expected portable_c or engine_native");
}

namespace {

/// Round-trip literal that C parses as a double.
std::string lit(double v) {
  if (v == 0.0) return std::signbit(v) ? "(-0.0)" : "0.0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return v < 0 ? "(" + s + ")" : s;
}

std::string in(std::size_t i) { return "input[" + std::to_string(i) + "]"; }

class CWriter {
 public:
  explicit CWriter(const ModelIR& ir) : ir_(ir) {}

  std::string run() {
    header();
    helpers();
    const auto* tp = std::get_if<TreePredictor>(&ir_.predictor);
    if (tp) {
      std::size_t id = 0;
      for (std::size_t g = 0; g < tp->groups.size(); ++g) {
        for (const auto& t : tp->groups[g]) tree_function(t, id++, g, tp->combiner);
      }
    }
    entry();
    return std::move(out_);
  }

 private:
  void line(int depth, const std::string& s) {
    out_.append(static_cast<std::size_t>(depth) * 2, ' ');
    out_ += s;
    out_ += '\n';
  }

  void header() {
    line(0, "/* deskml inference: " + ir_.family + " */");
    std::string passes;
    for (const auto& p : ir_.passes) passes += (passes.empty() ? "" : ", ") + p;
    line(0, "/* passes: " + (passes.empty() ? std::string("none") : passes) + " */");
    line(0, "/* input: " + std::to_string(ir_.inputs.size()) + " encoded values; output: " +
                std::to_string(ir_.output.count) + " values; label = argmax, ties to the lower index */");
    line(0, "#include <math.h>");
    line(0, "");
  }

  void helpers() {
    const auto t = ir_.output.transform;
    if (t == models::OutputTransform::kSigmoid || t == models::OutputTransform::kOvrSigmoid) {
      line(0, "static double deskml_sigmoid(double z) {");
      line(1, "if (z >= 0.0) return 1.0 / (1.0 + exp(-z));");
      line(1, "double e = exp(z);");
      line(1, "return e / (1.0 + e);");
      line(0, "}");
      line(0, "");
    }
  }

  std::string feature_expr(const IrFeature& f) const {
    std::string v;
    switch (f.source) {
      case IrFeature::Source::kInput: v = in(f.input); break;
      case IrFeature::Source::kConstant: v = lit(f.constant); break;
      case IrFeature::Source::kGenerated: {
        const auto a = in(f.left), b = in(f.right);
        switch (f.op) {
          case features::GenOp::kAdd: v = "(" + a + " + " + b + ")"; break;
          case features::GenOp::kSub: v = "(" + a + " - " + b + ")"; break;
          case features::GenOp::kMul: v = "(" + a + " * " + b + ")"; break;
          case features::GenOp::kDiv:
            v = "(fabs(" + b + ") < " + lit(features::kSafeDivideEpsilon) + " ? 0.0 : " + a + " / " + b + ")";
            break;
        }
        break;
      }
    }
    if (!f.affine.active) return v;
    if (f.affine.scale == 0.0) return "0.0";
    return "(" + v + " - " + lit(f.affine.shift) + ") / " + lit(f.affine.scale);
  }

  void node(const FlatTree& t, std::size_t i, int depth, std::size_t group, models::Combiner c) {
    const auto& n = t.nodes[i];
    if (n.is_leaf()) {
      const auto off = t.leaf_offset(n);
      if (c == models::Combiner::kMean) {
        for (std::size_t k = 0; k < t.width; ++k) {
          line(depth, "s[" + std::to_string(k) + "] += " + lit(t.values[off + k]) + ";");
        }
      } else {
        line(depth, "s[" + std::to_string(group) + "] += " + lit(t.values[off]) + ";");
      }
      return;
    }
    line(depth, "if (f[" + std::to_string(n.feature) + "] <= " + lit(n.threshold) + ") {");
    node(t, static_cast<std::size_t>(n.left), depth + 1, group, c);
    line(depth, "} else {");
    node(t, static_cast<std::size_t>(n.right), depth + 1, group, c);
    line(depth, "}");
  }

  void tree_function(const FlatTree& t, std::size_t id, std::size_t group, models::Combiner c) {
    line(0, "static void deskml_tree_" + std::to_string(id) + "(const double* f, double* s) {");
    node(t, 0, 1, group, c);
    line(0, "}");
    line(0, "");
  }

  void entry() {
    const std::size_t nf = ir_.features.size();
    const std::size_t ns = ir_.score_count();
    line(0, "int " + std::string(kEntrySymbol) + "(const double* input, double* output) {");
    line(1, "double f[" + std::to_string(std::max<std::size_t>(nf, 1)) + "];");
    line(1, "double s[" + std::to_string(ns) + "];");
    if (nf == 0) line(1, "(void)input;");
    line(1, "(void)f;");
    for (std::size_t k = 0; k < nf; ++k) {
      line(1, "f[" + std::to_string(k) + "] = " + feature_expr(ir_.features[k]) + ";");
    }
    if (const auto* lin = std::get_if<LinearPredictor>(&ir_.predictor)) {
      for (std::size_t r = 0; r < ns; ++r) {
        const auto rs = "s[" + std::to_string(r) + "]";
        line(1, rs + " = " + lit(lin->bias[r]) + ";");
        for (std::size_t k = 0; k < nf; ++k) {
          line(1, rs + " += " + lit(lin->weights(r, k)) + " * f[" + std::to_string(k) + "];");
        }
      }
    } else {
      const auto& tp = std::get<TreePredictor>(ir_.predictor);
      for (std::size_t r = 0; r < ns; ++r) line(1, "s[" + std::to_string(r) + "] = 0.0;");
      std::size_t id = 0;
      for (const auto& g : tp.groups) {
        for (std::size_t t = 0; t < g.size(); ++t) line(1, "deskml_tree_" + std::to_string(id++) + "(f, s);");
      }
      if (tp.combiner == models::Combiner::kMean) {
        const auto count = lit(static_cast<double>(tp.groups.at(0).size()));
        for (std::size_t r = 0; r < ns; ++r) line(1, "s[" + std::to_string(r) + "] /= " + count + ";");
      } else {
        for (std::size_t r = 0; r < ns; ++r) {
          const auto rs = "s[" + std::to_string(r) + "]";
          line(1, rs + " = " + lit(tp.base[r]) + " + " + lit(tp.learning_rate) + " * " + rs + ";");
        }
      }
    }
    transform(ns);
    line(1, "return 0;");
    line(0, "}");
  }

  void transform(std::size_t ns) {
    const auto n = std::to_string(ns);
    switch (ir_.output.transform) {
      case models::OutputTransform::kIdentity:
        for (std::size_t r = 0; r < ns; ++r) line(1, "output[" + std::to_string(r) + "] = s[" + std::to_string(r) + "];");
        return;
      case models::OutputTransform::kSigmoid:
        line(1, "output[1] = deskml_sigmoid(s[0]);");
        line(1, "output[0] = 1.0 - output[1];");
        return;
      case models::OutputTransform::kSoftmax:
        line(1, "{");
        line(2, "double m = s[0], sum = 0.0;");
        line(2, "int k;");
        line(2, "for (k = 1; k < " + n + "; ++k) m = fmax(m, s[k]);");
        line(2, "for (k = 0; k < " + n + "; ++k) sum += output[k] = exp(s[k] - m);");
        line(2, "for (k = 0; k < " + n + "; ++k) output[k] /= sum;");
        line(1, "}");
        return;
      case models::OutputTransform::kOvrSigmoid:
        line(1, "{");
        line(2, "double sum = 0.0;");
        line(2, "int k;");
        line(2, "for (k = 0; k < " + n + "; ++k) sum += output[k] = deskml_sigmoid(s[k]);");
        line(2, "for (k = 0; k < " + n + "; ++k) output[k] = sum > 0 ? output[k] / sum : 1.0 / " +
                    lit(static_cast<double>(ns)) + ";");
        line(1, "}");
        return;
    }
  }

  const ModelIR& ir_;
  std::string out_;
};

}  // namespace

Json contract_json(const ModelIR& ir, Dialect dialect, const std::string& checksum) {
  const Json doc = to_json(ir);
  Json inputs = doc.at("inputs");
  for (std::size_t i = 0; i < inputs.size(); ++i) inputs[i]["index"] = i;
  return {{"format", "deskml-contract"},
          {"version", 1},
          {"dialect", dialect_name(dialect)},
          {"entry", dialect == Dialect::kPortableC ? "int deskml_predict(const double* input, double* output)"
                                                  : "deskml-ir document"},
          {"family", ir.family},
          {"passes", ir.passes},
          {"inputs", inputs},
          {"encodings", doc.at("encodings")},
          {"outputs",
           {{"task", models::task_name(ir.output.task)},
            {"classes", ir.output.classes},
            {"transform", models::output_transform_name(ir.output.transform)},
            {"count", ir.output.count},
            {"label", ir.output.task == models::Task::kClassification ? "argmax of output, ties to the lower index"
                                                                       : "output[0]"}}},
          {"checksum", checksum}};
}

EmittedArtifact emit(const ModelIR& ir, Dialect dialect) {
  validate(ir);
  EmittedArtifact a;
  a.dialect = dialect;
  if (dialect == Dialect::kPortableC) {
    a.source = CWriter(ir).run();
    a.file_name = "model.c";
  } else {
    a.source = to_json(ir).dump(1) + "\n";
    a.file_name = "model.ir.json";
  }
  a.checksum = hex64(fnv1a64(a.source));
  a.contract = contract_json(ir, dialect, a.checksum);
  return a;
}

std::vector<std::filesystem::path> write_artifact(const EmittedArtifact& artifact, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto source = dir / artifact.file_name;
  const auto contract = dir / "contract.json";
  write_file_atomic(source, artifact.source);
  write_file_atomic(contract, artifact.contract.dump(2) + "\n");
  return {source, contract};
}

}  // namespace deskml::codegen
