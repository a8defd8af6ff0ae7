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

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <limits>

#include "deskml/codegen/emit.hpp"
#include "deskml/codegen/ir.hpp"
#include "deskml/codegen/native.hpp"
#include "deskml/codegen/passes.hpp"
#include "deskml/common/error.hpp"
#include "deskml/common/hash.hpp"
#include "deskml/models/hyperparams.hpp"
#include "support/c_compile.hpp"
#include "support/codegen_fixtures.hpp"
#include "support/temp_dir.hpp"

namespace deskml::codegen {
namespace {

using testing::CompiledC;
using testing::TempDir;

std::size_t count_of(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

Matrix c_outputs(const std::string& source, const ModelIR& ir, const Matrix& encoded) {
  TempDir dir;
  CompiledC fn(source, dir.path());
  Matrix out(encoded.rows(), ir.output.count);
  for (std::size_t r = 0; r < encoded.rows(); ++r) {
    EXPECT_EQ(fn(encoded.row(r).data(), out.row(r).data()), 0);
  }
  return out;
}


// ---------------------------------------------------------------------------
// Structure

TEST(LowerTest, DepthOneTreeHasThreeNodesAndOneBranch) {
  Matrix x(8, 1);
  models::TargetValues y{models::Task::kRegression, {}, {}};
  for (std::size_t r = 0; r < 8; ++r) {
    x(r, 0) = static_cast<double>(r);
    y.values.push_back(r < 4 ? 1.0 : 5.0);
  }
  const auto m = models::fit(models::Family::kDecisionTree, {{"max_depth", 1}, {"min_leaf", 1}}, x, {"x"}, y);
  const auto ir = lower(m);
  const auto& tp = std::get<TreePredictor>(ir.predictor);
  ASSERT_EQ(tp.groups.size(), 1u);
  ASSERT_EQ(tp.groups[0].size(), 1u);
  EXPECT_EQ(node_count(tp), 3u);
  const auto c = emit(ir, Dialect::kPortableC).source;
  EXPECT_EQ(count_of(c, "if ("), 1u);
  EXPECT_EQ(count_of(c, "} else {"), 1u);
}

TEST(LowerTest, LinearModelHasOneTermPerFeature) {
  Matrix x(20, 4);
  models::TargetValues y{models::Task::kRegression, {}, {}};
  Rng rng(3);
  for (std::size_t r = 0; r < 20; ++r) {
    double v = 0.5;
    for (std::size_t c = 0; c < 4; ++c) {
      x(r, c) = rng.uniform(-1, 1);
      v += static_cast<double>(c + 1) * x(r, c);
    }
    y.values.push_back(v);
  }
  const auto m = models::fit(models::Family::kLinearRegression, {{"fit_intercept", true}}, x, {"a", "b", "c", "d"}, y);
  const auto ir = lower(m);
  const auto& lin = std::get<LinearPredictor>(ir.predictor);
  EXPECT_EQ(ir.features.size(), 4u);
  EXPECT_EQ(lin.weights.rows(), 1u);
  EXPECT_EQ(lin.weights.cols(), 4u);
  for (std::size_t c = 0; c < 4; ++c) EXPECT_NEAR(lin.weights(0, c), static_cast<double>(c + 1), 1e-9);
  EXPECT_NEAR(lin.bias[0], 0.5, 1e-9);
  const auto src = emit(ir, Dialect::kPortableC).source;
  EXPECT_EQ(count_of(src, " * f["), 4u);
  EXPECT_EQ(count_of(src, "if ("), 0u);
}

TEST(LowerTest, UnsupportedFamilies) {
  Matrix x(12, 1);
  models::TargetValues y{models::Task::kClassification, {}, {"a", "b"}};
  for (std::size_t r = 0; r < 12; ++r) {
    x(r, 0) = static_cast<double>(r);
    y.values.push_back(r % 2 ? 1.0 : 0.0);
  }
  for (auto f : {models::Family::kKnn, models::Family::kGaussianNb}) {
    const auto m = models::fit(f, models::search_space(f).defaults(), x, {"x"}, y);
    try {
      (void)lower(m);
      FAIL() << "lowered " << models::family_name(f);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), "UNSUPPORTED_FAMILY");
      EXPECT_EQ(e.kind(), ErrorKind::kUnsupported);
    }
  }
  models::TargetValues series{models::Task::kForecasting, {}, {}};
  for (std::size_t r = 0; r < 12; ++r) series.values.push_back(static_cast<double>(r));
  for (auto f : {models::Family::kNaiveForecaster, models::Family::kSeasonalNaive, models::Family::kDriftForecaster,
                 models::Family::kSesForecaster}) {
    const auto m = models::fit(f, models::search_space(f).defaults(), Matrix(12, 0), {}, series);
    try {
      (void)lower(m);
      FAIL() << "lowered " << models::family_name(f);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), "UNSUPPORTED_FAMILY");
    }
  }
}

// ---------------------------------------------------------------------------
// Passes on hand-built IR

ModelIR numeric_ir(std::size_t inputs) {
  ModelIR ir;
  ir.family = "test";
  for (std::size_t i = 0; i < inputs; ++i) {
    features::EncodedInput in;
    in.name = in.source_column = "x" + std::to_string(i);
    ir.inputs.push_back(in);
    IrFeature f;
    f.name = in.name;
    f.input = i;
    ir.features.push_back(f);
  }
  ir.output = {models::Task::kRegression, {}, models::OutputTransform::kIdentity, 1};
  return ir;
}

TreePredictor single_tree(FlatTree t) {
  TreePredictor tp;
  tp.groups = {{std::move(t)}};
  return tp;
}

FlatNode split(std::int32_t feature, double threshold, std::int32_t left, std::int32_t right) {
  return {feature, threshold, left, right, -1, 0.0};
}
FlatNode leaf(std::int32_t value) { return {-1, 0.0, -1, -1, value, 0.0}; }

TEST(FoldAffineTest, LinearExample) {
  auto ir = numeric_ir(1);
  ir.features[0].affine = {true, 3.0, 2.0};
  Matrix w(1, 1);
  w(0, 0) = 2.0;
  ir.predictor = LinearPredictor{w, {1.0}};
  const auto folded = apply_pass(ir, Pass::kFoldAffine);
  const auto& lin = std::get<LinearPredictor>(folded.predictor);
  EXPECT_DOUBLE_EQ(lin.weights(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(lin.bias[0], -2.0);
  EXPECT_FALSE(folded.features[0].affine.active);
  for (double x : {-7.0, 0.0, 3.0, 11.5}) {
    std::vector<double> a(1), b(1), s;
    evaluate(ir, std::vector{x}, a, s);
    evaluate(folded, std::vector{x}, b, s);
    EXPECT_NEAR(a[0], b[0], 1e-12);
  }
}

TEST(FoldAffineTest, TreeThresholdExample) {
  auto ir = numeric_ir(1);
  ir.features[0].affine = {true, 3.0, 2.0};
  ir.predictor = single_tree({{split(0, 0.5, 1, 2), leaf(0), leaf(1)}, {10.0, 20.0}, 1});
  const auto folded = apply_pass(ir, Pass::kFoldAffine);
  EXPECT_EQ(std::get<TreePredictor>(folded.predictor).groups[0][0].nodes[0].threshold, 4.0);
}

TEST(FoldAffineTest, RawThresholdIsExactBoundary) {
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const features::Affine a{true, rng.uniform(-1e3, 1e3), std::exp(rng.uniform(-8, 8))};
    const double t = rng.uniform(-5, 5);
    const double x = raw_threshold(a, t);
    ASSERT_TRUE(std::isfinite(x));
    EXPECT_LE(a.apply(x), t);
    EXPECT_GT(a.apply(std::nextafter(x, std::numeric_limits<double>::infinity())), t);
  }
}

// Two one-hot indicators of one column plus a boolean.
ModelIR one_hot_ir() {
  ModelIR ir;
  ir.family = "test";
  const char* levels[] = {"A", "B"};
  for (int i = 0; i < 2; ++i) {
    features::EncodedInput in;
    in.name = std::string("c=") + levels[i];
    in.source_column = "c";
    in.kind = features::InputKind::kOneHot;
    in.category = levels[i];
    ir.inputs.push_back(in);
  }
  features::EncodedInput b;
  b.name = b.source_column = "flag";
  b.kind = features::InputKind::kBoolean;
  ir.inputs.push_back(b);
  ir.encodings.push_back({"c", features::Encoder::kOneHot, {"A", "B"}, "A", 0});
  for (std::size_t i = 0; i < 3; ++i) {
    IrFeature f;
    f.name = ir.inputs[i].name;
    f.input = i;
    ir.features.push_back(f);
  }
  ir.output = {models::Task::kRegression, {}, models::OutputTransform::kIdentity, 1};
  return ir;
}

TEST(DeadBranchTest, OneHotExclusivityPrunesSiblingSplit) {
  auto ir = one_hot_ir();
  // c=A <= 0.5 ? (c=B <= 0.5 ? 1 : 2) : (c=B <= 0.5 ? 3 : 4)
  ir.predictor = single_tree({{split(0, 0.5, 1, 4), split(1, 0.5, 2, 3), leaf(0), leaf(1), split(1, 0.5, 5, 6),
                               leaf(2), leaf(3)},
                              {1, 2, 3, 4},
                              1});
  const auto out = apply_pass(ir, Pass::kDeadBranch);
  const auto& t = std::get<TreePredictor>(out.predictor).groups[0][0];
  EXPECT_EQ(t.nodes.size(), 5u);
  EXPECT_EQ(t.values, (std::vector<double>{1, 2, 3}));
  for (const auto& row : {std::vector<double>{0, 0, 0}, {1, 0, 1}, {0, 1, 0}}) {
    std::vector<double> a(1), b(1), s;
    evaluate(ir, row, a, s);
    evaluate(out, row, b, s);
    EXPECT_EQ(a, b);
  }
}

TEST(DeadBranchTest, IndicatorOutsideRangeAndUnusedFeatures) {
  auto ir = one_hot_ir();
  // flag <= 1.5 always holds; the right branch is the only use of c=A.
  ir.predictor = single_tree({{split(2, 1.5, 1, 4), split(1, 0.5, 2, 3), leaf(0), leaf(1), split(0, 0.5, 5, 6),
                               leaf(2), leaf(3)},
                              {1, 2, 3, 4},
                              1});
  const auto out = apply_pass(ir, Pass::kDeadBranch);
  const auto& t = std::get<TreePredictor>(out.predictor).groups[0][0];
  EXPECT_EQ(t.nodes.size(), 3u);
  ASSERT_EQ(out.features.size(), 1u);
  EXPECT_EQ(out.features[0].name, "c=B");
  EXPECT_EQ(t.nodes[0].feature, 0);
}

TEST(DeadBranchTest, RepeatedSplitOnPathIsResolved) {
  auto ir = numeric_ir(1);
  // x <= 2 ? (x <= 5 ? 1 : 2) : 3  -> the inner split always goes left.
  ir.predictor = single_tree({{split(0, 2.0, 1, 4), split(0, 5.0, 2, 3), leaf(0), leaf(1), leaf(2)}, {1, 2, 3}, 1});
  const auto out = apply_pass(ir, Pass::kDeadBranch);
  EXPECT_EQ(std::get<TreePredictor>(out.predictor).groups[0][0].nodes.size(), 3u);
}

TEST(FoldConstantsTest, ZeroScaleAndSelfDifference) {
  auto ir = numeric_ir(2);
  ir.features[1].affine = {true, 4.0, 0.0};
  IrFeature diff;
  diff.name = "x0-x0";
  diff.source = IrFeature::Source::kGenerated;
  diff.op = features::GenOp::kSub;
  diff.left = diff.right = 0;
  diff.affine = {true, 1.0, 2.0};
  ir.features.push_back(diff);
  Matrix w(1, 3);
  w(0, 0) = 1.5;
  w(0, 1) = 2.0;
  w(0, 2) = 3.0;
  ir.predictor = LinearPredictor{w, {1.0}};
  const auto out = apply_pass(ir, Pass::kFoldConstants);
  const auto& lin = std::get<LinearPredictor>(out.predictor);
  ASSERT_EQ(out.features.size(), 1u);
  EXPECT_EQ(lin.weights.cols(), 1u);
  EXPECT_DOUBLE_EQ(lin.bias[0], 1.0 + 3.0 * -0.5);
  for (double x : {-2.0, 0.0, 9.0}) {
    std::vector<double> a(1), b(1), s;
    evaluate(ir, std::vector{x, x * 3}, a, s);
    evaluate(out, std::vector{x, x * 3}, b, s);
    EXPECT_NEAR(a[0], b[0], 1e-12);
  }
}

TEST(FoldConstantsTest, TreeSplitOnConstantIsResolved) {
  auto ir = numeric_ir(2);
  ir.features[1].affine = {true, 4.0, 0.0};
  ir.predictor = single_tree({{split(1, -0.5, 1, 2), leaf(0), split(0, 1.0, 3, 4), leaf(1), leaf(2)}, {1, 2, 3}, 1});
  const auto out = apply_pass(ir, Pass::kFoldConstants);
  const auto& t = std::get<TreePredictor>(out.predictor).groups[0][0];
  EXPECT_EQ(t.nodes.size(), 3u);
  EXPECT_EQ(t.values, (std::vector<double>{2, 3}));
  ASSERT_EQ(out.features.size(), 1u);
}

TEST(ReorderTest, HotChildFollowsParent) {
  auto ir = numeric_ir(1);
  ir.predictor = single_tree({{split(0, 0.0, 1, 2), leaf(0), leaf(1)}, {1, 2}, 1});
  Matrix rows(10, 1);
  for (std::size_t r = 0; r < 10; ++r) rows(r, 0) = r < 2 ? -1.0 : 1.0;
  profile_visits(ir, rows);
  const auto out = apply_pass(ir, Pass::kReorder);
  const auto& t = std::get<TreePredictor>(out.predictor).groups[0][0];
  EXPECT_EQ(t.nodes[0].right, 1);
  EXPECT_EQ(t.nodes[1].visits, 8.0);
  EXPECT_EQ(t.values, (std::vector<double>{2, 1}));
  for (double x : {-1.0, 0.0, 1.0}) {
    std::vector<double> a(1), b(1), s;
    evaluate(ir, std::vector{x}, a, s);
    evaluate(out, std::vector{x}, b, s);
    EXPECT_EQ(a, b);
  }
}

TEST(PassTest, NamesRoundTrip) {
  for (auto p : default_passes()) EXPECT_EQ(pass_from_name(pass_name(p)), p);
  EXPECT_THROW(pass_from_name("inline"), Error);
}

// ---------------------------------------------------------------------------
// Fitted models: equivalence, idempotence, emission

using testing::FamilyCase;
using testing::vstack;

class FamilyTest : public ::testing::TestWithParam<FamilyCase> {
 protected:
  static const data::Table& table() {
    static const data::Table t = testing::churn_fixture(800, 17);
    return t;
  }
};

TEST_P(FamilyTest, CompiledOutputsMatchEngine) {
  const auto& fc = GetParam();
  auto spec = testing::rich_spec();
  std::erase(spec.include, std::string(fc.target));
  const auto c = testing::fit_case(table(), fc.target, fc.task, fc.family, fc.hp, spec);
  const auto ir = lower(c.model, c.pipeline);
  const Matrix rows = vstack(c.encoded, testing::random_contract_rows(ir, 10000, 99));
  const Matrix engine = testing::engine_outputs(c.model, c.pipeline, rows);

  EXPECT_LE(testing::max_abs_diff(evaluate(ir, rows), engine), 1e-9) << "ir";
  EXPECT_LE(testing::max_abs_diff(NativeModel(ir).predict(rows), engine), 1e-9) << "native";

  auto optimised = ir;
  profile_visits(optimised, c.encoded);
  optimised = optimize(optimised, default_passes());
  EXPECT_LE(testing::max_abs_diff(evaluate(optimised, rows), engine), 1e-9) << "optimised ir";

  const auto native_doc = emit(optimised, Dialect::kEngineNative);
  EXPECT_LE(testing::max_abs_diff(NativeModel::from_json(Json::parse(native_doc.source)).predict(rows), engine), 1e-9)
      << "native dialect";

  const auto src = emit(optimised, Dialect::kPortableC).source;
  EXPECT_LE(testing::max_abs_diff(c_outputs(src, optimised, rows), engine), 1e-9) << "portable C";

  if (c.model.is_classifier()) {
    const auto labels = models::predict(c.model, c.pipeline.finish(rows)).values;
    const Matrix out = NativeModel(optimised).predict(rows);
    for (std::size_t r = 0; r < rows.rows(); ++r) {
      const auto row = out.row(r);
      ASSERT_EQ(static_cast<double>(std::max_element(row.begin(), row.end()) - row.begin()), labels[r]);
    }
  }
}

TEST_P(FamilyTest, PassesAreIdempotent) {
  const auto& fc = GetParam();
  auto spec = testing::rich_spec();
  std::erase(spec.include, std::string(fc.target));
  const auto c = testing::fit_case(table(), fc.target, fc.task, fc.family, fc.hp, spec);
  auto ir = lower(c.model, c.pipeline);
  profile_visits(ir, c.encoded);
  for (auto p : default_passes()) {
    const auto once = apply_pass(ir, p);
    EXPECT_EQ(apply_pass(once, p), once) << pass_name(p);
    validate(once);
  }
  const auto all = optimize(ir, default_passes());
  EXPECT_EQ(optimize(all, default_passes()), all);
  if (const auto* tp = std::get_if<TreePredictor>(&all.predictor)) {
    EXPECT_LE(node_count(*tp), node_count(std::get<TreePredictor>(ir.predictor)));
  }
}

TEST_P(FamilyTest, IrJsonRoundTrip) {
  const auto& fc = GetParam();
  auto spec = testing::rich_spec();
  std::erase(spec.include, std::string(fc.target));
  const auto c = testing::fit_case(table(), fc.target, fc.task, fc.family, fc.hp, spec);
  auto ir = lower(c.model, c.pipeline);
  profile_visits(ir, c.encoded);
  ir = optimize(ir, default_passes());
  EXPECT_EQ(model_ir_from_json(Json::parse(to_json(ir).dump())), ir);
}

INSTANTIATE_TEST_SUITE_P(Families, FamilyTest, ::testing::ValuesIn(testing::family_cases()),
                         [](const auto& info) { return std::string(info.param.name); });

class EmitTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto t = testing::churn_fixture(400, 5);
    auto spec = testing::rich_spec();
    c_ = testing::fit_case(t, "Churn", models::Task::kClassification, models::Family::kGradientBoosting,
                           {{"estimators", 10}, {"learning_rate", 0.2}, {"max_depth", 3}, {"min_leaf", 1}}, spec);
    ir_ = lower(c_.model, c_.pipeline);
  }

  testing::FittedCase c_;
  ModelIR ir_;
};

TEST_F(EmitTest, DeterministicWithChecksum) {
  for (auto d : {Dialect::kPortableC, Dialect::kEngineNative}) {
    const auto a = emit(ir_, d), b = emit(model_ir_from_json(to_json(ir_)), d);
    EXPECT_EQ(a.source, b.source);
    EXPECT_EQ(a.contract, b.contract);
    EXPECT_EQ(a.checksum, hex64(fnv1a64(a.source)));
    EXPECT_EQ(a.contract.at("checksum"), a.checksum);
  }
}

TEST_F(EmitTest, ContractDescribesInputsAndOutputs) {
  const auto a = emit(ir_, Dialect::kPortableC);
  const auto& k = a.contract;
  EXPECT_EQ(k.at("dialect"), "portable_c");
  ASSERT_EQ(k.at("inputs").size(), ir_.inputs.size());
  for (std::size_t i = 0; i < ir_.inputs.size(); ++i) {
    EXPECT_EQ(k.at("inputs")[i].at("index"), i);
    EXPECT_EQ(k.at("inputs")[i].at("name"), ir_.inputs[i].name);
  }
  EXPECT_EQ(k.at("outputs").at("classes"), (std::vector<std::string>{"No", "Yes"}));
  EXPECT_EQ(k.at("outputs").at("count"), 2);
  EXPECT_EQ(k.at("outputs").at("transform"), "sigmoid");
  EXPECT_FALSE(k.at("encodings").empty());
}

TEST_F(EmitTest, WritesSourceAndContract) {
  TempDir dir;
  const auto files = write_artifact(emit(ir_, Dialect::kPortableC), dir.path() / "out");
  ASSERT_EQ(files.size(), 2u);
  for (const auto& f : files) EXPECT_TRUE(std::filesystem::exists(f));
  EXPECT_EQ(files[0].filename(), "model.c");
  std::ifstream in(files[1]);
  const auto contract = Json::parse(in);
  EXPECT_EQ(contract.at("checksum"), hex64(fnv1a64(emit(ir_, Dialect::kPortableC).source)));
}

TEST_F(EmitTest, UnknownDialect) {
  try {
    (void)dialect_from_name("wasm");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "UNSUPPORTED_DIALECT");
  }
  EXPECT_EQ(dialect_from_name("portable_c"), Dialect::kPortableC);
  EXPECT_EQ(dialect_from_name("engine_native"), Dialect::kEngineNative);
}

TEST_F(EmitTest, BenchmarkReportsMedianFields) {
  const NativeModel native(ir_);
  const auto b = benchmark(c_.model, &c_.pipeline, native, c_.encoded, 5);
  EXPECT_EQ(b.rows, c_.encoded.rows());
  EXPECT_EQ(b.repeats, 5);
  EXPECT_GT(b.interpreted_ns_per_row, 0.0);
  EXPECT_GT(b.compiled_ns_per_row, 0.0);
  EXPECT_NEAR(b.ratio, b.interpreted_ns_per_row / b.compiled_ns_per_row, 1e-12);
  EXPECT_GT(b.interpreted_bytes, 0u);
  EXPECT_GT(b.compiled_bytes, 0u);
  const auto j = to_json(b);
  for (const char* key : {"interpreted_ns_per_row", "compiled_ns_per_row", "ratio", "interpreted_bytes",
                          "compiled_bytes", "rows", "repeats"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_THROW(benchmark(c_.model, &c_.pipeline, native, Matrix(0, c_.encoded.cols())), Error);
}

TEST_F(EmitTest, SchemaMismatch) {
  EXPECT_THROW(NativeModel(ir_).predict(Matrix(2, ir_.inputs.size() + 1)), Error);
}

}  // namespace
}  // namespace deskml::codegen
