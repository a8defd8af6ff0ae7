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

#include "deskml/models/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "deskml/common/error.hpp"
#include "deskml/common/stopwatch.hpp"
#include "deskml/common/strings.hpp"
#include "learners.hpp"

namespace deskml::models {

std::string_view timing_mode_name(TimingMode m) noexcept { return m == TimingMode::kMeasured ? "measured" : "modelled"; }

TimingMode timing_mode_from_name(std::string_view s) {
  if (s == "modelled") return TimingMode::kModelled;
  if (s == "measured") return TimingMode::kMeasured;
  fail(ErrorKind::kInvalidArgument, "INVALID_TIMING", "timing must be 'modelled' or 'measured'");
}

std::string_view output_transform_name(OutputTransform t) noexcept {
  switch (t) {
    case OutputTransform::kIdentity: return "identity";
    case OutputTransform::kSigmoid: return "sigmoid";
    case OutputTransform::kSoftmax: return "softmax";
    case OutputTransform::kOvrSigmoid: return "ovr_sigmoid";
  }
  return "identity";
}

namespace {

OutputTransform output_transform_from_name(std::string_view s) {
  for (auto t : {OutputTransform::kIdentity, OutputTransform::kSigmoid, OutputTransform::kSoftmax,
                 OutputTransform::kOvrSigmoid}) {
    if (output_transform_name(t) == s) return t;
  }
  fail(ErrorKind::kInvalidArgument, "INVALID_MODEL", "unknown output transform '" + std::string(s) + "'");
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::size_t output_count(const TrainedModel& m) { return m.is_classifier() ? m.classes.size() : 1; }

}  // namespace

void apply_output_transform(OutputTransform t, std::span<const double> scores, std::span<double> out) noexcept {
  switch (t) {
    case OutputTransform::kIdentity:
      std::copy(scores.begin(), scores.end(), out.begin());
      return;
    case OutputTransform::kSigmoid: {
      const double p = sigmoid(scores[0]);
      out[0] = 1.0 - p;
      out[1] = p;
      return;
    }
    case OutputTransform::kSoftmax: {
      const double m = *std::max_element(scores.begin(), scores.end());
      double sum = 0.0;
      for (std::size_t k = 0; k < scores.size(); ++k) sum += out[k] = std::exp(scores[k] - m);
      for (std::size_t k = 0; k < scores.size(); ++k) out[k] /= sum;
      return;
    }
    case OutputTransform::kOvrSigmoid: {
      double sum = 0.0;
      for (std::size_t k = 0; k < scores.size(); ++k) sum += out[k] = sigmoid(scores[k]);
      for (std::size_t k = 0; k < scores.size(); ++k) out[k] = sum > 0 ? out[k] / sum : 1.0 / static_cast<double>(scores.size());
      return;
    }
  }
}

std::string_view combiner_name(Combiner c) noexcept { return c == Combiner::kMean ? "mean" : "sum_shrinkage"; }

namespace detail {

std::uint64_t predict_row(const ModelParams& params, std::size_t outputs, std::span<const double> row,
                          std::span<double> out, std::vector<double>& scratch) {
  if (const auto* lin = std::get_if<LinearParams>(&params)) {
    const std::size_t scores = lin->bias.size(), d = lin->weights.cols();
    scratch.resize(scores);
    for (std::size_t k = 0; k < scores; ++k) {
      double s = lin->bias[k];
      const auto w = lin->weights.row(k);
      for (std::size_t j = 0; j < d; ++j) s += w[j] * row[j];
      scratch[k] = s;
    }
    apply_output_transform(lin->transform, scratch, out);
    return scores * d;
  }
  if (const auto* ens = std::get_if<EnsembleParams>(&params)) {
    std::uint64_t ops = 0;
    if (ens->combiner == Combiner::kMean) {
      const auto& trees = ens->groups.at(0);
      scratch.assign(outputs, 0.0);
      for (const auto& t : trees) {
        ops += path_length(*t, row) + 1;
        const auto& v = find_leaf(*t, row).value;
        for (std::size_t k = 0; k < outputs; ++k) scratch[k] += v[k];
      }
      for (auto& s : scratch) s /= static_cast<double>(trees.size());
    } else {
      scratch.assign(ens->groups.size(), 0.0);
      for (std::size_t o = 0; o < ens->groups.size(); ++o) {
        double s = 0.0;
        for (const auto& t : ens->groups[o]) {
          ops += path_length(*t, row) + 1;
          s += find_leaf(*t, row).value[0];
        }
        scratch[o] = ens->base[o] + ens->learning_rate * s;
      }
    }
    apply_output_transform(ens->transform, scratch, out);
    return ops;
  }
  return predict_local(params, outputs, row, out, scratch);
}

}  // namespace detail

namespace {

void validate_training(const Matrix& x, const std::vector<std::string>& names, const TargetValues& y) {
  if (x.rows() == 0) fail(ErrorKind::kInvalidArgument, "INVALID_TRAINING_DATA", "training matrix has no rows");
  if (x.rows() != y.values.size()) {
    fail(ErrorKind::kInvalidArgument, "INVALID_TRAINING_DATA",
         "feature rows (" + std::to_string(x.rows()) + ") and targets (" + std::to_string(y.values.size()) +
             ") differ in length");
  }
  if (names.size() != x.cols()) {
    fail(ErrorKind::kInvalidArgument, "INVALID_TRAINING_DATA", "feature name count does not match the matrix");
  }
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) {
      if (!std::isfinite(x(r, c))) {
        fail(ErrorKind::kInvalidArgument, "INVALID_TRAINING_DATA",
             "non-finite value in feature '" + names[c] + "' at row " + std::to_string(r));
      }
    }
  }
  for (double v : y.values) {
    if (!std::isfinite(v)) fail(ErrorKind::kInvalidArgument, "INVALID_TRAINING_DATA", "non-finite target value");
    if (y.task == Task::kClassification &&
        (v < 0 || v >= static_cast<double>(y.classes.size()) || v != std::floor(v))) {
      fail(ErrorKind::kInvalidArgument, "INVALID_TRAINING_DATA", "class code out of range");
    }
  }
}

ModelParams train(Family family, detail::FitInput& in) {
  switch (family) {
    case Family::kLinearRegression: return detail::fit_linear_regression(in);
    case Family::kRidge: return detail::fit_ridge(in);
    case Family::kLogisticRegression: return detail::fit_logistic(in);
    case Family::kGaussianNb: return detail::fit_gaussian_nb(in);
    case Family::kKnn: return detail::fit_knn(in);
    case Family::kDecisionTree: return detail::fit_decision_tree(in);
    case Family::kRandomForest: return detail::fit_random_forest(in);
    case Family::kGradientBoosting: return detail::fit_gradient_boosting(in);
    default: {
      in.ops += in.y.values.size();
      return detail::fit_forecaster(family, in.hp, in.y.values);
    }
  }
}

}  // namespace

TrainedModel fit(Family family, const Json& hyperparams, const Matrix& x, std::vector<std::string> feature_names,
                 const TargetValues& y, const FitOptions& options) {
  if (!supports(family, y.task)) {
    fail(ErrorKind::kInvalidArgument, "UNSUPPORTED_TASK",
         std::string(family_name(family)) + " does not support " + std::string(task_name(y.task)));
  }
  TrainedModel model;
  model.family = family;
  model.task = y.task;
  model.hyperparams = search_space(family).resolve(hyperparams);
  model.feature_names = std::move(feature_names);
  model.classes = y.task == Task::kClassification ? y.classes : std::vector<std::string>{};
  model.resources.timing = options.timing;

  if (y.task == Task::kForecasting) {
    if (y.values.empty()) fail(ErrorKind::kInvalidArgument, "HISTORY_TOO_SHORT", "forecasting needs at least one value");
    detail::FitInput in{x, y, model.hyperparams, options.seed};
    Stopwatch sw;
    model.params = train(family, in);
    const double seconds = sw.seconds();
    model.resources.fit_ops = in.ops;
    model.resources.predict_ops_per_row = 1.0;
    if (options.timing == TimingMode::kMeasured) {
      model.resources.fit_seconds = seconds;
      Stopwatch ps;
      (void)forecast(model, 1000);
      model.resources.predict_seconds_per_1000 = ps.seconds();
    } else {
      model.resources.fit_seconds = static_cast<double>(in.ops) / kNominalOpsPerSecond;
      model.resources.predict_seconds_per_1000 = 1000.0 / kNominalOpsPerSecond;
    }
    return model;
  }

  validate_training(x, model.feature_names, y);
  if (y.task == Task::kClassification && y.classes.empty()) {
    fail(ErrorKind::kInvalidArgument, "INVALID_TRAINING_DATA", "classification target has no classes");
  }

  detail::FitInput in{x, y, model.hyperparams, options.seed};
  Stopwatch sw;
  if (y.task == Task::kClassification) {
    const std::set<double> present(y.values.begin(), y.values.end());
    if (present.size() < 2) {
      // Single-class target: constant prediction of that class.
      model.degenerate = true;
      LinearParams p;
      p.weights = Matrix(y.classes.size(), x.cols());
      p.bias.assign(y.classes.size(), 0.0);
      p.bias[static_cast<std::size_t>(*present.begin())] = 1.0;
      p.transform = OutputTransform::kIdentity;
      model.params = std::move(p);
      in.ops += x.rows();
    }
  }
  if (!model.degenerate) model.params = train(family, in);
  const double fit_seconds = sw.seconds();

  // Prediction cost on up to 1000 training rows.
  const std::size_t probe = std::min<std::size_t>(1000, x.rows());
  std::vector<double> out(output_count(model)), scratch;
  std::uint64_t ops = 0;
  Stopwatch ps;
  for (std::size_t r = 0; r < probe; ++r) ops += detail::predict_row(model.params, out.size(), x.row(r), out, scratch);
  const double predict_seconds = ps.seconds();

  model.resources.fit_ops = in.ops;
  model.resources.predict_ops_per_row = static_cast<double>(ops) / static_cast<double>(probe);
  if (options.timing == TimingMode::kMeasured) {
    model.resources.fit_seconds = fit_seconds;
    model.resources.predict_seconds_per_1000 = predict_seconds * 1000.0 / static_cast<double>(probe);
  } else {
    model.resources.fit_seconds = static_cast<double>(in.ops) / kNominalOpsPerSecond;
    model.resources.predict_seconds_per_1000 = model.resources.predict_ops_per_row * 1000.0 / kNominalOpsPerSecond;
  }
  return model;
}

Predictions predict(const TrainedModel& model, const Matrix& x) {
  Predictions p;
  if (model.task == Task::kForecasting) {
    p.values = x.rows() == 0 ? std::vector<double>{} : forecast(model, static_cast<int>(x.rows()));
    return p;
  }
  if (x.cols() != model.feature_names.size()) {
    fail(ErrorKind::kInvalidArgument, "FEATURE_MISMATCH",
         "expected " + std::to_string(model.feature_names.size()) + " features, got " + std::to_string(x.cols()));
  }
  const std::size_t outputs = output_count(model);
  Matrix out(x.rows(), outputs);
  std::vector<double> scratch;
  for (std::size_t r = 0; r < x.rows(); ++r) detail::predict_row(model.params, outputs, x.row(r), out.row(r), scratch);
  p.values.resize(x.rows());
  if (model.is_classifier()) {
    for (std::size_t r = 0; r < x.rows(); ++r) {
      const auto row = out.row(r);
      p.values[r] = static_cast<double>(std::max_element(row.begin(), row.end()) - row.begin());
    }
    p.probabilities = std::move(out);
  } else {
    for (std::size_t r = 0; r < x.rows(); ++r) p.values[r] = out(r, 0);
  }
  return p;
}

Predictions predict(const TrainedModel& model, const Matrix& x, std::span<const std::string> columns) {
  if (columns.size() != x.cols()) {
    fail(ErrorKind::kInvalidArgument, "FEATURE_MISMATCH", "column name count does not match the matrix");
  }
  std::vector<std::string> missing, extra;
  for (const auto& f : model.feature_names) {
    if (std::find(columns.begin(), columns.end(), f) == columns.end()) missing.push_back(f);
  }
  for (const auto& c : columns) {
    if (std::find(model.feature_names.begin(), model.feature_names.end(), c) == model.feature_names.end()) {
      extra.push_back(c);
    }
  }
  if (!missing.empty() || !extra.empty()) {
    std::string msg = "feature columns do not match the model";
    if (!missing.empty()) msg += "; missing: " + join(missing, ", ");
    if (!extra.empty()) msg += "; extra: " + join(extra, ", ");
    fail(ErrorKind::kInvalidArgument, "FEATURE_MISMATCH", msg);
  }
  if (std::equal(columns.begin(), columns.end(), model.feature_names.begin(), model.feature_names.end())) {
    return predict(model, x);
  }
  Matrix ordered(x.rows(), x.cols());
  for (std::size_t j = 0; j < model.feature_names.size(); ++j) {
    const auto src = static_cast<std::size_t>(std::find(columns.begin(), columns.end(), model.feature_names[j]) - columns.begin());
    for (std::size_t r = 0; r < x.rows(); ++r) ordered(r, j) = x(r, src);
  }
  return predict(model, ordered);
}

std::vector<double> forecast(const TrainedModel& model, int horizon) {
  const auto* state = std::get_if<ForecasterParams>(&model.params);
  if (!state) fail(ErrorKind::kInvalidArgument, "UNSUPPORTED_TASK", "model is not a forecaster");
  return detail::forecast_from(model.family, model.hyperparams, *state, horizon);
}

std::vector<double> forecast(const TrainedModel& model, std::span<const double> history, int horizon) {
  if (!is_forecaster(model.family)) fail(ErrorKind::kInvalidArgument, "UNSUPPORTED_TASK", "model is not a forecaster");
  if (horizon <= 0) fail(ErrorKind::kInvalidArgument, "INVALID_HORIZON", "horizon must be at least 1");
  const auto state = detail::fit_forecaster(model.family, model.hyperparams, history);
  return detail::forecast_from(model.family, model.hyperparams, state, horizon);
}

std::size_t parameter_count(const TrainedModel& model) {
  return std::visit(
      [&](const auto& p) -> std::size_t {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LinearParams>) {
          return p.weights.rows() * p.weights.cols() + p.bias.size();
        } else if constexpr (std::is_same_v<T, NaiveBayesParams>) {
          return 2 * p.means.rows() * p.means.cols() + p.log_priors.size();
        } else if constexpr (std::is_same_v<T, KnnParams>) {
          return p.x.rows() * p.x.cols() + p.y.size();
        } else if constexpr (std::is_same_v<T, EnsembleParams>) {
          std::size_t n = p.base.size();
          for (const auto& g : p.groups) {
            for (const auto& t : g) n += node_count(*t);
          }
          return n;
        } else {
          return model.family == Family::kSeasonalNaive ? p.history_tail.size()
                 : model.family == Family::kNaiveForecaster ? 1
                                                            : 2;
        }
      },
      model.params);
}

double explainability(const TrainedModel& model) {
  return family_info(model.family).interpretability_rank +
         0.1 * std::log10(1.0 + static_cast<double>(parameter_count(model)));
}

namespace {

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(std::vector<double>(m.row(r).begin(), m.row(r).end()));
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

Matrix matrix_from_json(const Json& j) {
  Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  const auto& data = j.at("data");
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = number_from_json(data.at(r).at(c));
  }
  return m;
}

Json numbers_to_json(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number_to_json(x));
  return a;
}

std::vector<double> numbers_from_json(const Json& j) {
  std::vector<double> v;
  for (const auto& x : j) v.push_back(number_from_json(x));
  return v;
}

Json params_to_json(const ModelParams& params) {
  return std::visit(
      [](const auto& p) -> Json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LinearParams>) {
          return {{"kind", "linear"},
                  {"weights", matrix_to_json(p.weights)},
                  {"bias", p.bias},
                  {"transform", output_transform_name(p.transform)}};
        } else if constexpr (std::is_same_v<T, NaiveBayesParams>) {
          return {{"kind", "gaussian_nb"},
                  {"means", matrix_to_json(p.means)},
                  {"variances", matrix_to_json(p.variances)},
                  {"log_priors", numbers_to_json(p.log_priors)}};
        } else if constexpr (std::is_same_v<T, KnnParams>) {
          return {{"kind", "knn"},
                  {"x", matrix_to_json(p.x)},
                  {"y", p.y},
                  {"k", p.k},
                  {"distance_weighted", p.distance_weighted}};
        } else if constexpr (std::is_same_v<T, EnsembleParams>) {
          Json groups = Json::array();
          for (const auto& g : p.groups) {
            Json trees = Json::array();
            for (const auto& t : g) trees.push_back(tree_to_json(*t));
            groups.push_back(std::move(trees));
          }
          return {{"kind", "ensemble"},
                  {"combiner", combiner_name(p.combiner)},
                  {"learning_rate", p.learning_rate},
                  {"base", p.base},
                  {"transform", output_transform_name(p.transform)},
                  {"groups", groups}};
        } else {
          return {{"kind", "forecaster"},
                  {"history_tail", p.history_tail},
                  {"first", p.first},
                  {"last", p.last},
                  {"level", p.level},
                  {"count", p.count}};
        }
      },
      params);
}

ModelParams params_from_json(const Json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "linear") {
    LinearParams p;
    p.weights = matrix_from_json(j.at("weights"));
    p.bias = j.at("bias").get<std::vector<double>>();
    p.transform = output_transform_from_name(j.at("transform").get<std::string>());
    return p;
  }
  if (kind == "gaussian_nb") {
    NaiveBayesParams p;
    p.means = matrix_from_json(j.at("means"));
    p.variances = matrix_from_json(j.at("variances"));
    p.log_priors = numbers_from_json(j.at("log_priors"));
    return p;
  }
  if (kind == "knn") {
    KnnParams p;
    p.x = matrix_from_json(j.at("x"));
    p.y = j.at("y").get<std::vector<double>>();
    p.k = j.at("k").get<int>();
    p.distance_weighted = j.at("distance_weighted").get<bool>();
    return p;
  }
  if (kind == "ensemble") {
    EnsembleParams p;
    p.combiner = j.at("combiner").get<std::string>() == "mean" ? Combiner::kMean : Combiner::kSumShrinkage;
    p.learning_rate = j.at("learning_rate").get<double>();
    p.base = j.at("base").get<std::vector<double>>();
    p.transform = output_transform_from_name(j.at("transform").get<std::string>());
    for (const auto& g : j.at("groups")) {
      auto& group = p.groups.emplace_back();
      for (const auto& t : g) group.push_back(TreePtr(tree_from_json(t)));
    }
    return p;
  }
  if (kind == "forecaster") {
    ForecasterParams p;
    p.history_tail = j.at("history_tail").get<std::vector<double>>();
    p.first = j.at("first").get<double>();
    p.last = j.at("last").get<double>();
    p.level = j.at("level").get<double>();
    p.count = j.at("count").get<std::size_t>();
    return p;
  }
  fail(ErrorKind::kInvalidArgument, "INVALID_MODEL", "unknown parameter kind '" + kind + "'");
}

}  // namespace

Json to_json(const TrainedModel& m) {
  const auto& r = m.resources;
  return {{"family", family_name(m.family)},
          {"task", task_name(m.task)},
          {"hyperparams", m.hyperparams},
          {"feature_names", m.feature_names},
          {"classes", m.classes},
          {"degenerate", m.degenerate},
          {"parameter_count", parameter_count(m)},
          {"resources",
           {{"timing", timing_mode_name(r.timing)},
            {"fit_seconds", r.fit_seconds},
            {"predict_seconds_per_1000", r.predict_seconds_per_1000},
            {"fit_ops", r.fit_ops},
            {"predict_ops_per_row", r.predict_ops_per_row}}},
          {"params", params_to_json(m.params)}};
}

TrainedModel trained_model_from_json(const Json& j) {
  TrainedModel m;
  m.family = family_from_name(j.at("family").get<std::string>());
  m.task = task_from_name(j.at("task").get<std::string>());
  m.hyperparams = j.at("hyperparams");
  m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  m.classes = j.at("classes").get<std::vector<std::string>>();
  m.degenerate = j.at("degenerate").get<bool>();
  const auto& r = j.at("resources");
  m.resources.timing = timing_mode_from_name(r.at("timing").get<std::string>());
  m.resources.fit_seconds = r.at("fit_seconds").get<double>();
  m.resources.predict_seconds_per_1000 = r.at("predict_seconds_per_1000").get<double>();
  m.resources.fit_ops = r.at("fit_ops").get<std::uint64_t>();
  m.resources.predict_ops_per_row = r.at("predict_ops_per_row").get<double>();
  m.params = params_from_json(j.at("params"));
  return m;
}

}  // namespace deskml::models
