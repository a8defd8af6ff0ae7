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

#include "deskml/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "deskml/common/error.hpp"

namespace deskml::eval {

std::string_view split_name(Split s) noexcept {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kValidation: return "validation";
    case Split::kTest: return "test";
  }
  return "validation";
}

std::size_t ConfusionMatrix::total() const noexcept {
  std::size_t n = 0;
  for (const auto& row : counts) n = std::accumulate(row.begin(), row.end(), n);
  return n;
}

namespace {

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

double f1_of(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

std::vector<std::size_t> by_score_desc(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

}  // namespace

std::vector<RocPoint> roc_points(std::span<const double> scores, std::span<const std::uint8_t> positive) {
  const double p = static_cast<double>(std::count(positive.begin(), positive.end(), std::uint8_t{1}));
  const double n = static_cast<double>(positive.size()) - p;
  std::vector<RocPoint> out{{0.0, 0.0, std::numeric_limits<double>::infinity()}};
  const auto order = by_score_desc(scores);
  double tp = 0.0, fp = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    for (; i < order.size() && scores[order[i]] == s; ++i) (positive[order[i]] ? tp : fp) += 1.0;
    out.push_back({ratio(fp, n), ratio(tp, p), s});
  }
  return out;
}

std::vector<PrPoint> pr_points(std::span<const double> scores, std::span<const std::uint8_t> positive) {
  const double p = static_cast<double>(std::count(positive.begin(), positive.end(), std::uint8_t{1}));
  std::vector<PrPoint> out{{0.0, 1.0, std::numeric_limits<double>::infinity()}};
  const auto order = by_score_desc(scores);
  double tp = 0.0, fp = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    for (; i < order.size() && scores[order[i]] == s; ++i) (positive[order[i]] ? tp : fp) += 1.0;
    out.push_back({ratio(tp, p), ratio(tp, tp + fp), s});
  }
  return out;
}

double roc_auc(std::span<const RocPoint> points) {
  if (points.size() < 2) fail(ErrorKind::kInvalidArgument, "TOO_FEW_POINTS", "ROC area needs at least two points");
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    area += (points[i].fpr - points[i - 1].fpr) * (points[i].tpr + points[i - 1].tpr) / 2.0;
  }
  return std::clamp(area, 0.0, 1.0);
}

EvalReport classification_report(std::span<const double> y_true, const Matrix& probabilities,
                                 std::span<const std::string> labels, double threshold, Split split) {
  const std::size_t n = y_true.size(), k = probabilities.cols();
  if (n == 0 || probabilities.rows() != n) {
    fail(ErrorKind::kInvalidArgument, "LENGTH_MISMATCH", "targets and probability rows differ in length or are empty");
  }
  if (labels.size() != k) fail(ErrorKind::kInvalidArgument, "LENGTH_MISMATCH", "label count differs from probability columns");
  for (double y : y_true) {
    if (!(y >= 0 && y < static_cast<double>(k)) || y != std::floor(y)) {
      fail(ErrorKind::kInvalidArgument, "UNKNOWN_CLASS", "target class is absent from the probability columns");
    }
  }
  const bool binary = k == 2;
  if (binary && !(threshold > 0.0 && threshold < 1.0)) {
    fail(ErrorKind::kInvalidArgument, "INVALID_THRESHOLD", "threshold must lie in (0, 1)");
  }

  ClassificationMetrics m;
  m.threshold = threshold;
  m.confusion.labels.assign(labels.begin(), labels.end());
  m.confusion.counts.assign(k, std::vector<std::size_t>(k, 0));
  std::vector<std::size_t> predicted(n);
  double loss = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = probabilities.row(r);
    if (binary) {
      predicted[r] = row[1] > threshold ? 1 : 0;
    } else {
      predicted[r] = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
    }
    const auto t = static_cast<std::size_t>(y_true[r]);
    m.confusion.counts[t][predicted[r]]++;
    loss -= std::log(std::clamp(row[t], kProbabilityClip, 1.0 - kProbabilityClip));
  }
  m.log_loss = loss / static_cast<double>(n);

  double correct = 0.0;
  for (std::size_t c = 0; c < k; ++c) correct += static_cast<double>(m.confusion.counts[c][c]);
  m.accuracy = correct / static_cast<double>(n);

  auto class_scores = [&](std::size_t c) {
    double tp = static_cast<double>(m.confusion.counts[c][c]), fp = 0.0, fn = 0.0;
    for (std::size_t o = 0; o < k; ++o) {
      if (o == c) continue;
      fp += static_cast<double>(m.confusion.counts[o][c]);
      fn += static_cast<double>(m.confusion.counts[c][o]);
    }
    const double p = ratio(tp, tp + fp), rc = ratio(tp, tp + fn);
    return std::array<double, 3>{p, rc, f1_of(p, rc)};
  };
  if (binary) {
    const auto s = class_scores(1);
    m.precision = s[0];
    m.recall = s[1];
    m.f1 = s[2];
  } else {
    std::set<std::size_t> present(predicted.begin(), predicted.end());
    for (double y : y_true) present.insert(static_cast<std::size_t>(y));
    for (auto c : present) {
      const auto s = class_scores(c);
      m.precision += s[0];
      m.recall += s[1];
      m.f1 += s[2];
    }
    const double count = static_cast<double>(present.size());
    m.precision /= count;
    m.recall /= count;
    m.f1 /= count;
  }

  if (k >= 2) {
    std::vector<double> scores(n);
    std::vector<std::uint8_t> positive(n);
    for (std::size_t c = binary ? 1 : 0; c < k; ++c) {
      for (std::size_t r = 0; r < n; ++r) {
        scores[r] = probabilities(r, c);
        positive[r] = static_cast<std::size_t>(y_true[r]) == c;
      }
      ClassCurves curves;
      curves.label = labels[c];
      curves.roc = roc_points(scores, positive);
      const auto npos = std::count(positive.begin(), positive.end(), std::uint8_t{1});
      if (npos > 0 && static_cast<std::size_t>(npos) < n) curves.auc = roc_auc(curves.roc);
      curves.pr = pr_points(scores, positive);
      m.curves.push_back(std::move(curves));
    }
  }
  if (binary) {
    Density d;
    for (std::size_t b = 0; b <= kDensityBins; ++b) d.edges.push_back(static_cast<double>(b) / kDensityBins);
    d.counts.assign(2, std::vector<std::size_t>(kDensityBins, 0));
    for (std::size_t r = 0; r < n; ++r) {
      const double p = std::clamp(probabilities(r, 1), 0.0, 1.0);
      const auto bin = std::min(static_cast<std::size_t>(p * kDensityBins), kDensityBins - 1);
      d.counts[static_cast<std::size_t>(y_true[r])][bin]++;
    }
    m.density = std::move(d);
  }

  EvalReport report;
  report.split = split;
  report.task = models::Task::kClassification;
  report.rows = n;
  report.classification = std::move(m);
  return report;
}

EvalReport regression_report(std::span<const double> y_true, std::span<const double> y_pred, Split split,
                             models::Task task) {
  const std::size_t n = y_true.size();
  if (n == 0 || y_pred.size() != n) {
    fail(ErrorKind::kInvalidArgument, "LENGTH_MISMATCH", "targets and predictions differ in length or are empty");
  }
  RegressionMetrics m;
  double mean = 0.0;
  for (double y : y_true) mean += y;
  mean /= static_cast<double>(n);
  double ss_res = 0.0, ss_tot = 0.0, abs_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y_true[i] - y_pred[i];
    ss_res += e * e;
    abs_sum += std::abs(e);
    ss_tot += (y_true[i] - mean) * (y_true[i] - mean);
  }
  m.mse = ss_res / static_cast<double>(n);
  m.rmse = std::sqrt(m.mse);
  m.mae = abs_sum / static_cast<double>(n);
  if (ss_tot > 0.0) m.r2 = 1.0 - ss_res / ss_tot;
  EvalReport report;
  report.split = split;
  report.task = task;
  report.rows = n;
  report.regression = m;
  return report;
}

Json to_json(const EvalReport& r) {
  Json j{{"split", split_name(r.split)}, {"task", models::task_name(r.task)}, {"rows", r.rows}};
  if (r.classification) {
    const auto& m = *r.classification;
    j["metrics"] = {{"accuracy", m.accuracy},   {"precision", m.precision}, {"recall", m.recall},
                    {"f1", m.f1},               {"log_loss", m.log_loss},   {"threshold", m.threshold}};
    j["confusion_matrix"] = {{"labels", m.confusion.labels}, {"counts", m.confusion.counts}};
    Json curves = Json::array();
    for (const auto& c : m.curves) {
      Json roc = Json::array(), pr = Json::array();
      for (const auto& p : c.roc) roc.push_back({{"fpr", p.fpr}, {"tpr", p.tpr}, {"threshold", number_to_json(p.threshold)}});
      for (const auto& p : c.pr) {
        pr.push_back({{"recall", p.recall}, {"precision", p.precision}, {"threshold", number_to_json(p.threshold)}});
      }
      curves.push_back({{"label", c.label}, {"roc", roc}, {"auc", optional_to_json(c.auc)}, {"pr", pr}});
    }
    j["curves"] = curves;
    if (m.density) {
      Json counts = Json::object();
      for (std::size_t c = 0; c < m.density->counts.size(); ++c) counts[m.confusion.labels[c]] = m.density->counts[c];
      j["density"] = {{"edges", m.density->edges}, {"counts", counts}};
    } else {
      j["density"] = nullptr;
    }
  }
  if (r.regression) {
    const auto& m = *r.regression;
    j["metrics"] = {{"mse", m.mse}, {"rmse", m.rmse}, {"mae", m.mae}, {"r2", optional_to_json(m.r2)},
                    {"r2_defined", m.r2.has_value()}};
  }
  return j;
}

}  // namespace deskml::eval
