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

// Gaussian naive Bayes and k-nearest neighbours.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "learners.hpp"

namespace deskml::models::detail {

NaiveBayesParams fit_gaussian_nb(FitInput& in) {
  const std::size_t n = in.x.rows(), d = in.x.cols();
  const std::size_t k = in.y.classes.size();
  NaiveBayesParams p;
  p.means = Matrix(k, d);
  p.variances = Matrix(k, d);
  p.log_priors.assign(k, -std::numeric_limits<double>::infinity());
  std::vector<double> counts(k, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const auto c = static_cast<std::size_t>(in.y.values[r]);
    counts[c] += 1.0;
    for (std::size_t j = 0; j < d; ++j) p.means(c, j) += in.x(r, j);
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0.0) continue;
    for (std::size_t j = 0; j < d; ++j) p.means(c, j) /= counts[c];
    p.log_priors[c] = std::log(counts[c] / static_cast<double>(n));
  }
  for (std::size_t r = 0; r < n; ++r) {
    const auto c = static_cast<std::size_t>(in.y.values[r]);
    for (std::size_t j = 0; j < d; ++j) {
      const double dv = in.x(r, j) - p.means(c, j);
      p.variances(c, j) += dv * dv;
    }
  }
  // Smoothing proportional to the largest feature variance.
  double max_var = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double m = 0.0, v = 0.0;
    for (std::size_t r = 0; r < n; ++r) m += in.x(r, j);
    m /= static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r) v += (in.x(r, j) - m) * (in.x(r, j) - m);
    max_var = std::max(max_var, v / static_cast<double>(n));
  }
  double eps = hp_real(in.hp, "var_smoothing") * max_var;
  if (eps <= 0.0) eps = hp_real(in.hp, "var_smoothing");
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t j = 0; j < d; ++j) {
      p.variances(c, j) = (counts[c] > 0 ? p.variances(c, j) / counts[c] : 0.0) + eps;
    }
  }
  in.ops += 3 * n * d;
  return p;
}

KnnParams fit_knn(FitInput& in) {
  KnnParams p;
  p.x = in.x;
  p.y = in.y.values;
  p.k = hp_int(in.hp, "k");
  p.distance_weighted = hp_string(in.hp, "weights") == "distance";
  in.ops += in.x.rows() * in.x.cols();
  return p;
}

namespace {

std::uint64_t predict_nb(const NaiveBayesParams& p, std::span<const double> row, std::span<double> out) {
  const std::size_t k = p.log_priors.size(), d = p.means.cols();
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < k; ++c) {
    if (std::isinf(p.log_priors[c])) {
      out[c] = -std::numeric_limits<double>::infinity();
      continue;
    }
    double ll = p.log_priors[c];
    for (std::size_t j = 0; j < d; ++j) {
      const double v = p.variances(c, j);
      const double diff = row[j] - p.means(c, j);
      ll -= 0.5 * (std::log(2.0 * std::numbers::pi * v) + diff * diff / v);
    }
    out[c] = ll;
    best = std::max(best, ll);
  }
  double sum = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    out[c] = std::isinf(out[c]) ? 0.0 : std::exp(out[c] - best);
    sum += out[c];
  }
  for (std::size_t c = 0; c < k; ++c) out[c] /= sum;
  return 4 * k * d;
}

std::uint64_t predict_knn(const KnnParams& p, std::size_t outputs, std::span<const double> row, std::span<double> out,
                          std::vector<double>& scratch) {
  const std::size_t n = p.x.rows(), d = p.x.cols();
  scratch.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = p.x.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = xi[j] - row[j];
      s += diff * diff;
    }
    scratch[i] = s;
  }
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(p.k), n);
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  // Nearest first; equal distances resolved by lower training index.
  auto closer = [&](std::size_t a, std::size_t b) { return scratch[a] != scratch[b] ? scratch[a] < scratch[b] : a < b; };
  std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k - 1), idx.end(), closer);
  std::sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), closer);

  std::vector<double> weights(k, 1.0);
  if (p.distance_weighted) {
    bool exact = false;
    for (std::size_t i = 0; i < k; ++i) exact = exact || scratch[idx[i]] == 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double dist = std::sqrt(scratch[idx[i]]);
      weights[i] = exact ? (dist == 0.0 ? 1.0 : 0.0) : 1.0 / dist;
    }
  }
  double total = 0.0;
  for (double w : weights) total += w;
  std::fill(out.begin(), out.end(), 0.0);
  if (outputs == 1) {
    // Regression: weighted mean of neighbour targets.
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += weights[i] * p.y[idx[i]];
    out[0] = s / total;
  } else {
    for (std::size_t i = 0; i < k; ++i) out[static_cast<std::size_t>(p.y[idx[i]])] += weights[i] / total;
  }
  return n * d + k;
}

}  // namespace

std::uint64_t predict_local(const ModelParams& params, std::size_t outputs, std::span<const double> row,
                            std::span<double> out, std::vector<double>& scratch) {
  if (const auto* nb = std::get_if<NaiveBayesParams>(&params)) return predict_nb(*nb, row, out);
  return predict_knn(std::get<KnnParams>(params), outputs, row, out, scratch);
}

}  // namespace deskml::models::detail
