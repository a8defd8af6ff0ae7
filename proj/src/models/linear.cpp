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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "deskml/common/error.hpp"
#include "learners.hpp"

namespace deskml::models {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd to_eigen(const Matrix& x) {
  MatrixXd m(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) m(r, c) = x(r, c);
  }
  return m;
}

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

LossAndGradient logistic_loss_and_gradient(const Matrix& x, std::span<const double> y, std::size_t classes,
                                           std::span<const double> params, double l2) {
  const std::size_t n = x.rows(), d = x.cols();
  const std::size_t scores = classes <= 2 ? 1 : classes;
  if (params.size() != scores * (d + 1) || y.size() != n || n == 0) {
    fail(ErrorKind::kInvalidArgument, "INVALID_TRAINING_DATA", "logistic parameter or target size mismatch");
  }
  LossAndGradient out;
  out.gradient.assign(params.size(), 0.0);
  std::vector<double> z(scores), p(scores);
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = x.row(r);
    for (std::size_t k = 0; k < scores; ++k) {
      const double* w = &params[k * (d + 1)];
      double s = w[d];
      for (std::size_t j = 0; j < d; ++j) s += w[j] * row[j];
      z[k] = s;
    }
    const auto label = static_cast<std::size_t>(y[r]);
    if (scores == 1) {
      out.loss += softplus(z[0]) - (label == 1 ? z[0] : 0.0);
      p[0] = sigmoid(z[0]) - (label == 1 ? 1.0 : 0.0);
    } else {
      const double zmax = *std::max_element(z.begin(), z.end());
      double sum = 0.0;
      for (std::size_t k = 0; k < scores; ++k) sum += std::exp(z[k] - zmax);
      const double lse = zmax + std::log(sum);
      out.loss += lse - z[label];
      for (std::size_t k = 0; k < scores; ++k) p[k] = std::exp(z[k] - lse) - (k == label ? 1.0 : 0.0);
    }
    for (std::size_t k = 0; k < scores; ++k) {
      double* g = &out.gradient[k * (d + 1)];
      for (std::size_t j = 0; j < d; ++j) g[j] += p[k] * row[j];
      g[d] += p[k];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  out.loss *= inv_n;
  for (auto& g : out.gradient) g *= inv_n;
  for (std::size_t k = 0; k < scores; ++k) {
    for (std::size_t j = 0; j < d; ++j) {
      const double w = params[k * (d + 1) + j];
      out.loss += 0.5 * l2 * w * w;
      out.gradient[k * (d + 1) + j] += l2 * w;
    }
  }
  return out;
}

namespace detail {

LinearParams fit_linear_regression(FitInput& in) {
  const std::size_t n = in.x.rows(), d = in.x.cols();
  const bool intercept = hp_bool(in.hp, "fit_intercept");
  MatrixXd a(n, d + (intercept ? 1 : 0));
  a.leftCols(d) = to_eigen(in.x);
  if (intercept) a.col(d).setOnes();
  const VectorXd y = Eigen::Map<const VectorXd>(in.y.values.data(), static_cast<Eigen::Index>(n));
  // Minimum-norm least squares copes with collinear one-hot blocks.
  const VectorXd beta = a.completeOrthogonalDecomposition().solve(y);
  in.ops += n * (d + 1) * (d + 1);
  LinearParams p;
  p.weights = Matrix(1, d);
  for (std::size_t j = 0; j < d; ++j) p.weights(0, j) = beta(static_cast<Eigen::Index>(j));
  p.bias = {intercept ? beta(static_cast<Eigen::Index>(d)) : 0.0};
  return p;
}

LinearParams fit_ridge(FitInput& in) {
  const std::size_t n = in.x.rows(), d = in.x.cols();
  const double alpha = hp_real(in.hp, "alpha");
  MatrixXd x = to_eigen(in.x);
  const VectorXd y = Eigen::Map<const VectorXd>(in.y.values.data(), static_cast<Eigen::Index>(n));
  const Eigen::RowVectorXd xm = x.colwise().mean();
  const double ym = y.mean();
  x.rowwise() -= xm;
  MatrixXd gram = x.transpose() * x;
  gram.diagonal().array() += alpha;
  const VectorXd w = gram.ldlt().solve(x.transpose() * (y.array() - ym).matrix());
  in.ops += n * d * d;
  LinearParams p;
  p.weights = Matrix(1, d);
  for (std::size_t j = 0; j < d; ++j) p.weights(0, j) = w(static_cast<Eigen::Index>(j));
  p.bias = {ym - xm.dot(w)};
  return p;
}

LinearParams fit_logistic(FitInput& in) {
  const std::size_t n = in.x.rows(), d = in.x.cols();
  const std::size_t classes = in.y.classes.size();
  const std::size_t scores = classes <= 2 ? 1 : classes;
  const double l2 = hp_real(in.hp, "l2");

  // Standardise internally; weights are mapped back to the raw scale.
  std::vector<double> mean(d, 0.0), scale(d, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += in.x(r, j);
  }
  for (auto& m : mean) m /= static_cast<double>(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < d; ++j) scale[j] += (in.x(r, j) - mean[j]) * (in.x(r, j) - mean[j]);
  }
  for (auto& s : scale) {
    s = std::sqrt(s / static_cast<double>(n));
    if (s == 0.0) s = 1.0;
  }
  Matrix xs(n, d);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < d; ++j) xs(r, j) = (in.x(r, j) - mean[j]) / scale[j];
  }

  // Fixed step 1/L from the curvature bound of the loss.
  MatrixXd aug(n, d + 1);
  aug.leftCols(d) = to_eigen(xs);
  aug.col(d).setOnes();
  const MatrixXd gram = aug.transpose() * aug / static_cast<double>(n);
  const double lambda_max = Eigen::SelfAdjointEigenSolver<MatrixXd>(gram, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
  const double curvature = (scores == 1 ? 0.25 : 0.5) * lambda_max + l2;
  const double step = 1.0 / std::max(curvature, 1e-12);

  std::vector<double> theta(scores * (d + 1), 0.0);
  double previous = 0.0;
  for (int it = 0; it < 500; ++it) {
    const auto lg = logistic_loss_and_gradient(xs, in.y.values, classes, theta, l2);
    in.ops += n * (d + 1) * scores;
    if (it > 0 && std::abs(previous - lg.loss) < 1e-8) break;
    previous = lg.loss;
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= step * lg.gradient[i];
  }

  LinearParams p;
  p.weights = Matrix(scores, d);
  p.bias.assign(scores, 0.0);
  for (std::size_t k = 0; k < scores; ++k) {
    double b = theta[k * (d + 1) + d];
    for (std::size_t j = 0; j < d; ++j) {
      const double w = theta[k * (d + 1) + j] / scale[j];
      p.weights(k, j) = w;
      b -= w * mean[j];
    }
    p.bias[k] = b;
  }
  p.transform = scores == 1 ? OutputTransform::kSigmoid : OutputTransform::kSoftmax;
  return p;
}

}  // namespace detail
}  // namespace deskml::models
