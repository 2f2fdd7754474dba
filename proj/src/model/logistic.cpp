/* Copyright 2026 The CultureMod Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/


#include "culturemod/model/logistic.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "culturemod/core/error.hpp"

namespace culturemod::model {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double LogisticHead::logit(std::span<const float> x) const {
  if (x.size() != weights.size()) {
    throw Error(ErrorKind::invalid_argument, "embedding size does not match classifier head");
  }
  double z = bias;
  for (std::size_t i = 0; i < x.size(); ++i) z += weights[i] * x[i];
  return z;
}

nlohmann::json LogisticHead::to_json() const { return {{"weights", weights}, {"bias", bias}}; }

LogisticHead LogisticHead::from_json(const nlohmann::json& j) {
  LogisticHead h;
  h.weights = j.at("weights").get<std::vector<double>>();
  h.bias = j.at("bias").get<double>();
  return h;
}

namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

LogisticHead fit_logistic(const std::vector<std::vector<float>>& x, std::span<const int> y,
                          const LogisticOptions& options) {
  if (x.empty() || x.size() != y.size()) {
    throw Error(ErrorKind::invalid_argument, "logistic fit needs matching non-empty x and y");
  }
  const auto n = static_cast<Eigen::Index>(x.size());
  const auto d = static_cast<Eigen::Index>(x.front().size());
  // Last column is the intercept.
  Eigen::MatrixXd X(n, d + 1);
  Eigen::VectorXd Y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = x[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(row.size()) != d) {
      throw Error(ErrorKind::invalid_argument, "ragged embedding matrix");
    }
    for (Eigen::Index j = 0; j < d; ++j) X(i, j) = row[static_cast<std::size_t>(j)];
    X(i, d) = 1.0;
    Y(i) = y[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
  }
  const double C = options.c;
  Eigen::VectorXd penalty = Eigen::VectorXd::Ones(d + 1);
  penalty(d) = 0.0;

  const auto objective = [&](const Eigen::VectorXd& w) {
    const Eigen::VectorXd z = X * w;
    double loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) loss += softplus(z(i)) - Y(i) * z(i);
    return 0.5 * w.cwiseProduct(penalty).squaredNorm() + C * loss;
  };

  Eigen::VectorXd w = Eigen::VectorXd::Zero(d + 1);
  double f = objective(w);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    const Eigen::VectorXd z = X * w;
    Eigen::VectorXd p(n), s(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      p(i) = sigmoid(z(i));
      s(i) = std::max(p(i) * (1.0 - p(i)), 1e-12);
    }
    const Eigen::VectorXd grad = w.cwiseProduct(penalty) + C * X.transpose() * (p - Y);
    Eigen::MatrixXd hess = C * X.transpose() * s.asDiagonal() * X;
    hess.diagonal() += penalty;
    hess(d, d) += 1e-10;
    const Eigen::VectorXd dir = hess.ldlt().solve(grad);
    double step = 1.0;
    Eigen::VectorXd next = w - dir;
    double f_next = objective(next);
    while (f_next > f - 1e-4 * step * grad.dot(dir) && step > 1e-10) {
      step *= 0.5;
      next = w - step * dir;
      f_next = objective(next);
    }
    const double change = std::abs(f - f_next);
    w = std::move(next);
    f = f_next;
    if (grad.norm() < options.tolerance || change < options.tolerance * std::max(1.0, std::abs(f))) break;
  }

  LogisticHead head;
  head.weights.assign(w.data(), w.data() + d);
  head.bias = w(d);
  return head;
}

}  // namespace culturemod::model
