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


#pragma once

#include <span>
#include <vector>

#include <json.hpp>

namespace culturemod::model {

double sigmoid(double z);

// Linear head over an embedding: p = σ(w·x + b).
struct LogisticHead {
  std::vector<double> weights;
  double bias = 0.0;

  double logit(std::span<const float> x) const;
  double predict(std::span<const float> x) const { return sigmoid(logit(x)); }

  nlohmann::json to_json() const;
  static LogisticHead from_json(const nlohmann::json& j);
};

struct LogisticOptions {
  // Inverse L2 strength on the weights (the intercept is unpenalized).
  double c = 1.0;
  int max_iterations = 100;
  double tolerance = 1e-8;
};

// Minimizes ½‖w‖² + C·Σ log-loss with damped Newton steps.
LogisticHead fit_logistic(const std::vector<std::vector<float>>& x, std::span<const int> y,
                          const LogisticOptions& options = {});

}  // namespace culturemod::model
