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
#include <string_view>
#include <vector>

#include <json.hpp>

namespace culturemod::eval {

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Unigram overlap on lowercased alphanumeric tokens with clipped counts.
// Throws empty_input when the reference has no tokens.
RougeScore rouge1(std::string_view candidate, std::string_view reference);

// P(score of a random positive > score of a random negative), ties count one
// half. Labels are 0/1 and both classes must be present.
double auroc(std::span<const double> scores, std::span<const int> labels);

struct WelchResult {
  double t_statistic = 0.0;
  double degrees_of_freedom = 0.0;
  double p_value = 1.0;

  nlohmann::json to_json() const;
};

// Two-sided Welch test of mean(a) = mean(b).
WelchResult welch_t_test(std::span<const double> a, std::span<const double> b);

// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);
// P(T > t) for Student's t with `df` degrees of freedom.
double student_t_sf(double t, double df);

double mean(std::span<const double> x);
// Sample (n - 1) standard deviation; 0 for fewer than two values.
double sample_sd(std::span<const double> x);
// Linear interpolation between order statistics (R type 7). `sorted` must be
// ascending and non-empty.
double quantile_sorted(std::span<const double> sorted, double p);

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

// mean ± 1.96·sd/√n.
Interval normal_ci95(std::span<const double> x);

}  // namespace culturemod::eval
