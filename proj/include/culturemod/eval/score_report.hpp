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

#include <map>
#include <span>
#include <string>
#include <utility>

#include <json.hpp>

#include "culturemod/core/culture.hpp"
#include "culturemod/dataset/moderation_dataset.hpp"

namespace culturemod::eval {

struct StratumKey {
  std::string policy_category;
  bool origin_match = false;
  bool fyi = false;

  auto operator<=>(const StratumKey&) const = default;
};

struct StratumStats {
  std::size_t count = 0;
  double mean = 0.0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

// Predicted probabilities stratified by (category, origin == model culture, FYI).
struct ScoreDistributionReport {
  CultureId model_culture;
  std::map<StratumKey, StratumStats> strata;

  nlohmann::json to_json() const;
};

using Prediction = std::pair<dataset::ModerationRecord, double>;

StratumStats summarize_scores(std::vector<double> values);

ScoreDistributionReport score_distribution_report(std::span<const Prediction> predictions,
                                                  const CultureId& model_culture);

}  // namespace culturemod::eval
