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


#include "culturemod/eval/score_report.hpp"

#include <algorithm>

#include "culturemod/core/error.hpp"
#include "culturemod/eval/metrics.hpp"

namespace culturemod::eval {

StratumStats summarize_scores(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorKind::empty_input, "no scores to summarize");
  std::sort(values.begin(), values.end());
  StratumStats s;
  s.count = values.size();
  s.mean = mean(values);
  s.min = values.front();
  s.max = values.back();
  s.q1 = quantile_sorted(values, 0.25);
  s.median = quantile_sorted(values, 0.5);
  s.q3 = quantile_sorted(values, 0.75);
  return s;
}

ScoreDistributionReport score_distribution_report(std::span<const Prediction> predictions,
                                                  const CultureId& model_culture) {
  if (predictions.empty()) throw Error(ErrorKind::empty_input, "score report needs predictions");
  std::map<StratumKey, std::vector<double>> groups;
  for (const auto& [record, p] : predictions) {
    groups[{record.policy_category, record.culture == model_culture, record.is_fyi}].push_back(p);
  }
  ScoreDistributionReport r;
  r.model_culture = model_culture;
  for (auto& [key, values] : groups) r.strata.emplace(key, summarize_scores(std::move(values)));
  return r;
}

nlohmann::json ScoreDistributionReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [k, s] : strata) {
    rows.push_back({{"policy_category", k.policy_category},
                    {"origin_match", k.origin_match},
                    {"fyi", k.fyi},
                    {"count", s.count},
                    {"mean", s.mean},
                    {"min", s.min},
                    {"q1", s.q1},
                    {"median", s.median},
                    {"q3", s.q3},
                    {"max", s.max}});
  }
  return {{"model_culture", model_culture.code()},
          {"quantile_method", "linear interpolation between order statistics (type 7)"},
          {"strata", rows}};
}

}  // namespace culturemod::eval
