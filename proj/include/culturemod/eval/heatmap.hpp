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
#include <vector>

#include <json.hpp>

#include "culturemod/core/culture.hpp"
#include "culturemod/ingestion/media_diet.hpp"
#include "culturemod/model/beam_search.hpp"
#include "culturemod/model/bundle.hpp"

namespace culturemod::eval {

struct HeatmapMatrix {
  std::vector<CultureId> row_cultures;  // models
  std::vector<CultureId> col_cultures;  // test sets
  std::vector<std::vector<double>> raw;  // mean ROUGE-1 F1
  std::vector<double> base;              // base model per test set
  std::vector<std::vector<double>> improvement;
  std::vector<std::vector<double>> normalized;  // per-column min-max of improvement

  nlohmann::json to_json() const;
  static HeatmapMatrix from_json(const nlohmann::json& j);
};

// improvement = (raw - base_j) / max(base_j, eps); normalized rescales each
// column to [0, 1] and is 0 for a constant column.
void normalize_heatmap(HeatmapMatrix& m, double eps = 1e-9);

// Mean ROUGE-1 F1 of the bundle's decodes against the reference summaries.
double mean_rouge1(const model::CulturalModelBundle& bundle,
                   const std::vector<ingestion::SummaryPair>& test_set,
                   const model::DecodingConfig& decoding);

HeatmapMatrix cross_culture_heatmap(const std::vector<CultureId>& cultures,
                                    const model::BundleMap& bundles,
                                    const std::map<CultureId, std::vector<ingestion::SummaryPair>>& test_sets,
                                    const model::CulturalModelBundle& base,
                                    const model::DecodingConfig& decoding);

// Number of columns whose maximum raw score sits on the diagonal.
int diagonal_argmax_columns(const HeatmapMatrix& m);

}  // namespace culturemod::eval
