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


#include "culturemod/eval/heatmap.hpp"

#include <algorithm>

#include "culturemod/core/error.hpp"
#include "culturemod/eval/metrics.hpp"
#include "culturemod/model/stages.hpp"

namespace culturemod::eval {

using nlohmann::json;

namespace {

json codes(const std::vector<CultureId>& ids) {
  json out = json::array();
  for (const auto& c : ids) out.push_back(c.code());
  return out;
}

std::vector<CultureId> from_codes(const json& j) {
  std::vector<CultureId> out;
  for (const auto& c : j) out.emplace_back(c.get<std::string>());
  return out;
}

}  // namespace

json HeatmapMatrix::to_json() const {
  return {{"row_cultures", codes(row_cultures)},
          {"col_cultures", codes(col_cultures)},
          {"metric", "mean ROUGE-1 F1"},
          {"normalization", "per-column min-max of (raw - base) / max(base, eps)"},
          {"raw", raw},
          {"base", base},
          {"improvement", improvement},
          {"normalized", normalized}};
}

HeatmapMatrix HeatmapMatrix::from_json(const json& j) {
  HeatmapMatrix m;
  m.row_cultures = from_codes(j.at("row_cultures"));
  m.col_cultures = from_codes(j.at("col_cultures"));
  m.raw = j.at("raw").get<std::vector<std::vector<double>>>();
  m.base = j.at("base").get<std::vector<double>>();
  m.improvement = j.at("improvement").get<std::vector<std::vector<double>>>();
  m.normalized = j.at("normalized").get<std::vector<std::vector<double>>>();
  return m;
}

void normalize_heatmap(HeatmapMatrix& m, double eps) {
  const std::size_t rows = m.raw.size();
  const std::size_t cols = m.base.size();
  m.improvement.assign(rows, std::vector<double>(cols, 0.0));
  m.normalized.assign(rows, std::vector<double>(cols, 0.0));
  for (std::size_t j = 0; j < cols; ++j) {
    const double denom = std::max(m.base[j], eps);
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
      const double v = (m.raw[i][j] - m.base[j]) / denom;
      m.improvement[i][j] = v;
      lo = i == 0 ? v : std::min(lo, v);
      hi = i == 0 ? v : std::max(hi, v);
    }
    for (std::size_t i = 0; i < rows; ++i) {
      m.normalized[i][j] = hi > lo ? (m.improvement[i][j] - lo) / (hi - lo) : 0.0;
    }
  }
}

double mean_rouge1(const model::CulturalModelBundle& bundle,
                   const std::vector<ingestion::SummaryPair>& test_set,
                   const model::DecodingConfig& decoding) {
  if (test_set.empty()) throw Error(ErrorKind::empty_input, "empty test set");
  std::vector<double> f1(test_set.size());
  const auto n = static_cast<long>(test_set.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    const auto& p = test_set[static_cast<std::size_t>(i)];
    f1[static_cast<std::size_t>(i)] = rouge1(model::generate_text(bundle, p.article_text, decoding), p.summary_text).f1;
  }
  return mean(f1);
}

HeatmapMatrix cross_culture_heatmap(const std::vector<CultureId>& cultures,
                                    const model::BundleMap& bundles,
                                    const std::map<CultureId, std::vector<ingestion::SummaryPair>>& test_sets,
                                    const model::CulturalModelBundle& base,
                                    const model::DecodingConfig& decoding) {
  if (cultures.empty()) throw Error(ErrorKind::invalid_argument, "heatmap needs cultures");
  HeatmapMatrix m;
  m.row_cultures = cultures;
  m.col_cultures = cultures;
  for (const auto& c : cultures) {
    const auto it = bundles.find(c);
    if (it == bundles.end() || !it->second) {
      throw Error(ErrorKind::not_found, "no bundle for culture " + c.code());
    }
    if (it->second->stage < model::Stage::media_diet) {
      throw Error(ErrorKind::invalid_argument, "heatmap bundle " + c.code() + " is not media-diet tuned");
    }
    const auto ts = test_sets.find(c);
    if (ts == test_sets.end() || ts->second.empty()) {
      throw Error(ErrorKind::empty_input, "empty test set for column " + c.code());
    }
  }
  for (const auto& col : cultures) m.base.push_back(mean_rouge1(base, test_sets.at(col), decoding));
  for (const auto& row : cultures) {
    std::vector<double> r;
    for (const auto& col : cultures) r.push_back(mean_rouge1(*bundles.at(row), test_sets.at(col), decoding));
    m.raw.push_back(std::move(r));
  }
  normalize_heatmap(m);
  return m;
}

int diagonal_argmax_columns(const HeatmapMatrix& m) {
  int hits = 0;
  for (std::size_t j = 0; j < m.col_cultures.size(); ++j) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < m.raw.size(); ++i) {
      if (m.raw[i][j] > m.raw[best][j]) best = i;
    }
    if (best < m.row_cultures.size() && m.row_cultures[best] == m.col_cultures[j]) ++hits;
  }
  return hits;
}

}  // namespace culturemod::eval
