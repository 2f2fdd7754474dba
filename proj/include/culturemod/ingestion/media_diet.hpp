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

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "culturemod/core/culture.hpp"
#include "culturemod/core/timestamp.hpp"

namespace culturemod::ingestion {

class Summarizer;
class SentimentAnnotator;
class TopicAnnotator;

// Case-study scale: top 50 sources, 30-day window, 50,000 articles.
inline constexpr std::size_t kFullScaleTopSources = 50;
inline constexpr int kFullScaleWindowDays = 30;
inline constexpr std::size_t kFullScaleArticleCap = 50000;

struct MediaArticle {
  std::string id;
  CultureId culture;
  std::string source_id;
  std::string title;
  std::string body;
  Timestamp published_at{};
  double social_score = 0.0;
  std::optional<double> sentiment;
  std::optional<std::string> topic;

  void validate() const;
  nlohmann::json to_json() const;
  static MediaArticle from_json(const nlohmann::json& j);
};

struct SummaryPair {
  std::string article_id;
  std::string article_text;
  std::string summary_text;
  std::string summarizer_id;

  nlohmann::json to_json() const;
  static SummaryPair from_json(const nlohmann::json& j);
};

// Per-pair metadata kept for diagnostics.
struct ArticleFacets {
  std::string source_id;
  std::optional<double> sentiment;
  std::optional<std::string> topic;
};

struct DietDiagnostics {
  std::size_t article_count = 0;
  double histogram_low = -1.0;
  double histogram_high = 1.0;
  std::vector<std::size_t> sentiment_histogram;
  std::map<std::string, double> topic_breakdown;  // percentages
  std::size_t source_count = 0;

  nlohmann::json to_json() const;
  static DietDiagnostics from_json(const nlohmann::json& j);
};

struct MediaDietDataset {
  CultureId culture;
  std::vector<SummaryPair> pairs;
  std::vector<ArticleFacets> facets;  // parallel to pairs
  DietDiagnostics diagnostics;
};

// Popularity of one source given its articles; default sums social_score.
using PopularityMetric = std::function<double(std::span<const MediaArticle* const>)>;

// Top-k sources by descending popularity, ties by source id. All articles must
// belong to one culture.
std::vector<std::string> rank_sources(std::span<const MediaArticle> articles, std::size_t k,
                                      const PopularityMetric& metric = {});

// Articles from `allowed_sources` published within [now - window_days, now]
// (no lower bound when window_days is empty), sorted by descending
// social_score, then newer first, then id, and truncated to `cap`.
std::vector<MediaArticle> curate_articles(std::span<const MediaArticle> articles, Timestamp now,
                                          std::optional<int> window_days, std::size_t cap,
                                          const std::vector<std::string>& allowed_sources);

// One pair per article. Empty or non-shortening summaries are dropped with a
// warning; summarizer failures surface as retriable errors naming the article.
std::vector<SummaryPair> generate_summary_targets(std::span<const MediaArticle> articles,
                                                  Summarizer& summarizer);

// Sentiment/topic facets missing on the dataset are filled by the annotators.
DietDiagnostics diet_diagnostics(const MediaDietDataset& dataset, int bins = 20,
                                 const SentimentAnnotator* sentiment = nullptr,
                                 const TopicAnnotator* topic = nullptr);

struct IngestOptions {
  std::size_t top_sources = kFullScaleTopSources;
  std::optional<int> window_days;  // unbounded by default at desk scale
  std::size_t cap = 500;
  std::optional<Timestamp> now;  // latest publication time when unset
  int histogram_bins = 20;
};

MediaDietDataset build_media_diet(const CultureId& culture, std::span<const MediaArticle> articles,
                                  const IngestOptions& options, Summarizer& summarizer);

// Per-culture jobs run in parallel; `summarizer` must be thread-safe.
std::map<CultureId, MediaDietDataset> build_media_diets(std::span<const MediaArticle> articles,
                                                        const std::vector<CultureId>& cultures,
                                                        const IngestOptions& options,
                                                        Summarizer& summarizer);

std::vector<MediaArticle> load_articles(const std::filesystem::path& path);
void save_articles(const std::filesystem::path& path, std::span<const MediaArticle> articles);

// Pairs as JSON lines plus a "<path>.diagnostics.json" sidecar.
void save_media_diet(const std::filesystem::path& path, const MediaDietDataset& dataset);
MediaDietDataset load_media_diet(const std::filesystem::path& path);
std::filesystem::path diagnostics_path(const std::filesystem::path& diet_path);

}  // namespace culturemod::ingestion
