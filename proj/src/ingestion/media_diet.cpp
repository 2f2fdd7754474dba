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


#include "culturemod/ingestion/media_diet.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <future>
#include <set>

#include "culturemod/core/error.hpp"
#include "culturemod/core/io.hpp"
#include "culturemod/core/text.hpp"
#include "culturemod/ingestion/annotators.hpp"
#include "culturemod/ingestion/summarizer.hpp"

namespace culturemod::ingestion {

using nlohmann::json;

void MediaArticle::validate() const {
  if (id.empty()) throw Error(ErrorKind::invalid_argument, "article without id");
  if (culture.empty()) throw Error(ErrorKind::invalid_argument, "article " + id + " has no culture");
  if (text::trim(body).empty()) {
    throw Error(ErrorKind::invalid_argument, "article " + id + " has an empty body");
  }
  if (!(social_score >= 0.0) || !std::isfinite(social_score)) {
    throw Error(ErrorKind::invalid_argument, "article " + id + " has a negative social score");
  }
  if (sentiment && (*sentiment < -1.0 || *sentiment > 1.0)) {
    throw Error(ErrorKind::invalid_argument, "article " + id + " sentiment outside [-1, 1]");
  }
}

json MediaArticle::to_json() const {
  json j = {{"id", id},
            {"culture", culture.code()},
            {"source_id", source_id},
            {"title", title},
            {"body", body},
            {"published_at", format_iso8601(published_at)},
            {"social_score", social_score}};
  if (sentiment) j["sentiment"] = *sentiment;
  if (topic) j["topic"] = *topic;
  return j;
}

MediaArticle MediaArticle::from_json(const json& j) {
  MediaArticle a;
  try {
    a.id = j.at("id").get<std::string>();
    a.culture = CultureId(j.at("culture").get<std::string>());
    a.source_id = j.at("source_id").get<std::string>();
    a.title = j.value("title", std::string());
    a.body = j.at("body").get<std::string>();
    a.published_at = parse_iso8601(j.at("published_at").get<std::string>());
    a.social_score = j.at("social_score").get<double>();
    if (j.contains("sentiment") && !j["sentiment"].is_null()) a.sentiment = j["sentiment"].get<double>();
    if (j.contains("topic") && !j["topic"].is_null()) a.topic = j["topic"].get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::invalid_argument, std::string("malformed article record: ") + e.what());
  }
  a.validate();
  return a;
}

json SummaryPair::to_json() const {
  return {{"article_id", article_id},
          {"article_text", article_text},
          {"summary_text", summary_text},
          {"summarizer_id", summarizer_id}};
}

SummaryPair SummaryPair::from_json(const json& j) {
  SummaryPair p;
  p.article_id = j.at("article_id").get<std::string>();
  p.article_text = j.at("article_text").get<std::string>();
  p.summary_text = j.at("summary_text").get<std::string>();
  p.summarizer_id = j.value("summarizer_id", std::string());
  return p;
}

json DietDiagnostics::to_json() const {
  return {{"article_count", article_count},
          {"histogram_range", {histogram_low, histogram_high}},
          {"sentiment_histogram", sentiment_histogram},
          {"topic_breakdown", topic_breakdown},
          {"source_count", source_count}};
}

DietDiagnostics DietDiagnostics::from_json(const json& j) {
  DietDiagnostics d;
  d.article_count = j.at("article_count").get<std::size_t>();
  const auto& range = j.at("histogram_range");
  d.histogram_low = range.at(0).get<double>();
  d.histogram_high = range.at(1).get<double>();
  d.sentiment_histogram = j.at("sentiment_histogram").get<std::vector<std::size_t>>();
  d.topic_breakdown = j.at("topic_breakdown").get<std::map<std::string, double>>();
  d.source_count = j.at("source_count").get<std::size_t>();
  return d;
}

std::vector<std::string> rank_sources(std::span<const MediaArticle> articles, std::size_t k,
                                      const PopularityMetric& metric) {
  if (k == 0) throw Error(ErrorKind::invalid_argument, "rank_sources needs k >= 1");
  if (articles.empty()) return {};
  const auto& culture = articles.front().culture;
  std::map<std::string, std::vector<const MediaArticle*>> by_source;
  for (const auto& a : articles) {
    if (a.culture != culture) {
      throw Error(ErrorKind::invalid_argument,
                  "rank_sources mixes cultures " + culture.code() + " and " + a.culture.code());
    }
    by_source[a.source_id].push_back(&a);
  }
  std::vector<std::pair<std::string, double>> scored;
  scored.reserve(by_source.size());
  for (const auto& [source, items] : by_source) {
    double value = 0.0;
    if (metric) {
      value = metric(std::span<const MediaArticle* const>(items));
    } else {
      for (const auto* a : items) value += a->social_score;
    }
    scored.emplace_back(source, value);
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& x, const auto& y) { return x.second > y.second; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < scored.size() && i < k; ++i) out.push_back(scored[i].first);
  return out;
}

std::vector<MediaArticle> curate_articles(std::span<const MediaArticle> articles, Timestamp now,
                                          std::optional<int> window_days, std::size_t cap,
                                          const std::vector<std::string>& allowed_sources) {
  if (cap == 0) throw Error(ErrorKind::invalid_argument, "curate_articles needs cap > 0");
  if (window_days && *window_days <= 0) {
    throw Error(ErrorKind::invalid_argument, "curate_articles needs window_days > 0");
  }
  const std::set<std::string, std::less<>> allowed(allowed_sources.begin(), allowed_sources.end());
  std::optional<Timestamp> earliest;
  if (window_days) earliest = now - std::chrono::days(*window_days);
  std::vector<MediaArticle> kept;
  for (const auto& a : articles) {
    if (!allowed.contains(a.source_id)) continue;
    if (a.published_at > now) continue;
    if (earliest && a.published_at < *earliest) continue;
    kept.push_back(a);
  }
  std::sort(kept.begin(), kept.end(), [](const MediaArticle& x, const MediaArticle& y) {
    if (x.social_score != y.social_score) return x.social_score > y.social_score;
    if (x.published_at != y.published_at) return x.published_at > y.published_at;
    return x.id < y.id;
  });
  if (kept.size() > cap) kept.resize(cap);
  return kept;
}

std::vector<SummaryPair> generate_summary_targets(std::span<const MediaArticle> articles,
                                                  Summarizer& summarizer) {
  std::vector<SummaryPair> pairs;
  pairs.reserve(articles.size());
  const auto summarizer_id = summarizer.id();
  for (const auto& a : articles) {
    std::string summary;
    try {
      summary = text::trim(summarizer.summarize(a));
    } catch (const Error& e) {
      throw Error(ErrorKind::retriable, "summarizer failed on article " + a.id + ": " + e.what());
    } catch (const std::exception& e) {
      throw Error(ErrorKind::retriable, "summarizer failed on article " + a.id + ": " + e.what());
    }
    if (summary.empty()) {
      spdlog::warn("dropping article {}: empty summary", a.id);
      continue;
    }
    if (text::token_count(summary) >= text::token_count(a.body)) {
      spdlog::warn("dropping article {}: summary is not shorter than the article", a.id);
      continue;
    }
    pairs.push_back({a.id, a.body, std::move(summary), summarizer_id});
  }
  return pairs;
}

DietDiagnostics diet_diagnostics(const MediaDietDataset& dataset, int bins,
                                 const SentimentAnnotator* sentiment,
                                 const TopicAnnotator* topic) {
  if (dataset.pairs.empty()) throw Error(ErrorKind::empty_input, "empty dataset");
  if (bins < 1) throw Error(ErrorKind::invalid_argument, "histogram needs at least one bin");
  const LexiconSentiment default_sentiment;
  const KeywordTopics default_topics;
  if (!sentiment) sentiment = &default_sentiment;
  if (!topic) topic = &default_topics;

  DietDiagnostics d;
  d.article_count = dataset.pairs.size();
  d.sentiment_histogram.assign(static_cast<std::size_t>(bins), 0);
  std::map<std::string, std::size_t> topic_counts;
  std::set<std::string> sources;
  const double width = (d.histogram_high - d.histogram_low) / bins;
  for (std::size_t i = 0; i < dataset.pairs.size(); ++i) {
    const auto& pair = dataset.pairs[i];
    const ArticleFacets* f = i < dataset.facets.size() ? &dataset.facets[i] : nullptr;
    const double s = f && f->sentiment ? *f->sentiment : sentiment->score(pair.article_text);
    const auto t = f && f->topic ? *f->topic : topic->classify(pair.article_text);
    auto bin = static_cast<long>(std::floor((std::clamp(s, -1.0, 1.0) - d.histogram_low) / width));
    bin = std::clamp(bin, 0L, static_cast<long>(bins - 1));
    ++d.sentiment_histogram[static_cast<std::size_t>(bin)];
    ++topic_counts[t];
    if (f) sources.insert(f->source_id);
  }
  for (const auto& [t, n] : topic_counts) {
    d.topic_breakdown[t] = 100.0 * static_cast<double>(n) / static_cast<double>(d.article_count);
  }
  d.source_count = sources.size();
  return d;
}

MediaDietDataset build_media_diet(const CultureId& culture, std::span<const MediaArticle> articles,
                                  const IngestOptions& options, Summarizer& summarizer) {
  std::vector<MediaArticle> own;
  for (const auto& a : articles) {
    if (a.culture == culture) own.push_back(a);
  }
  if (own.empty()) throw Error(ErrorKind::empty_input, "no articles for culture " + culture.code());
  Timestamp now = options.now.value_or(Timestamp{});
  if (!options.now) {
    for (const auto& a : own) now = std::max(now, a.published_at);
  }
  const auto sources = rank_sources(own, options.top_sources);
  const auto curated = curate_articles(own, now, options.window_days, options.cap, sources);
  std::map<std::string, const MediaArticle*> by_id;
  for (const auto& a : curated) by_id[a.id] = &a;

  MediaDietDataset ds;
  ds.culture = culture;
  ds.pairs = generate_summary_targets(curated, summarizer);
  for (const auto& p : ds.pairs) {
    const auto* a = by_id.at(p.article_id);
    ds.facets.push_back({a->source_id, a->sentiment, a->topic});
  }
  if (ds.pairs.empty()) {
    throw Error(ErrorKind::empty_input, "no summary pairs survived for culture " + culture.code());
  }
  ds.diagnostics = diet_diagnostics(ds, options.histogram_bins);
  spdlog::info("media diet {}: {} sources, {} curated, {} pairs", culture.code(), sources.size(),
               curated.size(), ds.pairs.size());
  return ds;
}

std::map<CultureId, MediaDietDataset> build_media_diets(std::span<const MediaArticle> articles,
                                                        const std::vector<CultureId>& cultures,
                                                        const IngestOptions& options,
                                                        Summarizer& summarizer) {
  std::vector<std::future<MediaDietDataset>> jobs;
  jobs.reserve(cultures.size());
  for (const auto& c : cultures) {
    jobs.push_back(std::async(std::launch::async, [&, c] {
      return build_media_diet(c, articles, options, summarizer);
    }));
  }
  std::map<CultureId, MediaDietDataset> out;
  for (std::size_t i = 0; i < cultures.size(); ++i) out.emplace(cultures[i], jobs[i].get());
  return out;
}

std::vector<MediaArticle> load_articles(const std::filesystem::path& path) {
  std::vector<MediaArticle> out;
  for (const auto& row : io::read_jsonl(path)) out.push_back(MediaArticle::from_json(row));
  return out;
}

void save_articles(const std::filesystem::path& path, std::span<const MediaArticle> articles) {
  std::vector<json> rows;
  rows.reserve(articles.size());
  for (const auto& a : articles) rows.push_back(a.to_json());
  io::write_jsonl(path, rows);
}

std::filesystem::path diagnostics_path(const std::filesystem::path& diet_path) {
  auto p = diet_path;
  p += ".diagnostics.json";
  return p;
}

void save_media_diet(const std::filesystem::path& path, const MediaDietDataset& dataset) {
  std::vector<json> rows;
  rows.reserve(dataset.pairs.size());
  for (std::size_t i = 0; i < dataset.pairs.size(); ++i) {
    auto row = dataset.pairs[i].to_json();
    row["culture"] = dataset.culture.code();
    if (i < dataset.facets.size()) {
      const auto& f = dataset.facets[i];
      row["source_id"] = f.source_id;
      if (f.sentiment) row["sentiment"] = *f.sentiment;
      if (f.topic) row["topic"] = *f.topic;
    }
    rows.push_back(std::move(row));
  }
  io::write_jsonl(path, rows);
  io::write_json(diagnostics_path(path), dataset.diagnostics.to_json());
}

MediaDietDataset load_media_diet(const std::filesystem::path& path) {
  MediaDietDataset ds;
  for (const auto& row : io::read_jsonl(path)) {
    const CultureId c(row.at("culture").get<std::string>());
    if (ds.culture.empty()) ds.culture = c;
    if (c != ds.culture) {
      throw Error(ErrorKind::invalid_argument, path.string() + " mixes cultures");
    }
    ds.pairs.push_back(SummaryPair::from_json(row));
    ArticleFacets f;
    f.source_id = row.value("source_id", std::string());
    if (row.contains("sentiment")) f.sentiment = row["sentiment"].get<double>();
    if (row.contains("topic")) f.topic = row["topic"].get<std::string>();
    ds.facets.push_back(std::move(f));
  }
  if (ds.pairs.empty()) throw Error(ErrorKind::empty_input, "empty dataset: " + path.string());
  const auto diag = diagnostics_path(path);
  ds.diagnostics = std::filesystem::exists(diag) ? DietDiagnostics::from_json(io::read_json(diag))
                                                 : diet_diagnostics(ds);
  return ds;
}

}  // namespace culturemod::ingestion
