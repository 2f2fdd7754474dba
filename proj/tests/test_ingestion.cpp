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


#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <map>
#include <numeric>

#include "culturemod/core/error.hpp"
#include "culturemod/core/random.hpp"
#include "culturemod/core/text.hpp"
#include "culturemod/ingestion/annotators.hpp"
#include "culturemod/ingestion/media_diet.hpp"
#include "culturemod/ingestion/summarizer.hpp"

using namespace culturemod;
using namespace culturemod::ingestion;
namespace fs = std::filesystem;

namespace {

const Timestamp kNow = parse_iso8601("2024-06-30T00:00:00Z");

MediaArticle article(std::string id, std::string source, double score, int days_ago = 0,
                     std::string body = "Body sentence one. Body sentence two is longer.") {
  MediaArticle a;
  a.id = std::move(id);
  a.culture = CultureId("US");
  a.source_id = std::move(source);
  a.title = "t";
  a.body = std::move(body);
  a.published_at = kNow - std::chrono::days(days_ago);
  a.social_score = score;
  return a;
}

}  // namespace

TEST_CASE("rank_sources: single dominant source") {
  std::vector<MediaArticle> a = {article("1", "A", 5), article("2", "A", 5), article("3", "B", 20)};
  CHECK(rank_sources(a, 1) == std::vector<std::string>{"B"});
}

TEST_CASE("rank_sources: ties break by source id, matching a brute-force sum and sort") {
  std::vector<MediaArticle> a = {article("1", "C", 3), article("2", "B", 4), article("3", "A", 10),
                                 article("4", "B", 6)};
  CHECK(rank_sources(a, 2) == std::vector<std::string>{"A", "B"});

  auto rng = make_rng(5);
  std::vector<MediaArticle> many;
  for (int i = 0; i < 300; ++i) {
    many.push_back(article(std::to_string(i), "s" + std::to_string(uniform_index(rng, 25)),
                           static_cast<double>(uniform_index(rng, 7))));
  }
  std::map<std::string, double> sums;
  for (const auto& x : many) sums[x.source_id] += x.social_score;
  std::vector<std::pair<std::string, double>> oracle(sums.begin(), sums.end());
  std::sort(oracle.begin(), oracle.end(), [](const auto& l, const auto& r) {
    return l.second != r.second ? l.second > r.second : l.first < r.first;
  });
  const auto got = rank_sources(many, 10);
  REQUIRE(got.size() == 10);
  for (std::size_t i = 0; i < 10; ++i) CHECK(got[i] == oracle[i].first);
}

TEST_CASE("rank_sources edge cases and prefix property") {
  CHECK(rank_sources(std::vector<MediaArticle>{}, 3).empty());
  std::vector<MediaArticle> a = {article("1", "A", 1), article("2", "B", 2)};
  CHECK(rank_sources(a, 50).size() == 2);
  CHECK_THROWS_AS(rank_sources(a, 0), Error);
  auto mixed = a;
  mixed[1].culture = CultureId("AU");
  CHECK_THROWS_AS(rank_sources(mixed, 1), Error);

  auto rng = make_rng(11);
  std::vector<MediaArticle> many;
  for (int i = 0; i < 200; ++i) {
    many.push_back(article(std::to_string(i), "s" + std::to_string(uniform_index(rng, 30)),
                           static_cast<double>(uniform_index(rng, 5))));
  }
  for (std::size_t k = 1; k < 30; ++k) {
    const auto shorter = rank_sources(many, k);
    const auto longer = rank_sources(many, k + 1);
    CHECK(std::equal(shorter.begin(), shorter.end(), longer.begin()));
  }
}

TEST_CASE("rank_sources with a custom popularity metric") {
  std::vector<MediaArticle> a = {article("1", "A", 1), article("2", "A", 1), article("3", "B", 50)};
  const PopularityMetric count = [](std::span<const MediaArticle* const> xs) { return double(xs.size()); };
  CHECK(rank_sources(a, 1, count) == std::vector<std::string>{"A"});
}

TEST_CASE("curate_articles: full-scale constants") {
  CHECK(kFullScaleWindowDays == 30);
  CHECK(kFullScaleArticleCap == 50000);
  CHECK(kFullScaleTopSources == 50);
}

TEST_CASE("curate_articles: cap not binding") {
  std::vector<MediaArticle> a = {article("only", "A", 3, 1)};
  const auto out = curate_articles(a, kNow, 30, 10, {"A"});
  REQUIRE(out.size() == 1);
  CHECK(out[0].id == "only");
}

TEST_CASE("curate_articles matches an exhaustive filter and sort on 120 articles") {
  auto rng = make_rng(21);
  std::vector<MediaArticle> a;
  for (int i = 0; i < 120; ++i) {
    const int age = i < 40 ? 31 + static_cast<int>(uniform_index(rng, 20)) : static_cast<int>(uniform_index(rng, 30));
    a.push_back(article("a" + std::to_string(i), i % 2 ? "A" : "B", static_cast<double>(uniform_index(rng, 40)), age));
  }
  std::shuffle(a.begin(), a.end(), std::mt19937(3));
  const auto out = curate_articles(a, kNow, 30, 50, {"A", "B"});

  std::vector<MediaArticle> oracle;
  for (const auto& x : a) {
    if (x.published_at >= kNow - std::chrono::days(30) && x.published_at <= kNow) oracle.push_back(x);
  }
  CHECK(oracle.size() == 80);
  std::sort(oracle.begin(), oracle.end(), [](const MediaArticle& l, const MediaArticle& r) {
    if (l.social_score != r.social_score) return l.social_score > r.social_score;
    if (l.published_at != r.published_at) return l.published_at > r.published_at;
    return l.id < r.id;
  });
  oracle.resize(50);
  REQUIRE(out.size() == 50);
  for (std::size_t i = 0; i < 50; ++i) CHECK(out[i].id == oracle[i].id);
  for (std::size_t i = 1; i < out.size(); ++i) CHECK(out[i - 1].social_score >= out[i].social_score);
}

TEST_CASE("curate_articles drops disallowed sources") {
  std::vector<MediaArticle> a = {article("1", "A", 5), article("2", "B", 9)};
  const auto out = curate_articles(a, kNow, std::nullopt, 10, {"A"});
  REQUIRE(out.size() == 1);
  CHECK(out[0].source_id == "A");
}

TEST_CASE("generate_summary_targets with the first-sentence stub") {
  std::vector<MediaArticle> a = {article("1", "A", 1)};
  FirstSentenceSummarizer s;
  const auto pairs = generate_summary_targets(a, s);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].summary_text == "Body sentence one.");
  CHECK(pairs[0].summarizer_id == "first-sentence");
}

TEST_CASE("lead-N summaries are string prefixes of their articles") {
  std::vector<MediaArticle> a;
  for (int i = 0; i < 10; ++i) {
    std::string body;
    for (int w = 0; w < 12 + i; ++w) body += "w" + std::to_string(i) + "_" + std::to_string(w) + " ";
    a.push_back(article(std::to_string(i), "A", 1, 0, body));
  }
  LeadTokensSummarizer s(8);
  const auto pairs = generate_summary_targets(a, s);
  REQUIRE(pairs.size() == 10);
  for (const auto& p : pairs) {
    CHECK(p.article_text.rfind(p.summary_text, 0) == 0);
    CHECK(text::token_count(p.summary_text) < text::token_count(p.article_text));
  }
}

TEST_CASE("generate_summary_targets drops empty and non-shortening summaries") {
  std::vector<MediaArticle> a = {article("short", "A", 1, 0, "Tiny."), article("ok", "A", 1)};
  FirstSentenceSummarizer s;
  const auto pairs = generate_summary_targets(a, s);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].article_id == "ok");
}

TEST_CASE("summarizer failures are retriable errors naming the article") {
  struct Broken final : Summarizer {
    std::string id() const override { return "broken"; }
    std::string summarize(const MediaArticle&) override { throw std::runtime_error("down"); }
  };
  std::vector<MediaArticle> a = {article("art-7", "A", 1)};
  Broken b;
  try {
    generate_summary_targets(a, b);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::retriable);
    CHECK(std::string(e.what()).find("art-7") != std::string::npos);
  }
}

TEST_CASE("reference summarizer looks summaries up by article id") {
  ReferenceSummarizer r({{"1", "Short."}}, "fixture");
  CHECK(r.summarize(article("1", "A", 1)) == "Short.");
  CHECK(r.summarize(article("2", "A", 1)).empty());
  CHECK(r.id() == "reference:fixture");
  CHECK(make_summarizer("lead-5")->id() == "lead-5");
  CHECK(make_summarizer("first-sentence")->id() == "first-sentence");
  CHECK_THROWS_AS(make_summarizer("nope"), Error);
}

TEST_CASE("diet_diagnostics: single topic and article count") {
  MediaDietDataset ds;
  ds.culture = CultureId("US");
  for (int i = 0; i < 4; ++i) {
    ds.pairs.push_back({std::to_string(i), "text", "t", "x"});
    ds.facets.push_back({"A", 0.0, std::string("news")});
  }
  const auto d = diet_diagnostics(ds);
  CHECK(d.article_count == 4);
  CHECK(d.topic_breakdown.size() == 1);
  CHECK(d.topic_breakdown.at("news") == doctest::Approx(100.0));
  CHECK(d.sentiment_histogram.size() == 20);
}

TEST_CASE("diet_diagnostics histogram equals hand-binned counts") {
  // 20 bins of width 0.1 over [-1, 1]; 1.0 falls in the last bin.
  const std::vector<double> s = {-1.0, -0.95, -0.55, -0.25, -0.05, 0.05, 0.05, 0.15, 0.45, 0.65, 0.95, 1.0};
  std::vector<std::size_t> expected(20, 0);
  for (int b : {0, 0, 4, 7, 9, 10, 10, 11, 14, 16, 19, 19}) ++expected[static_cast<std::size_t>(b)];
  MediaDietDataset ds;
  const char* topics[] = {"sports", "politics", "health"};
  for (std::size_t i = 0; i < s.size(); ++i) {
    ds.pairs.push_back({std::to_string(i), "text", "t", "x"});
    ds.facets.push_back({"S" + std::to_string(i % 5), s[i], std::string(topics[i % 3])});
  }
  const auto d = diet_diagnostics(ds);
  CHECK(d.sentiment_histogram == expected);
  CHECK(d.source_count == 5);
  double total = 0.0;
  for (const auto& [t, pct] : d.topic_breakdown) total += pct;
  CHECK(total == doctest::Approx(100.0).epsilon(1e-3));

  // Input order does not matter.
  MediaDietDataset rev = ds;
  std::reverse(rev.pairs.begin(), rev.pairs.end());
  std::reverse(rev.facets.begin(), rev.facets.end());
  const auto d2 = diet_diagnostics(rev);
  CHECK(d2.sentiment_histogram == d.sentiment_histogram);
  CHECK(d2.topic_breakdown == d.topic_breakdown);
}

TEST_CASE("diet_diagnostics rejects an empty dataset") {
  MediaDietDataset ds;
  try {
    diet_diagnostics(ds);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()) == "empty dataset");
  }
}

TEST_CASE("default annotators") {
  LexiconSentiment lex;
  CHECK(lex.score("") == 0.0);
  CHECK(lex.score("great wonderful win") > 0.0);
  CHECK(lex.score("terrible awful crisis") < 0.0);
  const double v = lex.score("good bad good");
  CHECK(v >= -1.0);
  CHECK(v <= 1.0);
  KeywordTopics kw;
  CHECK(kw.classify("the election and the senate vote") == "politics");
  CHECK(kw.classify("zzz qqq") == "general");
}

TEST_CASE("build_media_diet keeps one culture, respects the cap, and round-trips") {
  std::vector<MediaArticle> a;
  for (int i = 0; i < 30; ++i) a.push_back(article("u" + std::to_string(i), "S" + std::to_string(i % 4), i, i));
  auto other = article("au", "Z", 100);
  other.culture = CultureId("AU");
  a.push_back(other);
  IngestOptions opts;
  opts.cap = 12;
  FirstSentenceSummarizer s;
  const auto ds = build_media_diet(CultureId("US"), a, opts, s);
  CHECK(ds.culture == CultureId("US"));
  CHECK(ds.pairs.size() == 12);
  CHECK(ds.diagnostics.article_count == 12);
  std::size_t hist = 0;
  for (auto n : ds.diagnostics.sentiment_histogram) hist += n;
  CHECK(hist == 12);

  const auto p = fs::temp_directory_path() / "culturemod_diet.jsonl";
  save_media_diet(p, ds);
  CHECK(fs::exists(diagnostics_path(p)));
  const auto back = load_media_diet(p);
  REQUIRE(back.pairs.size() == ds.pairs.size());
  for (std::size_t i = 0; i < ds.pairs.size(); ++i) {
    CHECK(back.pairs[i].article_id == ds.pairs[i].article_id);
    CHECK(back.pairs[i].summary_text == ds.pairs[i].summary_text);
  }
  CHECK(back.diagnostics.sentiment_histogram == ds.diagnostics.sentiment_histogram);
  fs::remove(p);
  fs::remove(diagnostics_path(p));

  const auto maps = build_media_diets(a, {CultureId("US"), CultureId("AU")}, opts, s);
  CHECK(maps.at(CultureId("US")).pairs.size() == 12);
  CHECK(maps.at(CultureId("AU")).pairs.size() == 1);
}

TEST_CASE("article validation and JSON round trip") {
  auto a = article("1", "A", 2);
  a.sentiment = 0.5;
  a.topic = "sports";
  const auto b = MediaArticle::from_json(a.to_json());
  CHECK(b.id == a.id);
  CHECK(b.published_at == a.published_at);
  CHECK(b.sentiment == a.sentiment);
  auto bad = a;
  bad.social_score = -1;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = a;
  bad.body = "";
  CHECK_THROWS_AS(bad.validate(), Error);
}
