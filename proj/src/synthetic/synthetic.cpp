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


#include "culturemod/synthetic/synthetic.hpp"

#include <set>

#include "culturemod/core/error.hpp"
#include "culturemod/core/io.hpp"
#include "culturemod/core/random.hpp"

namespace culturemod::synthetic {

namespace {

const std::vector<std::string>& filler() {
  static const std::vector<std::string> words = {
      "the",  "a",     "and",    "then",   "they",  "we",    "you",   "so",     "just", "really",
      "like", "that",  "this",   "was",    "is",    "were",  "know",  "think",  "said", "there",
      "what", "about", "people", "right",  "well",  "yeah",  "going", "mate",   "all",  "some",
      "here", "now",   "out",    "back",   "again", "maybe", "very",  "little", "big",  "time",
      "last", "night", "week",   "around", "over",  "every", "one",   "two"};
  return words;
}

const std::vector<std::string>& boundaries() {
  static const std::vector<std::string> b = {"Hate Content", "Inciting Harm", "Harassment"};
  return b;
}

const std::vector<std::string>& harm_rationales() {
  static const std::vector<std::string> r = {
      "speaker threatens violence against a group",
      "host encourages listeners to hurt people",
      "guest calls for an attack on neighbours",
      "speaker uses a slur to demean a community"};
  return r;
}

template <class T>
const T& pick(const std::vector<T>& v, Rng& rng) {
  return v[uniform_index(rng, v.size())];
}

std::string pseudo_word(Rng& rng) {
  static const char* onsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t",
                                 "v", "z", "br", "dr", "gl", "kr", "pl", "st", "tr", "sh", "ch", "th"};
  static const char* vowels[] = {"a", "e", "i", "o", "u", "ai", "ou", "ee", "oo"};
  static const char* codas[] = {"", "", "", "n", "k", "r", "s", "m", "x", "t"};
  const int syllables = 2 + static_cast<int>(uniform_index(rng, 2));
  std::string w;
  for (int s = 0; s < syllables; ++s) {
    w += onsets[uniform_index(rng, std::size(onsets))];
    w += vowels[uniform_index(rng, std::size(vowels))];
  }
  w += codas[uniform_index(rng, std::size(codas))];
  return w;
}

std::vector<std::string> fresh_words(int n, Rng& rng, std::set<std::string>& used) {
  std::vector<std::string> out;
  while (static_cast<int>(out.size()) < n) {
    auto w = pseudo_word(rng);
    if (used.insert(w).second) out.push_back(std::move(w));
  }
  return out;
}

std::string sentence(std::vector<std::string> words) {
  std::string s;
  for (const auto& w : words) {
    if (!s.empty()) s += ' ';
    s += w;
  }
  return s;
}

// A short quoted phrase around one slang term.
std::string slang_phrase(const std::string& slang, Rng& rng) {
  const int len = 5 + static_cast<int>(uniform_index(rng, 5));
  const int at = static_cast<int>(uniform_index(rng, 3));
  std::vector<std::string> words;
  for (int i = 0; i < len; ++i) words.push_back(i == at ? slang : pick(filler(), rng));
  return sentence(words);
}

}  // namespace

std::vector<CultureWorld> make_worlds(const std::vector<CultureId>& cultures, std::uint64_t seed,
                                      const WorldOptions& options) {
  std::set<std::string> used(filler().begin(), filler().end());
  for (const char* w : {"violent", "threat", "friendly", "gathering", "in", "of", "news", "report"}) {
    used.insert(w);
  }
  auto rng = make_rng(seed, 0x5eed);
  std::vector<CultureWorld> worlds;
  for (const auto& c : cultures) {
    CultureWorld w;
    w.culture = c;
    w.places = fresh_words(options.places, rng, used);
    w.nouns = fresh_words(options.topic_nouns, rng, used);
    w.verbs = fresh_words(options.topic_verbs, rng, used);
    w.harm_slang = fresh_words(options.harm_slang, rng, used);
    w.benign_slang = fresh_words(options.benign_slang, rng, used);
    for (int s = 0; s < options.sources; ++s) {
      w.sources.push_back(c.code() + "-source-" + std::to_string(s));
    }
    worlds.push_back(std::move(w));
  }
  return worlds;
}

std::vector<SyntheticArticle> generate_articles(const CultureWorld& world, int count,
                                                std::uint64_t seed, Timestamp start) {
  auto rng = make_rng(seed, stable_hash(world.culture.code()));
  std::vector<SyntheticArticle> out;
  for (int i = 0; i < count; ++i) {
    const auto& place = pick(world.places, rng);
    const auto& noun = pick(world.nouns, rng);
    const auto& verb = pick(world.verbs, rng);
    const auto& object = pick(world.nouns, rng);
    const bool harmful = uniform_index(rng, 2) == 0;
    const auto& slang = harmful ? pick(world.harm_slang, rng) : pick(world.benign_slang, rng);

    std::vector<std::string> body = {place, noun, verb, "the", object, "."};
    for (int k = 0; k < 3; ++k) body.push_back(pick(filler(), rng));
    body.insert(body.end(), {"a", slang, "near", "the", pick(world.nouns, rng)});
    for (int k = 0; k < 4; ++k) body.push_back(pick(filler(), rng));
    body.push_back(".");
    for (int k = 0; k < 5; ++k) body.push_back(pick(filler(), rng));
    body.insert(body.end(), {place, "."});

    SyntheticArticle a;
    a.article.id = world.culture.code() + "-a" + std::to_string(i);
    a.article.culture = world.culture;
    a.article.source_id = pick(world.sources, rng);
    a.article.title = place + " " + noun;
    a.article.body = sentence(body);
    a.article.published_at = start + std::chrono::hours(static_cast<long>(i));
    a.article.social_score = 1.0 + static_cast<double>(uniform_index(rng, 1000));
    a.summary = sentence({place, noun, verb, object, ";", harmful ? "violent threat" : "friendly gathering"});
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<dataset::RawModerationEvent> generate_events(const CultureWorld& world, const EventMix& mix,
                                                         std::uint64_t seed) {
  auto rng = make_rng(seed, stable_hash(world.culture.code()) ^ 0xe7e7);
  std::vector<dataset::RawModerationEvent> out;
  const std::string prefix = world.culture.code() + "-e";
  auto filler_run = [&](int n) {
    std::vector<std::string> w;
    for (int i = 0; i < n; ++i) w.push_back(pick(filler(), rng));
    return sentence(w);
  };
  int id = 0;
  for (int i = 0; i < mix.flagged; ++i) {
    const auto phrase = slang_phrase(pick(world.harm_slang, rng), rng);
    dataset::RawModerationEvent e;
    e.event_id = prefix + std::to_string(id++);
    e.snippet = filler_run(6) + " " + phrase + " " + filler_run(10);
    e.risk_score = 0.5 + 0.5 * uniform_unit(rng);
    e.moderator_action = dataset::ModeratorAction::flagged;
    e.highlights_freeform = "host says \"" + phrase + "\" on air";
    e.rationale_freeform = pick(harm_rationales(), rng);
    e.boundary = pick(boundaries(), rng);
    e.origin_culture = world.culture;
    out.push_back(std::move(e));
  }
  for (int i = 0; i < mix.fyi; ++i) {
    const auto phrase = slang_phrase(pick(world.benign_slang, rng), rng);
    dataset::RawModerationEvent e;
    e.event_id = prefix + std::to_string(id++);
    e.snippet = filler_run(6) + " " + phrase + " " + filler_run(10);
    e.risk_score = 0.3 + 0.5 * uniform_unit(rng);
    e.moderator_action = dataset::ModeratorAction::flagged;
    e.fyi = true;
    e.highlights_freeform = "fyi, local term \"" + phrase + "\"";
    e.rationale_freeform = "local slang that may read as hostile elsewhere";
    e.boundary = pick(boundaries(), rng);
    e.origin_culture = world.culture;
    out.push_back(std::move(e));
  }
  for (int i = 0; i < mix.no_action; ++i) {
    const auto phrase = slang_phrase(pick(world.benign_slang, rng), rng);
    dataset::RawModerationEvent e;
    e.event_id = prefix + std::to_string(id++);
    e.snippet = phrase + " " + filler_run(16);
    e.risk_score = 0.6 * uniform_unit(rng);
    e.moderator_action = dataset::ModeratorAction::no_action;
    e.boundary = pick(boundaries(), rng);
    e.origin_culture = world.culture;
    out.push_back(std::move(e));
  }
  return out;
}

void write_corpus(const std::filesystem::path& dir, const CorpusOptions& options) {
  if (options.cultures.empty()) throw Error(ErrorKind::invalid_argument, "synthetic corpus needs cultures");
  std::filesystem::create_directories(dir);
  const auto worlds = make_worlds(options.cultures, options.seed, options.world);
  std::vector<ingestion::MediaArticle> articles;
  std::vector<nlohmann::json> summaries;
  std::vector<dataset::RawModerationEvent> events;
  const Timestamp start = parse_iso8601("2024-01-01T00:00:00Z");
  for (const auto& w : worlds) {
    for (auto& a : generate_articles(w, options.articles_per_culture, options.seed, start)) {
      summaries.push_back({{"article_id", a.article.id}, {"summary", a.summary}});
      articles.push_back(std::move(a.article));
    }
    auto ev = generate_events(w, options.events, options.seed);
    events.insert(events.end(), ev.begin(), ev.end());
  }
  ingestion::save_articles(dir / "articles.jsonl", articles);
  io::write_jsonl(dir / "summaries.jsonl", summaries);
  dataset::save_events(dir / "events.jsonl", events);
}

}  // namespace culturemod::synthetic
