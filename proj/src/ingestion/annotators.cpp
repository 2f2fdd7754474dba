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


#include "culturemod/ingestion/annotators.hpp"

#include "culturemod/core/text.hpp"

namespace culturemod::ingestion {

LexiconSentiment::LexiconSentiment() {
  static const char* positive[] = {
      "good", "great", "win", "wins", "won", "success", "happy", "celebrate", "celebrates",
      "growth", "record", "best", "strong", "hope", "support", "praise", "boost", "gain",
      "gains", "love", "safe", "peace", "improve", "improves", "improved", "rise", "thrive"};
  static const char* negative[] = {
      "bad", "loss", "lose", "lost", "crisis", "attack", "attacks", "war", "death", "dead",
      "crash", "fear", "fail", "fails", "failed", "damage", "protest", "fraud", "violence",
      "weak", "decline", "falls", "fell", "worst", "angry", "threat", "risk", "scandal"};
  for (const char* w : positive) polarity_.emplace(w, 1);
  for (const char* w : negative) polarity_.emplace(w, -1);
}

double LexiconSentiment::score(std::string_view input) const {
  int pos = 0;
  int neg = 0;
  for (const auto& tok : text::alnum_tokens(input)) {
    const auto it = polarity_.find(tok);
    if (it == polarity_.end()) continue;
    (it->second > 0 ? pos : neg) += 1;
  }
  if (pos + neg == 0) return 0.0;
  return static_cast<double>(pos - neg) / static_cast<double>(pos + neg);
}

namespace {

std::map<std::string, std::vector<std::string>> default_keywords() {
  return {
      {"business", {"market", "markets", "economy", "bank", "shares", "trade", "profit", "company"}},
      {"entertainment", {"film", "music", "celebrity", "show", "album", "festival", "star"}},
      {"health", {"health", "hospital", "vaccine", "doctor", "virus", "medical", "disease"}},
      {"politics", {"election", "minister", "government", "parliament", "vote", "policy", "party"}},
      {"sports", {"match", "team", "league", "cup", "coach", "season", "goal", "cricket", "football"}},
      {"technology", {"tech", "software", "app", "ai", "digital", "internet", "phone", "data"}},
  };
}

}  // namespace

KeywordTopics::KeywordTopics() : KeywordTopics(default_keywords()) {}

KeywordTopics::KeywordTopics(std::map<std::string, std::vector<std::string>> keywords) {
  for (const auto& [topic, words] : keywords) {
    for (const auto& w : words) word_to_topic_.emplace(text::to_lower(w), topic);
  }
}

std::string KeywordTopics::classify(std::string_view input) const {
  std::map<std::string, int> hits;
  for (const auto& tok : text::alnum_tokens(input)) {
    const auto it = word_to_topic_.find(tok);
    if (it != word_to_topic_.end()) ++hits[it->second];
  }
  std::string best = "general";
  int best_hits = 0;
  for (const auto& [topic, n] : hits) {
    if (n > best_hits) {
      best = topic;
      best_hits = n;
    }
  }
  return best;
}

}  // namespace culturemod::ingestion
