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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "culturemod/core/culture.hpp"
#include "culturemod/core/timestamp.hpp"
#include "culturemod/dataset/moderation_dataset.hpp"
#include "culturemod/ingestion/media_diet.hpp"

// Synthetic regional corpora standing in for proprietary news and moderation
// data. Each culture gets its own place names, topic words and slang; slang
// terms split into harmful and benign senses that only the culture's own
// articles explain.
namespace culturemod::synthetic {

struct WorldOptions {
  int places = 12;
  int topic_nouns = 30;
  int topic_verbs = 15;
  int harm_slang = 150;
  int benign_slang = 150;
  int sources = 20;
};

struct CultureWorld {
  CultureId culture;
  std::vector<std::string> places;
  std::vector<std::string> nouns;
  std::vector<std::string> verbs;
  std::vector<std::string> harm_slang;
  std::vector<std::string> benign_slang;
  std::vector<std::string> sources;
};

// Vocabularies are pairwise disjoint across the returned worlds.
std::vector<CultureWorld> make_worlds(const std::vector<CultureId>& cultures, std::uint64_t seed,
                                      const WorldOptions& options = {});

struct SyntheticArticle {
  ingestion::MediaArticle article;
  std::string summary;  // reference summary glossing any slang
};

std::vector<SyntheticArticle> generate_articles(const CultureWorld& world, int count,
                                                std::uint64_t seed, Timestamp start);

struct EventMix {
  int flagged = 100;
  int fyi = 20;
  int no_action = 120;
};

// Flagged events quote a harmful slang phrase; FYI and no-action events use
// benign slang in the same filler.
std::vector<dataset::RawModerationEvent> generate_events(const CultureWorld& world, const EventMix& mix,
                                                         std::uint64_t seed);

struct CorpusOptions {
  std::vector<CultureId> cultures;
  int articles_per_culture = 300;
  EventMix events;
  WorldOptions world;
  std::uint64_t seed = 0;
};

// Writes articles.jsonl, summaries.jsonl (for the "reference:" summarizer)
// and events.jsonl into `dir`.
void write_corpus(const std::filesystem::path& dir, const CorpusOptions& options);

}  // namespace culturemod::synthetic
