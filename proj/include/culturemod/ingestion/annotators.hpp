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
#include <string>
#include <string_view>
#include <vector>

namespace culturemod::ingestion {

class SentimentAnnotator {
 public:
  virtual ~SentimentAnnotator() = default;
  // Score in [-1, 1].
  virtual double score(std::string_view text) const = 0;
};

class TopicAnnotator {
 public:
  virtual ~TopicAnnotator() = default;
  virtual std::string classify(std::string_view text) const = 0;
};

// (positive - negative) / (positive + negative) over a small word lexicon.
class LexiconSentiment final : public SentimentAnnotator {
 public:
  LexiconSentiment();
  double score(std::string_view text) const override;

 private:
  std::map<std::string, int, std::less<>> polarity_;
};

// Topic with the most keyword hits; "general" when nothing matches.
class KeywordTopics final : public TopicAnnotator {
 public:
  KeywordTopics();
  explicit KeywordTopics(std::map<std::string, std::vector<std::string>> keywords);
  std::string classify(std::string_view text) const override;

 private:
  std::map<std::string, std::string, std::less<>> word_to_topic_;
};

}  // namespace culturemod::ingestion
