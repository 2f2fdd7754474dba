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

#include <filesystem>
#include <map>
#include <memory>
#include <string>

#include "culturemod/core/text_generator.hpp"
#include "culturemod/ingestion/media_diet.hpp"

namespace culturemod::ingestion {

class Summarizer {
 public:
  virtual ~Summarizer() = default;
  virtual std::string id() const = 0;
  virtual std::string summarize(const MediaArticle& article) = 0;
};

class FirstSentenceSummarizer final : public Summarizer {
 public:
  std::string id() const override { return "first-sentence"; }
  std::string summarize(const MediaArticle& article) override;
};

// Extractive: the first `n` whitespace tokens of the body.
class LeadTokensSummarizer final : public Summarizer {
 public:
  explicit LeadTokensSummarizer(std::size_t n) : n_(n) {}
  std::string id() const override { return "lead-" + std::to_string(n_); }
  std::string summarize(const MediaArticle& article) override;

 private:
  std::size_t n_;
};

// Abstractive summaries from a text-generation backend.
class GeneratorSummarizer final : public Summarizer {
 public:
  explicit GeneratorSummarizer(std::unique_ptr<llm::TextGenerator> generator, int max_retries = 2);
  std::string id() const override { return "llm:" + generator_->id(); }
  std::string summarize(const MediaArticle& article) override;

 private:
  std::unique_ptr<llm::TextGenerator> generator_;
  int max_retries_;
};

// Looks summaries up by article id, e.g. vendor-supplied abstracts.
class ReferenceSummarizer final : public Summarizer {
 public:
  explicit ReferenceSummarizer(std::map<std::string, std::string> summaries, std::string source = "table");
  // JSON lines with "article_id" and "summary".
  static ReferenceSummarizer load(const std::filesystem::path& path);
  std::string id() const override { return "reference:" + source_; }
  // Unknown ids yield an empty summary.
  std::string summarize(const MediaArticle& article) override;

 private:
  std::map<std::string, std::string> summaries_;
  std::string source_;
};

// "first-sentence", "lead-N", "reference:<jsonl path>" or
// "llm:<generator backend>".
std::unique_ptr<Summarizer> make_summarizer(const std::string& backend_id);

}  // namespace culturemod::ingestion
