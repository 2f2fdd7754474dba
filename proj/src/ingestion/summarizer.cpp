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


#include "culturemod/ingestion/summarizer.hpp"

#include "culturemod/core/error.hpp"
#include "culturemod/core/io.hpp"
#include "culturemod/core/text.hpp"

namespace culturemod::ingestion {

std::string FirstSentenceSummarizer::summarize(const MediaArticle& article) {
  return text::first_sentence(article.body);
}

std::string LeadTokensSummarizer::summarize(const MediaArticle& article) {
  return std::string(text::token_prefix(article.body, n_));
}

GeneratorSummarizer::GeneratorSummarizer(std::unique_ptr<llm::TextGenerator> generator,
                                         int max_retries)
    : generator_(std::move(generator)), max_retries_(max_retries) {
  if (!generator_) throw Error(ErrorKind::configuration, "summarizer needs a text generator");
}

std::string GeneratorSummarizer::summarize(const MediaArticle& article) {
  llm::ChatPrompt prompt;
  prompt.system = "You summarise news articles in one or two sentences.";
  prompt.user = "Summarise the following article.\n\nTitle: " + article.title + "\n\n" + article.body;
  prompt.bindings = {{"title", article.title}, {"content", article.body}};
  return text::trim(llm::generate_with_retry(*generator_, prompt, max_retries_));
}

ReferenceSummarizer::ReferenceSummarizer(std::map<std::string, std::string> summaries, std::string source)
    : summaries_(std::move(summaries)), source_(std::move(source)) {}

ReferenceSummarizer ReferenceSummarizer::load(const std::filesystem::path& path) {
  std::map<std::string, std::string> table;
  for (const auto& row : io::read_jsonl(path)) {
    table[row.at("article_id").get<std::string>()] = row.at("summary").get<std::string>();
  }
  return ReferenceSummarizer(std::move(table), path.filename().string());
}

std::string ReferenceSummarizer::summarize(const MediaArticle& article) {
  const auto it = summaries_.find(article.id);
  return it == summaries_.end() ? std::string() : it->second;
}

std::unique_ptr<Summarizer> make_summarizer(const std::string& backend_id) {
  if (backend_id.rfind("reference:", 0) == 0) {
    return std::make_unique<ReferenceSummarizer>(ReferenceSummarizer::load(backend_id.substr(10)));
  }
  if (backend_id == "first-sentence") return std::make_unique<FirstSentenceSummarizer>();
  if (backend_id.rfind("lead-", 0) == 0) {
    const auto digits = backend_id.substr(5);
    std::size_t used = 0;
    long n = 0;
    try {
      n = std::stol(digits, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != digits.size() || digits.empty() || n < 1) {
      throw Error(ErrorKind::configuration, "bad lead-N summarizer id: " + backend_id);
    }
    return std::make_unique<LeadTokensSummarizer>(static_cast<std::size_t>(n));
  }
  if (backend_id.rfind("llm:", 0) == 0) {
    return std::make_unique<GeneratorSummarizer>(llm::make_text_generator(backend_id.substr(4)));
  }
  throw Error(ErrorKind::configuration, "unknown summarizer backend: " + backend_id);
}

}  // namespace culturemod::ingestion
