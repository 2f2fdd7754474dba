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
#include <memory>
#include <string>

namespace culturemod::llm {

// A turn-based prompt. `bindings` carries the template values that produced
// the prompt; offline stubs use them, network clients ignore them.
struct ChatPrompt {
  std::string system;
  std::string user;
  std::map<std::string, std::string> bindings;
};

// Text-generation backend. Implementations must be safe to call from several
// threads at once. Transient failures throw ErrorKind::retriable.
class TextGenerator {
 public:
  virtual ~TextGenerator() = default;
  virtual std::string id() const = 0;
  virtual std::string generate(const ChatPrompt& prompt) = 0;
};

// Returns the rendered prompts verbatim.
class EchoGenerator final : public TextGenerator {
 public:
  std::string id() const override { return "echo"; }
  std::string generate(const ChatPrompt& prompt) override;
};

// Deterministic rationale writer driven by the prompt bindings.
class StubRationaleGenerator final : public TextGenerator {
 public:
  std::string id() const override { return "stub"; }
  std::string generate(const ChatPrompt& prompt) override;
};

struct HttpChatOptions {
  std::string base_url;  // e.g. "https://api.openai.com"
  std::string model = "gpt-4";
  std::string api_key;
  int timeout_seconds = 60;
};

// OpenAI-compatible chat completions client.
class HttpChatGenerator final : public TextGenerator {
 public:
  explicit HttpChatGenerator(HttpChatOptions options);
  std::string id() const override { return "http:" + options_.model; }
  std::string generate(const ChatPrompt& prompt) override;

 private:
  HttpChatOptions options_;
};

// "echo", "stub", or "http" (configured from CULTUREMOD_LLM_URL,
// CULTUREMOD_LLM_MODEL and CULTUREMOD_LLM_API_KEY).
std::unique_ptr<TextGenerator> make_text_generator(const std::string& backend_id);

// Calls `generator` and retries retriable failures up to `max_retries` times.
std::string generate_with_retry(TextGenerator& generator, const ChatPrompt& prompt,
                                int max_retries);

}  // namespace culturemod::llm
