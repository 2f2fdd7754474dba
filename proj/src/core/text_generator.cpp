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


#include "culturemod/core/text_generator.hpp"

#include <httplib.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include <cstdlib>

#include "culturemod/core/error.hpp"
#include "culturemod/core/text.hpp"

namespace culturemod::llm {

namespace {

std::string binding(const ChatPrompt& p, const std::string& key) {
  const auto it = p.bindings.find(key);
  return it == p.bindings.end() ? std::string() : it->second;
}

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : fallback;
}

}  // namespace

std::string EchoGenerator::generate(const ChatPrompt& prompt) {
  return "SYSTEM:\n" + prompt.system + "\n\nUSER:\n" + prompt.user;
}

std::string StubRationaleGenerator::generate(const ChatPrompt& prompt) {
  const auto boundary = binding(prompt, "boundary");
  if (!boundary.empty()) {
    std::string out = "Flagged as " + text::to_lower(boundary) + ".";
    const auto rationale = text::trim(binding(prompt, "rationale"));
    if (!rationale.empty()) {
      out += " " + rationale;
      if (out.back() != '.') out += ".";
    }
    return out;
  }
  const auto content = binding(prompt, "content");
  const auto words = text::split_whitespace(content);
  std::string gist;
  for (std::size_t i = 0; i < words.size() && i < 8; ++i) {
    if (i) gist += ' ';
    gist += words[i];
  }
  return "Left up after review. It covers " + gist + ".";
}

HttpChatGenerator::HttpChatGenerator(HttpChatOptions options) : options_(std::move(options)) {
  if (options_.base_url.empty()) {
    throw Error(ErrorKind::configuration, "http text generator needs a base URL");
  }
}

std::string HttpChatGenerator::generate(const ChatPrompt& prompt) {
  httplib::Client client(options_.base_url);
  client.set_connection_timeout(options_.timeout_seconds);
  client.set_read_timeout(options_.timeout_seconds);
  httplib::Headers headers;
  if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);
  const nlohmann::json body = {
      {"model", options_.model},
      {"messages",
       {{{"role", "system"}, {"content", prompt.system}}, {{"role", "user"}, {"content", prompt.user}}}}};
  auto res = client.Post("/v1/chat/completions", headers, body.dump(), "application/json");
  if (!res) {
    throw Error(ErrorKind::retriable, "text generator unreachable: " + httplib::to_string(res.error()));
  }
  if (res->status == 429 || res->status >= 500) {
    throw Error(ErrorKind::retriable, "text generator returned HTTP " + std::to_string(res->status));
  }
  if (res->status != 200) {
    throw Error(ErrorKind::configuration, "text generator returned HTTP " + std::to_string(res->status));
  }
  try {
    const auto j = nlohmann::json::parse(res->body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::retriable, std::string("malformed completion: ") + e.what());
  }
}

std::unique_ptr<TextGenerator> make_text_generator(const std::string& backend_id) {
  if (backend_id == "echo") return std::make_unique<EchoGenerator>();
  if (backend_id == "stub") return std::make_unique<StubRationaleGenerator>();
  if (backend_id == "http") {
    HttpChatOptions o;
    o.base_url = env_or("CULTUREMOD_LLM_URL", "");
    o.model = env_or("CULTUREMOD_LLM_MODEL", o.model);
    o.api_key = env_or("CULTUREMOD_LLM_API_KEY", "");
    return std::make_unique<HttpChatGenerator>(std::move(o));
  }
  throw Error(ErrorKind::configuration, "unknown text generator backend: " + backend_id);
}

std::string generate_with_retry(TextGenerator& generator, const ChatPrompt& prompt,
                                int max_retries) {
  for (int attempt = 0;; ++attempt) {
    try {
      return generator.generate(prompt);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::retriable || attempt >= max_retries) throw;
      spdlog::warn("text generator attempt {} failed: {}", attempt + 1, e.what());
    }
  }
}

}  // namespace culturemod::llm
