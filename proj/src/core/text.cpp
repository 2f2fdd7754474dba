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


#include "culturemod/core/text.hpp"

#include <cctype>

namespace culturemod::text {

namespace {
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
}  // namespace

std::vector<std::string_view> split_whitespace(std::string_view input) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < input.size()) {
    while (i < input.size() && is_space(input[i])) ++i;
    const std::size_t start = i;
    while (i < input.size() && !is_space(input[i])) ++i;
    if (i > start) out.push_back(input.substr(start, i - start));
  }
  return out;
}

std::size_t token_count(std::string_view input) { return split_whitespace(input).size(); }

std::string_view token_prefix(std::string_view input, std::size_t n) {
  std::size_t i = 0;
  std::size_t seen = 0;
  while (i < input.size()) {
    while (i < input.size() && is_space(input[i])) ++i;
    if (i == input.size()) break;
    while (i < input.size() && !is_space(input[i])) ++i;
    if (++seen == n) return input.substr(0, i);
  }
  return input;
}

std::string to_lower(std::string_view input) {
  std::string out(input);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view input) {
  std::size_t b = 0;
  std::size_t e = input.size();
  while (b < e && is_space(input[b])) ++b;
  while (e > b && is_space(input[e - 1])) --e;
  return std::string(input.substr(b, e - b));
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::vector<std::string> alnum_tokens(std::string_view input) {
  std::vector<std::string> out;
  std::string cur;
  for (char raw : input) {
    const auto c = static_cast<unsigned char>(std::tolower(static_cast<unsigned char>(raw)));
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
      cur.push_back(static_cast<char>(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string first_sentence(std::string_view input) {
  for (std::size_t i = 0; i < input.size(); ++i) {
    const char c = input[i];
    if ((c == '.' || c == '!' || c == '?') && (i + 1 == input.size() || is_space(input[i + 1]))) {
      return trim(input.substr(0, i + 1));
    }
  }
  return trim(input);
}

}  // namespace culturemod::text
