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


#include "culturemod/dataset/highlights.hpp"

#include "culturemod/core/error.hpp"
#include "culturemod/core/text.hpp"

namespace culturemod::dataset {

namespace {

constexpr std::string_view kOpenCurly = "“";
constexpr std::string_view kCloseCurly = "”";

bool at(std::string_view s, std::size_t i, std::string_view token) {
  return s.substr(i, token.size()) == token;
}

void emit(std::vector<std::string>& out, std::string_view segment) {
  if (!text::trim(segment).empty()) out.emplace_back(segment);
}

}  // namespace

std::vector<std::string> extract_highlights(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '"') {
      const auto close = s.find('"', i + 1);
      if (close == std::string_view::npos) break;
      emit(out, s.substr(i + 1, close - i - 1));
      i = close + 1;
    } else if (at(s, i, kOpenCurly)) {
      const std::size_t begin = i + kOpenCurly.size();
      std::size_t j = begin;
      int depth = 1;
      while (j < s.size()) {
        if (at(s, j, kOpenCurly)) {
          ++depth;
          j += kOpenCurly.size();
        } else if (at(s, j, kCloseCurly)) {
          if (--depth == 0) break;
          j += kCloseCurly.size();
        } else {
          ++j;
        }
      }
      if (depth == 0) {
        emit(out, s.substr(begin, j - begin));
        i = j + kCloseCurly.size();
      } else {
        i = begin;  // unmatched opener; keep scanning inside it
      }
    } else {
      ++i;
    }
  }
  return out;
}

std::string truncate_negative(std::string_view snippet, std::span<const std::size_t> positive_lengths,
                              Rng& rng) {
  if (positive_lengths.empty()) {
    throw Error(ErrorKind::invalid_argument, "truncate_negative needs positive lengths");
  }
  if (text::trim(snippet).empty()) {
    throw Error(ErrorKind::invalid_argument, "truncate_negative needs a non-empty snippet");
  }
  const auto target = positive_lengths[uniform_index(rng, positive_lengths.size())];
  if (target == 0 || text::token_count(snippet) <= target) return std::string(snippet);
  return std::string(text::token_prefix(snippet, target));
}

}  // namespace culturemod::dataset
