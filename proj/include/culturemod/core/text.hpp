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

#include <string>
#include <string_view>
#include <vector>

namespace culturemod::text {

// Whitespace tokenization; views point into `input`.
std::vector<std::string_view> split_whitespace(std::string_view input);
std::size_t token_count(std::string_view input);

// Prefix of `input` that ends right after its `n`-th whitespace token.
// Returns `input` unchanged when it has at most `n` tokens.
std::string_view token_prefix(std::string_view input, std::size_t n);

std::string to_lower(std::string_view input);
std::string trim(std::string_view input);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Lowercased maximal runs of [a-z0-9].
std::vector<std::string> alnum_tokens(std::string_view input);

// Text up to and including the first '.', '!' or '?' that is followed by
// whitespace or the end of input.
std::string first_sentence(std::string_view input);

}  // namespace culturemod::text
