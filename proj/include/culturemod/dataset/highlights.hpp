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

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "culturemod/core/random.hpp"

namespace culturemod::dataset {

// Quoted passages in order of appearance. Straight quotes pair with the next
// straight quote; curly quotes nest, and the outermost pair wins. Unmatched
// and whitespace-only segments are skipped.
std::vector<std::string> extract_highlights(std::string_view freeform);

// Cuts `snippet` to a whitespace-token length drawn uniformly from
// `positive_lengths`. Shorter snippets come back unchanged.
std::string truncate_negative(std::string_view snippet, std::span<const std::size_t> positive_lengths,
                              Rng& rng);

}  // namespace culturemod::dataset
