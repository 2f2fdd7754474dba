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
#include <vector>

#include <json.hpp>

namespace culturemod::eval {

// rows = raters, columns = items, entries = ranks 1..n.
using RankMatrix = std::vector<std::vector<int>>;

// Throws invalid_argument unless m >= 2, n >= 2 and every row is a
// permutation of 1..n.
void validate_rankings(const RankMatrix& rankings);

// W = 12 S / (m^2 (n^3 - n)).
double kendalls_w(const RankMatrix& rankings);

// W with the tie correction, for real-valued (mid)ranks. Returns NaN when
// every rater ties every item.
double kendalls_w_tied(const std::vector<std::vector<double>>& ranks);

// Ascending average ranks of `values`.
std::vector<double> midranks(const std::vector<double>& values);

struct KendallResult {
  double w = 0.0;
  double ci95_low = 0.0;
  double ci95_high = 0.0;
  double permutation_p = 1.0;
  int bootstrap_iters = 0;
  int permutation_iters = 0;

  nlohmann::json to_json() const;
};

// Percentile bootstrap over items (columns drawn with replacement, re-ranked
// with midranks) and a permutation test that shuffles each rater's ranking
// independently. Replicate r uses derive_seed(seed, r).
KendallResult kendalls_w_inference(const RankMatrix& rankings, int bootstrap_iters,
                                   int permutation_iters, std::uint64_t seed);

}  // namespace culturemod::eval
