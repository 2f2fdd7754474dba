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


#include "culturemod/eval/kendall.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "culturemod/core/error.hpp"
#include "culturemod/core/random.hpp"
#include "culturemod/eval/metrics.hpp"

namespace culturemod::eval {

namespace {

// 4·S for integer ranks, exact.
std::int64_t four_s(const RankMatrix& r) {
  const auto m = static_cast<std::int64_t>(r.size());
  const auto n = static_cast<std::int64_t>(r.front().size());
  std::int64_t total = 0;
  for (std::int64_t j = 0; j < n; ++j) {
    std::int64_t sum = 0;
    for (const auto& row : r) sum += row[static_cast<std::size_t>(j)];
    // (2·R_j - m(n+1))^2 = 4 (R_j - mean)^2
    const std::int64_t dev = 2 * sum - m * (n + 1);
    total += dev * dev;
  }
  return total;
}

double w_from_four_s(std::int64_t fs, std::size_t m, std::size_t n) {
  const double md = static_cast<double>(m), nd = static_cast<double>(n);
  return 3.0 * static_cast<double>(fs) / (md * md * (nd * nd * nd - nd));
}

}  // namespace

void validate_rankings(const RankMatrix& rankings) {
  if (rankings.size() < 2) throw Error(ErrorKind::invalid_argument, "kendalls_w needs at least two raters");
  const std::size_t n = rankings.front().size();
  if (n < 2) throw Error(ErrorKind::invalid_argument, "kendalls_w needs at least two items");
  for (std::size_t i = 0; i < rankings.size(); ++i) {
    const auto& row = rankings[i];
    if (row.size() != n) throw Error(ErrorKind::invalid_argument, "ranking rows differ in length");
    std::vector<bool> seen(n + 1, false);
    for (int v : row) {
      if (v < 1 || static_cast<std::size_t>(v) > n || seen[static_cast<std::size_t>(v)]) {
        throw Error(ErrorKind::invalid_argument,
                    "rater " + std::to_string(i) + " does not give a permutation of 1..n");
      }
      seen[static_cast<std::size_t>(v)] = true;
    }
  }
}

double kendalls_w(const RankMatrix& rankings) {
  validate_rankings(rankings);
  return w_from_four_s(four_s(rankings), rankings.size(), rankings.front().size());
}

std::vector<double> midranks(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double kendalls_w_tied(const std::vector<std::vector<double>>& ranks) {
  const std::size_t m = ranks.size();
  const std::size_t n = ranks.front().size();
  const double md = static_cast<double>(m), nd = static_cast<double>(n);
  std::vector<double> sums(n, 0.0);
  double ties = 0.0;
  for (const auto& row : ranks) {
    for (std::size_t j = 0; j < n; ++j) sums[j] += row[j];
    auto sorted = row;
    std::sort(sorted.begin(), sorted.end());
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i + 1);
      ties += t * t * t - t;
      i = j + 1;
    }
  }
  const double mean_sum = md * (nd + 1.0) / 2.0;
  double s = 0.0;
  for (double r : sums) s += (r - mean_sum) * (r - mean_sum);
  const double denom = md * md * (nd * nd * nd - nd) - md * ties;
  if (denom <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return 12.0 * s / denom;
}

nlohmann::json KendallResult::to_json() const {
  return {{"w", w},
          {"ci95", {ci95_low, ci95_high}},
          {"permutation_p", permutation_p},
          {"bootstrap_iters", bootstrap_iters},
          {"permutation_iters", permutation_iters}};
}

KendallResult kendalls_w_inference(const RankMatrix& rankings, int bootstrap_iters,
                                   int permutation_iters, std::uint64_t seed) {
  validate_rankings(rankings);
  if (bootstrap_iters < 100 || permutation_iters < 100) {
    throw Error(ErrorKind::invalid_argument, "kendall inference needs at least 100 iterations");
  }
  const std::size_t m = rankings.size();
  const std::size_t n = rankings.front().size();
  KendallResult out;
  out.bootstrap_iters = bootstrap_iters;
  out.permutation_iters = permutation_iters;
  const std::int64_t observed = four_s(rankings);
  out.w = w_from_four_s(observed, m, n);

  // Separate stream families keep bootstrap and permutation draws independent.
  const std::uint64_t boot_seed = derive_seed(seed, 1);
  const std::uint64_t perm_seed = derive_seed(seed, 2);

  std::vector<double> boot(static_cast<std::size_t>(bootstrap_iters));
#pragma omp parallel for schedule(static)
  for (int r = 0; r < bootstrap_iters; ++r) {
    auto rng = make_rng(boot_seed, static_cast<std::uint64_t>(r));
    double w = std::numeric_limits<double>::quiet_NaN();
    while (std::isnan(w)) {
      std::vector<std::size_t> cols(n);
      for (auto& c : cols) c = uniform_index(rng, n);
      std::vector<std::vector<double>> ranks;
      ranks.reserve(m);
      for (const auto& row : rankings) {
        std::vector<double> picked(n);
        for (std::size_t j = 0; j < n; ++j) picked[j] = row[cols[j]];
        ranks.push_back(midranks(picked));
      }
      w = kendalls_w_tied(ranks);
    }
    boot[static_cast<std::size_t>(r)] = w;
  }
  std::sort(boot.begin(), boot.end());
  out.ci95_low = quantile_sorted(boot, 0.025);
  out.ci95_high = quantile_sorted(boot, 0.975);

  long hits = 0;
#pragma omp parallel for schedule(static) reduction(+ : hits)
  for (int r = 0; r < permutation_iters; ++r) {
    auto rng = make_rng(perm_seed, static_cast<std::uint64_t>(r));
    RankMatrix shuffled = rankings;
    for (auto& row : shuffled) shuffle(row.begin(), row.end(), rng);
    if (four_s(shuffled) >= observed) ++hits;
  }
  out.permutation_p = static_cast<double>(hits) / static_cast<double>(permutation_iters);
  return out;
}

}  // namespace culturemod::eval
