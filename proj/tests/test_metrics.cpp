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


#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "culturemod/core/error.hpp"
#include "culturemod/core/io.hpp"
#include "culturemod/core/random.hpp"
#include "culturemod/eval/heatmap.hpp"
#include "culturemod/eval/kendall.hpp"
#include "culturemod/eval/metrics.hpp"
#include "culturemod/eval/score_report.hpp"

using namespace culturemod;
using namespace culturemod::eval;

namespace {

const std::filesystem::path kData = CULTUREMOD_TEST_DATA;

double brute_auroc(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] != 0) continue;
      pairs += 1.0;
      wins += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
    }
  }
  return wins / pairs;
}

double var(const std::vector<double>& x) {
  const double m = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

}  // namespace

TEST_CASE("AUROC of a small hand example") {
  const std::vector<double> s = {0.1, 0.4, 0.35, 0.8};
  const std::vector<int> y = {0, 0, 1, 1};
  CHECK(auroc(s, y) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("AUROC equals the pairwise count, ties included") {
  auto rng = make_rng(123);
  std::vector<double> s(1000);
  std::vector<int> y(1000);
  for (std::size_t i = 0; i < s.size(); ++i) {
    y[i] = static_cast<int>(uniform_index(rng, 2));
    // Coarse values force many ties.
    s[i] = static_cast<double>(uniform_index(rng, 20)) + (y[i] ? 3.0 : 0.0);
  }
  CHECK(auroc(s, y) == doctest::Approx(brute_auroc(s, y)).epsilon(1e-12));
  std::vector<double> neg(s.size());
  std::transform(s.begin(), s.end(), neg.begin(), [](double v) { return -v; });
  CHECK(auroc(neg, y) == doctest::Approx(1.0 - auroc(s, y)).epsilon(1e-12));
  const std::vector<int> one_class(4, 1);
  CHECK_THROWS_AS(auroc(std::vector<double>{1, 2, 3, 4}, one_class), Error);
}

TEST_CASE("ROUGE-1 matches the independent golden values") {
  const auto cases = io::read_json(kData / "rouge_golden.json");
  REQUIRE(cases.size() >= 50);
  for (const auto& c : cases) {
    const auto cand = c.at("candidate").get<std::string>();
    const auto ref = c.at("reference").get<std::string>();
    CAPTURE(cand);
    CAPTURE(ref);
    const auto r = rouge1(cand, ref);
    CHECK(r.precision == doctest::Approx(c.at("precision").get<double>()).epsilon(1e-12));
    CHECK(r.recall == doctest::Approx(c.at("recall").get<double>()).epsilon(1e-12));
    CHECK(r.f1 == doctest::Approx(c.at("f1").get<double>()).epsilon(1e-12));
  }
}

TEST_CASE("ROUGE-1 swap identities") {
  const auto cases = io::read_json(kData / "rouge_golden.json");
  for (const auto& c : cases) {
    const auto a = c.at("candidate").get<std::string>();
    const auto b = c.at("reference").get<std::string>();
    if (c.at("candidate_tokens").get<int>() == 0) continue;
    const auto ab = rouge1(a, b);
    const auto ba = rouge1(b, a);
    CHECK(ab.precision == doctest::Approx(ba.recall));
    CHECK(ab.recall == doctest::Approx(ba.precision));
    CHECK(ab.f1 == doctest::Approx(ba.f1));
    CHECK(ab.f1 >= 0.0);
    CHECK(ab.f1 <= 1.0);
  }
  CHECK(rouge1("the cat sat", "the cat sat").f1 == 1.0);
  CHECK(rouge1("", "the cat").f1 == 0.0);
  CHECK_THROWS_AS(rouge1("the cat", ""), Error);
}

TEST_CASE("Welch test on a textbook pair") {
  const std::vector<double> a = {1, 2, 3};
  const std::vector<double> b = {2, 3, 4};
  const auto r = welch_t_test(a, b);
  CHECK(r.t_statistic == doctest::Approx(-std::sqrt(1.5)).epsilon(1e-12));
  CHECK(r.degrees_of_freedom == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(r.p_value == doctest::Approx(0.2878641347266908).epsilon(1e-9));
}

TEST_CASE("Welch statistic and df match the closed form; p matches a reference library") {
  const auto cases = io::read_json(kData / "welch_golden.json");
  REQUIRE(cases.size() == 20);
  for (const auto& c : cases) {
    const auto a = c.at("a").get<std::vector<double>>();
    const auto b = c.at("b").get<std::vector<double>>();
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    const double va = var(a) / na, vb = var(b) / nb;
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / na;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / nb;
    const double t = (ma - mb) / std::sqrt(va + vb);
    const double df = (va + vb) * (va + vb) / (va * va / (na - 1) + vb * vb / (nb - 1));
    const auto r = welch_t_test(a, b);
    CHECK(std::abs(r.t_statistic - t) < 1e-9);
    CHECK(std::abs(r.degrees_of_freedom - df) < 1e-9);
    CHECK(std::abs(r.t_statistic - c.at("t").get<double>()) < 1e-9);
    CHECK(std::abs(r.degrees_of_freedom - c.at("df").get<double>()) < 1e-9);
    CHECK(std::abs(r.p_value - c.at("p").get<double>()) < 1e-9);

    const auto s = welch_t_test(b, a);
    CHECK(s.t_statistic == doctest::Approx(-r.t_statistic));
    CHECK(s.p_value == doctest::Approx(r.p_value));
    CHECK(r.degrees_of_freedom <= na + nb - 2 + 1e-9);
    CHECK(r.degrees_of_freedom >= std::min(na, nb) - 1 - 1e-9);
  }
}

TEST_CASE("Student t tail agrees with closed forms for small df") {
  for (double t = -6.0; t <= 6.0; t += 0.25) {
    const double sf1 = 0.5 - std::atan(t) / std::numbers::pi;
    const double sf2 = 0.5 - t / (2.0 * std::sqrt(2.0 + t * t));
    const double u = t / std::sqrt(3.0);
    const double sf3 = 0.5 - (u / (1.0 + u * u) + std::atan(u)) / std::numbers::pi;
    CHECK(student_t_sf(t, 1.0) == doctest::Approx(sf1).epsilon(1e-10));
    CHECK(student_t_sf(t, 2.0) == doctest::Approx(sf2).epsilon(1e-10));
    CHECK(student_t_sf(t, 3.0) == doctest::Approx(sf3).epsilon(1e-10));
  }
  CHECK(incomplete_beta(2.0, 3.0, 0.0) == 0.0);
  CHECK(incomplete_beta(2.0, 3.0, 1.0) == 1.0);
  // I_x(1, b) = 1 - (1 - x)^b
  CHECK(incomplete_beta(1.0, 4.0, 0.3) == doctest::Approx(1.0 - std::pow(0.7, 4)).epsilon(1e-12));
}

TEST_CASE("Welch degenerate inputs") {
  const std::vector<double> c = {1, 1, 1};
  const std::vector<double> d = {2, 2, 2};
  const auto r = welch_t_test(c, d);
  CHECK(std::isinf(r.t_statistic));
  CHECK(r.p_value == 0.0);
  CHECK(r.to_json().at("t") == "-inf");
  const auto same = welch_t_test(c, c);
  CHECK(same.p_value == 1.0);
  CHECK_THROWS_AS(welch_t_test(std::vector<double>{1}, d), Error);
}

TEST_CASE("Kendall W on hand examples") {
  CHECK(kendalls_w({{1, 2, 3}, {2, 3, 1}, {1, 3, 2}}) == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
  CHECK(kendalls_w({{1, 2, 3, 4}, {1, 2, 3, 4}, {1, 2, 3, 4}}) == doctest::Approx(1.0));
  CHECK(kendalls_w({{1, 2, 3, 4}, {4, 3, 2, 1}}) == doctest::Approx(0.0));
  CHECK_THROWS_AS(kendalls_w({{1, 2, 3}}), Error);
  CHECK_THROWS_AS(kendalls_w({{1, 2, 2}, {1, 2, 3}}), Error);
  CHECK_THROWS_AS(kendalls_w({{1, 2, 3}, {1, 2}}), Error);
}

TEST_CASE("Kendall W stays in [0, 1] and ties reduce to the untied form") {
  auto rng = make_rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 2 + uniform_index(rng, 5), n = 2 + uniform_index(rng, 6);
    RankMatrix r(m);
    std::vector<std::vector<double>> rd(m);
    for (std::size_t i = 0; i < m; ++i) {
      r[i].resize(n);
      std::iota(r[i].begin(), r[i].end(), 1);
      shuffle(r[i].begin(), r[i].end(), rng);
      rd[i].assign(r[i].begin(), r[i].end());
    }
    const double w = kendalls_w(r);
    CHECK(w >= -1e-12);
    CHECK(w <= 1.0 + 1e-12);
    CHECK(kendalls_w_tied(rd) == doctest::Approx(w).epsilon(1e-12));
  }
  CHECK(midranks({3.0, 1.0, 3.0, 2.0}) == std::vector<double>{3.5, 1.0, 3.5, 2.0});
}

TEST_CASE("Kendall permutation p-value matches exhaustive enumeration") {
  const RankMatrix obs = {{1, 2, 3}, {1, 3, 2}};
  auto four_s = [](const RankMatrix& r) {
    long total = 0;
    for (std::size_t j = 0; j < 3; ++j) {
      long sum = 0;
      for (const auto& row : r) sum += row[j];
      total += (2 * sum - 2 * 4) * (2 * sum - 2 * 4);
    }
    return total;
  };
  std::vector<int> p = {1, 2, 3};
  std::vector<std::vector<int>> perms;
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  int hits = 0;
  for (const auto& a : perms) {
    for (const auto& b : perms) hits += four_s({a, b}) >= four_s(obs);
  }
  const double exact = hits / 36.0;
  const auto r = kendalls_w_inference(obs, 1000, 10000, 5);
  CHECK(std::abs(r.permutation_p - exact) <= 0.02);
  CHECK(r.ci95_low <= r.w + 1e-12);
  CHECK(r.ci95_high >= 0.0);
  const auto again = kendalls_w_inference(obs, 1000, 10000, 5);
  CHECK(again.permutation_p == r.permutation_p);
  CHECK(again.ci95_low == r.ci95_low);
  CHECK_THROWS_AS(kendalls_w_inference(obs, 10, 10, 5), Error);
}

TEST_CASE("heatmap normalization by hand") {
  HeatmapMatrix m;
  m.row_cultures = {CultureId("US"), CultureId("AU")};
  m.col_cultures = {CultureId("US"), CultureId("AU")};
  m.base = {0.2, 0.4};
  m.raw = {{0.3, 0.4}, {0.25, 0.6}};
  normalize_heatmap(m);
  CHECK(m.improvement[0][0] == doctest::Approx(0.5));
  CHECK(m.improvement[1][0] == doctest::Approx(0.25));
  CHECK(m.improvement[0][1] == doctest::Approx(0.0));
  CHECK(m.improvement[1][1] == doctest::Approx(0.5));
  CHECK(m.normalized[0][0] == doctest::Approx(1.0));
  CHECK(m.normalized[1][0] == doctest::Approx(0.0));
  CHECK(m.normalized[0][1] == doctest::Approx(0.0));
  CHECK(m.normalized[1][1] == doctest::Approx(1.0));
  CHECK(diagonal_argmax_columns(m) == 2);
  m.raw[1][0] = 0.9;
  CHECK(diagonal_argmax_columns(m) == 1);
  const auto back = HeatmapMatrix::from_json(m.to_json());
  CHECK(back.raw == m.raw);
  CHECK(back.col_cultures == m.col_cultures);

  HeatmapMatrix flat;
  flat.row_cultures = {CultureId("US"), CultureId("AU")};
  flat.col_cultures = {CultureId("US")};
  flat.base = {0.0};
  flat.raw = {{0.1}, {0.1}};
  normalize_heatmap(flat);
  CHECK(std::isfinite(flat.improvement[0][0]));
  CHECK(flat.normalized[0][0] == 0.0);
}

TEST_CASE("quartiles of nine values") {
  const auto s = summarize_scores({9, 1, 8, 2, 7, 3, 6, 4, 5});
  CHECK(s.count == 9);
  CHECK(s.min == 1.0);
  CHECK(s.q1 == doctest::Approx(3.0));
  CHECK(s.median == doctest::Approx(5.0));
  CHECK(s.q3 == doctest::Approx(7.0));
  CHECK(s.max == 9.0);
  CHECK(s.mean == doctest::Approx(5.0));
  const std::vector<double> four = {1, 2, 3, 4};
  CHECK(quantile_sorted(four, 0.5) == doctest::Approx(2.5));
}

TEST_CASE("score strata split by category, origin and FYI") {
  std::vector<Prediction> preds;
  auto rec = [](std::string cat, std::string culture, bool fyi) {
    dataset::ModerationRecord r;
    r.record_id = cat + culture;
    r.snippet = "s";
    r.rationale = "r";
    r.label = fyi ? 0 : 1;
    r.culture = CultureId(culture);
    r.policy_category = std::move(cat);
    r.is_fyi = fyi;
    return r;
  };
  preds.push_back({rec("Hate Content", "US", false), 0.9});
  preds.push_back({rec("Hate Content", "US", false), 0.7});
  preds.push_back({rec("Hate Content", "AU", false), 0.2});
  preds.push_back({rec("Hate Content", "AU", true), 0.1});
  const auto rep = score_distribution_report(preds, CultureId("US"));
  CHECK(rep.strata.size() == 3);
  const auto& own = rep.strata.at({"Hate Content", true, false});
  CHECK(own.count == 2);
  CHECK(own.median == doctest::Approx(0.8));
  CHECK(rep.strata.at({"Hate Content", false, true}).count == 1);
}

TEST_CASE("normal confidence interval") {
  const std::vector<double> x = {0.6, 0.7, 0.8};
  const auto ci = normal_ci95(x);
  CHECK(ci.low == doctest::Approx(0.7 - 1.96 * 0.1 / std::sqrt(3.0)));
  CHECK(ci.high == doctest::Approx(0.7 + 1.96 * 0.1 / std::sqrt(3.0)));
  CHECK(sample_sd(x) == doctest::Approx(0.1));
}
