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

#include <set>

#include "culturemod/core/error.hpp"
#include "culturemod/eval/study.hpp"
#include "culturemod/model/stages.hpp"
#include "culturemod/model/tokenizer.hpp"

using namespace culturemod;
using namespace culturemod::eval;

namespace {

AnnotationSession session(std::string id, std::string culture, std::vector<std::string> ranking,
                          std::map<std::string, std::string> assignment) {
  AnnotationSession s;
  s.session_id = std::move(id);
  s.annotator_id = "a-" + s.session_id;
  s.annotator_culture = CultureId(culture);
  s.item_id = "item";
  s.ranking = std::move(ranking);
  for (const auto& [slot, c] : assignment) s.model_assignment.emplace(slot, CultureId(c));
  return s;
}

// Eight sessions over three models; slots are shuffled per session.
std::vector<AnnotationSession> eight() {
  return {
      session("1", "US", {"A", "B", "C"}, {{"A", "US"}, {"B", "AU"}, {"C", "NG"}}),
      session("2", "US", {"B", "A", "C"}, {{"A", "AU"}, {"B", "US"}, {"C", "NG"}}),
      session("3", "US", {"C", "B", "A"}, {{"A", "NG"}, {"B", "AU"}, {"C", "US"}}),
      session("4", "US", {"A", "C", "B"}, {{"A", "AU"}, {"B", "NG"}, {"C", "US"}}),
      session("5", "AU", {"A", "B", "C"}, {{"A", "AU"}, {"B", "US"}, {"C", "NG"}}),
      session("6", "AU", {"B", "A", "C"}, {{"A", "NG"}, {"B", "AU"}, {"C", "US"}}),
      session("7", "AU", {"C", "A", "B"}, {{"A", "US"}, {"B", "NG"}, {"C", "AU"}}),
      session("8", "AU", {"A", "B", "C"}, {{"A", "NG"}, {"B", "AU"}, {"C", "US"}}),
  };
}

std::shared_ptr<const model::CulturalModelBundle> tiny_explainer(const std::string& culture, std::uint64_t seed) {
  static const auto tok = std::make_shared<model::WordTokenizer>(
      model::WordTokenizer::train({"those people are vermin and a threat", "harmful slur toward a group"}, 100));
  model::EncoderDecoderConfig c;
  c.vocab_size = tok->vocab_size();
  c.hidden_dim = 16;
  c.num_layers = 1;
  c.num_heads = 2;
  c.ffn_dim = 32;
  c.max_sequence_length = 16;
  auto base = model::init_base_model(c, tok, seed);
  ingestion::MediaDietDataset diet;
  diet.culture = CultureId(culture);
  diet.pairs.push_back({"1", "those people are vermin", "vermin", "x"});
  model::TrainingSchedule s;
  s.total_steps = 1;
  s.batch_size = 1;
  auto d = model::finetune_summarization(base, diet, s).bundle;
  dataset::ModerationDataset ds;
  ds.records.push_back({"r", "those people are vermin", 1, "harmful slur", CultureId(culture), "hate", false});
  return std::make_shared<const model::CulturalModelBundle>(
      model::finetune_rationales(d, ds, model::RationaleMode::stratified, s).bundle);
}

struct Fixture {
  model::BundleMap bundles;
  dataset::ModerationDataset records;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture out;
    std::uint64_t seed = 1;
    for (const char* c : {"US", "AU", "NG", "IN"}) out.bundles[CultureId(c)] = tiny_explainer(c, seed++);
    for (int i = 0; i < 30; ++i) {
      out.records.records.push_back({"v" + std::to_string(i), "those people are a threat " + std::to_string(i), 1,
                                     "slur", CultureId(i % 3 ? "US" : "AU"), "hate", false});
    }
    out.records.records.push_back({"b", "a group", 0, "fine", CultureId("US"), "", false});
    return out;
  }();
  return f;
}

model::DecodingConfig quick() {
  model::DecodingConfig d;
  d.beam_width = 1;
  d.max_output_tokens = 4;
  return d;
}

void collect_keys(const nlohmann::json& j, std::set<std::string>& keys) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      keys.insert(k);
      collect_keys(v, keys);
    }
  } else if (j.is_array()) {
    for (const auto& v : j) collect_keys(v, keys);
  }
}

}  // namespace

TEST_CASE("first-choice percentages on eight hand-tallied sessions") {
  const auto s = eight();
  // Top picks: US, US, US, AU, AU, AU, AU, NG.
  const auto fc = first_choice_percentages(s);
  CHECK(fc.at(CultureId("US")) == doctest::Approx(37.5));
  CHECK(fc.at(CultureId("AU")) == doctest::Approx(50.0));
  CHECK(fc.at(CultureId("NG")) == doctest::Approx(12.5));
  double total = 0.0;
  for (const auto& [c, v] : fc) total += v;
  CHECK(total == doctest::Approx(100.0));
  CHECK_THROWS_AS(first_choice_percentages(std::vector<AnnotationSession>{}), Error);
}

TEST_CASE("rank matrix maps slots back to model cultures") {
  const auto s = eight();
  std::vector<CultureId> items;
  const auto m = study_rank_matrix(s, CultureId("US"), &items);
  REQUIRE(items == std::vector<CultureId>{CultureId("AU"), CultureId("NG"), CultureId("US")});
  // Columns are AU, NG, US.
  const RankMatrix expected = {{2, 3, 1}, {2, 3, 1}, {2, 3, 1}, {1, 3, 2}};
  CHECK(m == expected);
  CHECK(kendalls_w(m) == doctest::Approx(kendalls_w(expected)));

  const auto rep = study_report(s, 200, 200, 1);
  CHECK(rep.sessions == 8);
  CHECK(rep.kendall.size() == 2);
  CHECK(rep.kendall.at(CultureId("US")).w == doctest::Approx(kendalls_w(expected)));
  CHECK(study_report(std::vector<AnnotationSession>{}, 200, 200, 1).sessions == 0);
}

TEST_CASE("sessions must rank every assigned slot exactly once") {
  auto s = session("x", "US", {"A", "A"}, {{"A", "US"}, {"B", "AU"}});
  CHECK_THROWS_AS(s.validate(), Error);
  s.ranking = {"A"};
  CHECK_THROWS_AS(s.validate(), Error);
  s.ranking = {"A", "C"};
  CHECK_THROWS_AS(s.validate(), Error);
  s.ranking = {"B", "A"};
  CHECK_NOTHROW(s.validate());
  const auto back = AnnotationSession::from_json(s.to_json());
  CHECK(back.ranking == s.ranking);
  CHECK(back.model_assignment == s.model_assignment);
}

TEST_CASE("study construction picks own-culture violative items") {
  const auto& f = fixture();
  const auto study = build_human_eval_study(f.records, CultureId("US"),
                                            {CultureId("AU"), CultureId("NG"), CultureId("IN")}, f.bundles,
                                            20, 9, quick());
  CHECK(study.questions.size() == 20);
  std::set<std::string> ids;
  for (const auto& q : study.questions) {
    ids.insert(q.item_id);
    CHECK(q.explanations.size() == 4);
    CHECK(q.assignment.size() == 4);
    std::set<CultureId> models;
    for (const auto& [slot, c] : q.assignment) models.insert(c);
    CHECK(models.size() == 4);
    const auto& rec = *std::find_if(f.records.records.begin(), f.records.records.end(),
                                    [&](const auto& r) { return r.record_id == q.item_id; });
    CHECK(rec.culture == CultureId("US"));
    CHECK(rec.label == 1);
  }
  CHECK(ids.size() == 20);
  CHECK_THROWS_AS(build_human_eval_study(f.records, CultureId("US"), {CultureId("AU")}, f.bundles, 21, 9, quick()),
                  Error);
  CHECK_THROWS_AS(build_human_eval_study(f.records, CultureId("US"), {CultureId("ZA")}, f.bundles, 2, 9, quick()),
                  Error);
}

TEST_CASE("slot placement is balanced across 20 items and 4 models") {
  const auto& f = fixture();
  const auto study = build_human_eval_study(f.records, CultureId("US"),
                                            {CultureId("AU"), CultureId("NG"), CultureId("IN")}, f.bundles,
                                            20, 9, quick());
  std::map<CultureId, std::map<std::string, int>> counts;
  for (const auto& q : study.questions) {
    for (const auto& [slot, c] : q.assignment) ++counts[c][slot];
  }
  for (const auto& [c, per_slot] : counts) {
    int total = 0;
    double chi2 = 0.0;
    for (const char* slot : kSlots) {
      const int n = per_slot.count(slot) ? per_slot.at(slot) : 0;
      total += n;
      chi2 += (n - 5.0) * (n - 5.0) / 5.0;
    }
    CHECK(total == 20);
    // 3 degrees of freedom, 0.001 critical value.
    CHECK(chi2 < 16.27);
  }
}

TEST_CASE("annotator payloads are blinded") {
  const auto& f = fixture();
  const auto study = build_human_eval_study(f.records, CultureId("US"), {CultureId("AU")}, f.bundles, 5, 3, quick());
  for (const auto& q : study.questions) {
    const auto j = q.blinded_json();
    std::set<std::string> keys;
    collect_keys(j, keys);
    CHECK(keys == std::set<std::string>{"item_id", "content", "explanations", "id", "text"});
    const auto dumped = j.dump();
    CHECK(dumped.find("assignment") == std::string::npos);
    CHECK(q.to_json().contains("assignment"));
  }
  const auto text = format_study_text(study);
  CHECK(text.find("A) ") != std::string::npos);
  CHECK(text.find("assignment") == std::string::npos);
}

TEST_CASE("study construction is deterministic per seed") {
  const auto& f = fixture();
  const std::vector<CultureId> d = {CultureId("AU"), CultureId("NG")};
  const auto a = build_human_eval_study(f.records, CultureId("US"), d, f.bundles, 10, 4, quick());
  const auto b = build_human_eval_study(f.records, CultureId("US"), d, f.bundles, 10, 4, quick());
  CHECK(a.to_json() == b.to_json());
  const auto c = build_human_eval_study(f.records, CultureId("US"), d, f.bundles, 10, 5, quick());
  CHECK(a.to_json() != c.to_json());
  const auto back = StudySet::from_json(a.to_json());
  CHECK(back.to_json() == a.to_json());
}
