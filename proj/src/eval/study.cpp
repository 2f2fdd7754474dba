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


#include "culturemod/eval/study.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "culturemod/core/error.hpp"
#include "culturemod/core/random.hpp"
#include "culturemod/model/stages.hpp"

namespace culturemod::eval {

using nlohmann::json;

namespace {

json assignment_json(const std::map<std::string, CultureId>& a) {
  json out = json::object();
  for (const auto& [slot, c] : a) out[slot] = c.code();
  return out;
}

std::map<std::string, CultureId> assignment_from(const json& j) {
  std::map<std::string, CultureId> out;
  for (const auto& [slot, c] : j.items()) out.emplace(slot, CultureId(c.get<std::string>()));
  return out;
}

}  // namespace

json StudyQuestion::blinded_json() const {
  json ex = json::array();
  for (std::size_t i = 0; i < explanations.size(); ++i) {
    ex.push_back({{"id", kSlots[i]}, {"text", explanations[i]}});
  }
  return {{"item_id", item_id}, {"content", content}, {"explanations", ex}};
}

json StudyQuestion::to_json() const {
  auto j = blinded_json();
  j["assignment"] = assignment_json(assignment);
  return j;
}

StudyQuestion StudyQuestion::from_json(const json& j) {
  StudyQuestion q;
  q.item_id = j.at("item_id").get<std::string>();
  q.content = j.at("content").get<std::string>();
  for (const auto& e : j.at("explanations")) q.explanations.push_back(e.at("text").get<std::string>());
  q.assignment = assignment_from(j.at("assignment"));
  return q;
}

json StudySet::to_json() const {
  json qs = json::array();
  for (const auto& q : questions) qs.push_back(q.to_json());
  return {{"target_culture", target_culture.code()}, {"questions", qs}};
}

StudySet StudySet::from_json(const json& j) {
  StudySet s;
  s.target_culture = CultureId(j.at("target_culture").get<std::string>());
  for (const auto& q : j.at("questions")) s.questions.push_back(StudyQuestion::from_json(q));
  return s;
}

void AnnotationSession::validate() const {
  if (session_id.empty()) throw Error(ErrorKind::invalid_argument, "session without id");
  if (annotator_culture.empty()) throw Error(ErrorKind::invalid_argument, "session without annotator culture");
  if (ranking.size() != model_assignment.size() || ranking.size() < 2) {
    throw Error(ErrorKind::invalid_argument, "session " + session_id + " ranking is incomplete");
  }
  std::set<std::string> seen;
  for (const auto& slot : ranking) {
    if (!model_assignment.contains(slot) || !seen.insert(slot).second) {
      throw Error(ErrorKind::invalid_argument, "session " + session_id + " ranking is not a permutation");
    }
  }
}

json AnnotationSession::to_json() const {
  return {{"session_id", session_id},
          {"annotator_id", annotator_id},
          {"annotator_culture", annotator_culture.code()},
          {"item_id", item_id},
          {"ranking", ranking},
          {"model_assignment", assignment_json(model_assignment)}};
}

AnnotationSession AnnotationSession::from_json(const json& j) {
  AnnotationSession s;
  try {
    s.session_id = j.at("session_id").get<std::string>();
    s.annotator_id = j.value("annotator_id", std::string());
    s.annotator_culture = CultureId(j.at("annotator_culture").get<std::string>());
    s.item_id = j.value("item_id", std::string());
    s.ranking = j.at("ranking").get<std::vector<std::string>>();
    s.model_assignment = assignment_from(j.at("model_assignment"));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::invalid_argument, std::string("malformed session: ") + e.what());
  }
  s.validate();
  return s;
}

StudySet build_human_eval_study(const dataset::ModerationDataset& records, const CultureId& target,
                                const std::vector<CultureId>& distractors,
                                const model::BundleMap& bundles, int n_items, std::uint64_t seed,
                                const model::DecodingConfig& decoding) {
  if (n_items < 1) throw Error(ErrorKind::invalid_argument, "study needs at least one item");
  std::vector<CultureId> models = {target};
  models.insert(models.end(), distractors.begin(), distractors.end());
  if (models.size() > std::size(kSlots)) {
    throw Error(ErrorKind::invalid_argument, "study supports at most four explanations per item");
  }
  if (std::set<CultureId>(models.begin(), models.end()).size() != models.size()) {
    throw Error(ErrorKind::invalid_argument, "study models must be distinct");
  }
  for (const auto& c : models) {
    const auto it = bundles.find(c);
    if (it == bundles.end() || !it->second) throw Error(ErrorKind::not_found, "no bundle for culture " + c.code());
  }
  std::vector<const dataset::ModerationRecord*> pool;
  for (const auto& r : records.records) {
    if (r.label == 1 && r.culture == target) pool.push_back(&r);
  }
  if (pool.size() < static_cast<std::size_t>(n_items)) {
    throw Error(ErrorKind::empty_input, "only " + std::to_string(pool.size()) + " violative records for " +
                                            target.code() + ", study needs " + std::to_string(n_items));
  }
  auto pick_rng = make_rng(seed, 0);
  shuffle(pool.begin(), pool.end(), pick_rng);
  pool.resize(static_cast<std::size_t>(n_items));

  StudySet study;
  study.target_culture = target;
  study.questions.resize(pool.size());
  const auto n = static_cast<long>(pool.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    const auto& r = *pool[static_cast<std::size_t>(i)];
    std::vector<std::size_t> order(models.size());
    std::iota(order.begin(), order.end(), 0);
    auto rng = make_rng(seed, static_cast<std::uint64_t>(i) + 1);
    shuffle(order.begin(), order.end(), rng);
    auto& q = study.questions[static_cast<std::size_t>(i)];
    q.item_id = r.record_id;
    q.content = r.snippet;
    for (std::size_t slot = 0; slot < order.size(); ++slot) {
      const auto& culture = models[order[slot]];
      q.explanations.push_back(model::generate_explanation(*bundles.at(culture), r.snippet, decoding));
      q.assignment.emplace(kSlots[slot], culture);
    }
  }
  return study;
}

std::string format_study_text(const StudySet& study) {
  std::string out;
  for (std::size_t i = 0; i < study.questions.size(); ++i) {
    const auto& q = study.questions[i];
    if (i) out += "\n";
    out += "Content: " + q.content + "\n";
    out += "Explanations:\n";
    for (std::size_t s = 0; s < q.explanations.size(); ++s) {
      out += std::string(kSlots[s]) + ") " + q.explanations[s] + "\n";
    }
  }
  return out;
}

std::map<CultureId, double> first_choice_percentages(std::span<const AnnotationSession> sessions) {
  if (sessions.empty()) throw Error(ErrorKind::empty_input, "no annotation sessions");
  std::map<CultureId, double> counts;
  for (const auto& s : sessions) {
    s.validate();
    for (const auto& [slot, c] : s.model_assignment) counts.emplace(c, 0.0);
  }
  for (const auto& s : sessions) counts[s.model_assignment.at(s.ranking.front())] += 1.0;
  for (auto& [c, v] : counts) v = 100.0 * v / static_cast<double>(sessions.size());
  return counts;
}

RankMatrix study_rank_matrix(std::span<const AnnotationSession> sessions,
                             const CultureId& annotator_culture, std::vector<CultureId>* item_cultures) {
  std::vector<const AnnotationSession*> own;
  for (const auto& s : sessions) {
    if (s.annotator_culture == annotator_culture) own.push_back(&s);
  }
  std::set<CultureId> models;
  for (const auto* s : own) {
    for (const auto& [slot, c] : s->model_assignment) models.insert(c);
  }
  const std::vector<CultureId> items(models.begin(), models.end());
  RankMatrix m;
  for (const auto* s : own) {
    std::vector<int> row(items.size(), 0);
    for (std::size_t pos = 0; pos < s->ranking.size(); ++pos) {
      const auto& c = s->model_assignment.at(s->ranking[pos]);
      const auto j = static_cast<std::size_t>(std::find(items.begin(), items.end(), c) - items.begin());
      row[j] = static_cast<int>(pos) + 1;
    }
    m.push_back(std::move(row));
  }
  if (item_cultures) *item_cultures = items;
  return m;
}

json StudyReport::to_json() const {
  json fc = json::object();
  for (const auto& [c, v] : first_choice) fc[c.code()] = v;
  json k = json::object();
  for (const auto& [c, r] : kendall) k[c.code()] = r.to_json();
  return {{"sessions", sessions}, {"first_choice_percentages", fc}, {"kendall", k}};
}

StudyReport study_report(std::span<const AnnotationSession> sessions, int bootstrap_iters,
                         int permutation_iters, std::uint64_t seed) {
  StudyReport r;
  r.sessions = sessions.size();
  if (sessions.empty()) return r;
  r.first_choice = first_choice_percentages(sessions);
  std::set<CultureId> annotators;
  for (const auto& s : sessions) annotators.insert(s.annotator_culture);
  for (const auto& a : annotators) {
    const auto m = study_rank_matrix(sessions, a);
    bool complete = m.size() >= 2;
    for (const auto& row : m) complete = complete && std::find(row.begin(), row.end(), 0) == row.end();
    if (!complete) continue;
    r.kendall.emplace(a, kendalls_w_inference(m, bootstrap_iters, permutation_iters,
                                              derive_seed(seed, stable_hash(a.code()))));
  }
  return r;
}

}  // namespace culturemod::eval
