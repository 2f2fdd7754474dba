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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "culturemod/core/culture.hpp"
#include "culturemod/dataset/moderation_dataset.hpp"
#include "culturemod/eval/kendall.hpp"
#include "culturemod/model/beam_search.hpp"
#include "culturemod/model/bundle.hpp"

namespace culturemod::eval {

inline constexpr const char* kSlots[] = {"A", "B", "C", "D"};

struct StudyQuestion {
  std::string item_id;
  std::string content;
  std::vector<std::string> explanations;          // in slot order A, B, ...
  std::map<std::string, CultureId> assignment;    // slot -> model culture; server side only

  // Annotator-facing payload: no assignment.
  nlohmann::json blinded_json() const;
  nlohmann::json to_json() const;
  static StudyQuestion from_json(const nlohmann::json& j);
};

struct StudySet {
  CultureId target_culture;
  std::vector<StudyQuestion> questions;

  nlohmann::json to_json() const;
  static StudySet from_json(const nlohmann::json& j);
};

struct AnnotationSession {
  std::string session_id;
  std::string annotator_id;
  CultureId annotator_culture;
  std::string item_id;
  std::vector<std::string> ranking;  // slots, most culturally aligned first
  std::map<std::string, CultureId> model_assignment;

  // Complete, tie-free ranking over exactly the assigned slots.
  void validate() const;
  nlohmann::json to_json() const;
  static AnnotationSession from_json(const nlohmann::json& j);
};

// Picks `n_items` label-1 records of the target culture and shuffles one
// explanation per model (aligned plus distractors) into slots A-D.
StudySet build_human_eval_study(const dataset::ModerationDataset& records, const CultureId& target,
                                const std::vector<CultureId>& distractors,
                                const model::BundleMap& bundles, int n_items, std::uint64_t seed,
                                const model::DecodingConfig& decoding = {});

// "Content: ..." / "Explanations:" / "A) ..." blocks separated by blank lines.
std::string format_study_text(const StudySet& study);

// Share of sessions whose rank-1 explanation came from each model culture.
std::map<CultureId, double> first_choice_percentages(std::span<const AnnotationSession> sessions);

// Sessions by `annotator_culture` as raters and model cultures (sorted) as
// items; entry = rank the session gave that model's explanation.
RankMatrix study_rank_matrix(std::span<const AnnotationSession> sessions,
                             const CultureId& annotator_culture,
                             std::vector<CultureId>* item_cultures = nullptr);

struct StudyReport {
  std::map<CultureId, double> first_choice;
  std::size_t sessions = 0;
  // Per annotator culture; absent when fewer than two sessions exist.
  std::map<CultureId, KendallResult> kendall;

  nlohmann::json to_json() const;
};

StudyReport study_report(std::span<const AnnotationSession> sessions, int bootstrap_iters,
                         int permutation_iters, std::uint64_t seed);

}  // namespace culturemod::eval
