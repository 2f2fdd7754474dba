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
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "culturemod/core/culture.hpp"
#include "culturemod/core/text_generator.hpp"
#include "culturemod/dataset/prompt_template.hpp"

namespace culturemod::dataset {

enum class ModeratorAction { flagged, no_action };

const char* to_string(ModeratorAction action);
ModeratorAction moderator_action_from_string(std::string_view name);

struct RawModerationEvent {
  std::string event_id;
  std::string snippet;
  double risk_score = 0.0;
  ModeratorAction moderator_action = ModeratorAction::no_action;
  std::string highlights_freeform;
  std::string rationale_freeform;
  std::string boundary;
  CultureId origin_culture;
  bool fyi = false;

  nlohmann::json to_json() const;
  static RawModerationEvent from_json(const nlohmann::json& j);
};

struct ModerationRecord {
  std::string record_id;
  std::string snippet;
  int label = 0;
  std::string rationale;
  CultureId culture;
  std::string policy_category;
  bool is_fyi = false;

  void validate() const;
  nlohmann::json to_json() const;
  static ModerationRecord from_json(const nlohmann::json& j);
};

struct DatasetCounts {
  std::map<int, std::size_t> per_label;
  std::map<std::string, std::size_t> per_culture;
  std::map<std::string, std::size_t> per_category;
  std::size_t fyi = 0;
  std::size_t rejected = 0;

  bool operator==(const DatasetCounts&) const = default;
  nlohmann::json to_json() const;
  static DatasetCounts from_json(const nlohmann::json& j);
};

struct ModerationDataset {
  std::vector<ModerationRecord> records;
  DatasetCounts counts;
};

// Recount from records; `rejected` is carried over from `previous`.
DatasetCounts tally(std::span<const ModerationRecord> records, std::size_t rejected = 0);

// Value used for the country placeholders.
std::string country_name(const CultureId& id);

// Renders the prompt for one event without calling a generator.
llm::ChatPrompt rationale_prompt(const RawModerationEvent& event, const CultureId& content_country,
                                 const CultureId& target_country, const TemplateSet& templates);

std::string standardize_rationale(const RawModerationEvent& event, llm::TextGenerator& llm,
                                  const CultureId& content_country, const CultureId& target_country,
                                  const TemplateSet& templates, int max_retries = 2);

struct BuildOptions {
  CultureId moderator_culture{"US"};
  std::size_t max_in_flight = 4;
  int max_retries = 2;
};

// One record per event, in event order. Randomness for event i comes from
// derive_seed(seed, i), so results do not depend on scheduling.
ModerationDataset build_dataset(std::span<const RawModerationEvent> events, llm::TextGenerator& llm,
                                std::uint64_t seed, const TemplateSet& templates,
                                const BuildOptions& options = {});

std::vector<RawModerationEvent> load_events(const std::filesystem::path& path);
void save_events(const std::filesystem::path& path, std::span<const RawModerationEvent> events);

// Records as JSON lines plus a "<path>.counts.json" sidecar.
void save_dataset(const std::filesystem::path& path, const ModerationDataset& dataset);
ModerationDataset load_dataset(const std::filesystem::path& path);
std::filesystem::path counts_path(const std::filesystem::path& dataset_path);

}  // namespace culturemod::dataset
