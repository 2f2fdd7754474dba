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
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "culturemod/core/culture.hpp"
#include "culturemod/dataset/moderation_dataset.hpp"
#include "culturemod/ingestion/media_diet.hpp"
#include "culturemod/model/beam_search.hpp"
#include "culturemod/model/stages.hpp"
#include "culturemod/model/trainer.hpp"
#include "culturemod/model/transformer.hpp"

namespace culturemod::pipeline {

// Stage names in execution order.
inline constexpr const char* kStages[] = {"ingest", "dataset", "init", "stage1",
                                          "stage2", "stage3", "evaluate", "report"};

struct DataPaths {
  std::filesystem::path articles;  // MediaArticle JSON lines, all cultures
  std::filesystem::path events;    // RawModerationEvent JSON lines
  std::string summarizer = "first-sentence";  // or "lead-N", "reference:<path>", "llm:<backend>"
  std::string rationale_llm = "stub";
  std::optional<std::filesystem::path> templates;  // built-in prompts when unset
  std::optional<std::filesystem::path> pretrained;  // base bundle to start from
  std::optional<std::filesystem::path> annotations;  // study sessions for the report
};

struct ModelSpec {
  model::EncoderDecoderConfig config;  // vocab_size is filled from the tokenizer
  std::string tokenizer = "word";
  int vocab_budget = 4000;
};

struct Schedules {
  model::TrainingSchedule stage1;
  model::TrainingSchedule stage2;
  // Explainer pass over every rationale; skipped when total_steps is 0.
  model::TrainingSchedule stage2_all;
  model::HeadTrainingOptions head;
};

struct EvaluationSpec {
  model::DecodingConfig decoding;
  int heatmap_holdout = 30;  // media-diet pairs per culture kept out of stage 1
  int study_items = 0;       // 0 skips the human-eval study export
  int kendall_bootstrap = 10000;
  int kendall_permutation = 10000;
};

// Every stochastic step draws from one of these.
struct Seeds {
  std::uint64_t split = 0;    // media-diet holdout
  std::uint64_t dataset = 0;  // negative truncation
  std::uint64_t init = 0;     // weights
  std::uint64_t stage1 = 0;
  std::uint64_t stage2 = 0;
  std::uint64_t head = 0;
  std::uint64_t study = 0;
  std::uint64_t kendall = 0;

  // All eight derived from one root seed.
  static Seeds from_root(std::uint64_t root);
};

struct StageRecord {
  std::string input_digest;
  std::map<std::string, std::string> outputs;  // path relative to work_dir -> digest

  nlohmann::json to_json() const;
  static StageRecord from_json(const nlohmann::json& j);
};

struct ExperimentManifest {
  std::string experiment_id;
  std::vector<CultureId> cultures;
  DataPaths data;
  std::filesystem::path work_dir = "work";
  ModelSpec model;
  ingestion::IngestOptions ingest;
  dataset::BuildOptions dataset;
  Schedules schedules;
  EvaluationSpec evaluation;
  Seeds seeds;
  std::map<std::string, StageRecord> stages;  // completed stages
  std::string tool_version;

  // Relative paths resolve against this directory (the manifest's own).
  std::filesystem::path base_dir = ".";

  std::filesystem::path resolve(const std::filesystem::path& p) const;
  std::filesystem::path work() const { return resolve(work_dir); }

  // Shape checks plus existence of every input path.
  void validate() const;
  nlohmann::json to_json() const;
  static ExperimentManifest from_json(const nlohmann::json& j,
                                      const std::filesystem::path& base_dir = ".");
};

ExperimentManifest load_manifest(const std::filesystem::path& path);
// Checks that every recorded output exists before writing.
void save_manifest(const ExperimentManifest& manifest, const std::filesystem::path& path);

nlohmann::json to_json(const ingestion::IngestOptions& o);
ingestion::IngestOptions ingest_options_from_json(const nlohmann::json& j);
nlohmann::json to_json(const dataset::BuildOptions& o);
dataset::BuildOptions build_options_from_json(const nlohmann::json& j);
nlohmann::json to_json(const model::HeadTrainingOptions& o);
model::HeadTrainingOptions head_options_from_json(const nlohmann::json& j);

}  // namespace culturemod::pipeline
