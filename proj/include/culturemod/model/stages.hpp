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
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "culturemod/dataset/moderation_dataset.hpp"
#include "culturemod/ingestion/media_diet.hpp"
#include "culturemod/model/beam_search.hpp"
#include "culturemod/model/bundle.hpp"
#include "culturemod/model/trainer.hpp"

namespace culturemod::model {

// Random initialization from `seed`, or weights copied from a saved bundle
// directory whose shapes must match `config`.
CulturalModelBundle init_base_model(const EncoderDecoderConfig& config,
                                    std::shared_ptr<const Tokenizer> tokenizer, std::uint64_t seed,
                                    const std::optional<std::filesystem::path>& pretrained = {});

struct StageResult {
  CulturalModelBundle bundle;
  TrainingLog log;
};

// Source and target framing shared by training and inference.
std::vector<int> frame_source(const Tokenizer& tokenizer, std::string_view text, int max_length);
Seq2SeqExample make_example(const Tokenizer& tokenizer, std::string_view source,
                            std::string_view target, int max_length);

// Stage 1: {article -> summary}.
StageResult finetune_summarization(const CulturalModelBundle& bundle,
                                   const ingestion::MediaDietDataset& diet,
                                   const TrainingSchedule& schedule,
                                   const StepCallback& on_step = {});

enum class RationaleMode { stratified, all };

const char* to_string(RationaleMode mode);
RationaleMode rationale_mode_from_string(std::string_view name);

// Stage 2: {snippet -> rationale}. Stratified keeps label-1 records of the
// bundle's culture; all keeps every record.
StageResult finetune_rationales(const CulturalModelBundle& bundle,
                                const dataset::ModerationDataset& records, RationaleMode mode,
                                const TrainingSchedule& schedule, const StepCallback& on_step = {});

// Final encoder state at the [CLS] position; requires stage >= media_diet.
std::vector<float> embed_cls(const CulturalModelBundle& bundle, std::string_view snippet);
// Same without the stage check, for base-model baselines. Parallel over
// snippets.
std::vector<std::vector<float>> encode_cls(const CulturalModelBundle& bundle,
                                           const std::vector<std::string>& snippets);

struct HeadTrainingOptions {
  int iterations = 10;
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
  LogisticOptions logistic;
};

// Repeated random splits: fit on the train part, score AUROC on the test part.
// Splits with a single class on either side are redrawn.
ClassifierTrainingReport cross_validate_head(const std::vector<std::vector<float>>& embeddings,
                                             std::span<const int> labels,
                                             const HeadTrainingOptions& options);

struct ClassifierResult {
  CulturalModelBundle bundle;
  ClassifierTrainingReport report;
};

// Stage 3: logistic head on frozen [CLS] embeddings; the final head is fitted
// on every record.
ClassifierResult train_classifier_head(const CulturalModelBundle& bundle,
                                       const dataset::ModerationDataset& records,
                                       const HeadTrainingOptions& options = {});

// Attaches the decoder used for explanations.
CulturalModelBundle attach_explainer(const CulturalModelBundle& classifier,
                                     const CulturalModelBundle& explainer);

double predict_violation(const CulturalModelBundle& bundle, std::string_view snippet);

// Beam-search decode from any stage.
std::string generate_text(const CulturalModelBundle& bundle, std::string_view input,
                          const DecodingConfig& decoding);

// Requires stage >= rationale_tuned; uses the attached explainer if any.
std::string generate_explanation(const CulturalModelBundle& bundle, std::string_view snippet,
                                 const DecodingConfig& decoding);

}  // namespace culturemod::model
