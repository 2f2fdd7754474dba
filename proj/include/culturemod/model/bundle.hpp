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

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "culturemod/core/culture.hpp"
#include "culturemod/model/logistic.hpp"
#include "culturemod/model/tokenizer.hpp"
#include "culturemod/model/transformer.hpp"

namespace culturemod::model {

enum class Stage { base = 0, media_diet = 1, rationale_tuned = 2, classifier_ready = 3 };

const char* to_string(Stage stage);
Stage stage_from_string(std::string_view name);

struct ProvenanceEntry {
  Stage stage = Stage::base;
  nlohmann::json details;  // dataset ids, schedule, seed, mode, final loss

  nlohmann::json to_json() const;
  static ProvenanceEntry from_json(const nlohmann::json& j);
};

struct ClassifierTrainingReport {
  std::vector<double> per_run_auroc;
  double mean_auroc = 0.0;
  double ci95_low = 0.0;
  double ci95_high = 0.0;
  std::vector<std::uint64_t> split_seeds;
  int redraws = 0;

  nlohmann::json to_json() const;
  static ClassifierTrainingReport from_json(const nlohmann::json& j);
};

// One culture's weights, tokenizer, optional head and stage history. Weights
// and tokenizer are shared immutable state; stage operations return new
// bundles rather than mutating their input.
struct CulturalModelBundle {
  CultureId culture;  // empty while stage == base
  Stage stage = Stage::base;
  std::shared_ptr<const Seq2SeqTransformer> model;
  std::shared_ptr<const Tokenizer> tokenizer;
  std::optional<LogisticHead> head;
  std::vector<ProvenanceEntry> provenance;
  // Decoder used for explanations when the classifier encoder comes from a
  // different stage-2 pass.
  std::shared_ptr<const CulturalModelBundle> explainer;

  void validate() const;
  // Short content digest of weights and head. Stable across save/load.
  std::string version() const;
};

using BundleMap = std::map<CultureId, std::shared_ptr<const CulturalModelBundle>>;

// Binary blob of every parameter whose name starts with `prefix`.
std::string serialize_weights(const Seq2SeqTransformer& model, std::string_view prefix);
// Overwrites matching parameters; shape or name mismatch is a configuration
// error.
void load_weights(Seq2SeqTransformer& model, std::string_view blob, std::string_view prefix);

std::string encoder_digest(const Seq2SeqTransformer& model);

// Directory layout: manifest.json, tokenizer.txt, encoder.bin, decoder.bin,
// classifier.json (when a head exists) and explainer/ (optional).
void save_bundle(const CulturalModelBundle& bundle, const std::filesystem::path& dir);
CulturalModelBundle load_bundle(const std::filesystem::path& dir);

struct BundleSummary {
  CultureId culture;
  Stage stage = Stage::base;
  std::string version;
};

// Reads only the manifest.
BundleSummary read_bundle_summary(const std::filesystem::path& dir);

}  // namespace culturemod::model
