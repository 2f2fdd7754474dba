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

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "culturemod/core/culture.hpp"
#include "culturemod/core/text_generator.hpp"
#include "culturemod/model/beam_search.hpp"
#include "culturemod/service/registry.hpp"

namespace culturemod::service {

struct ModerationQuery {
  std::string content;
  std::vector<CultureId> cultures;
  std::optional<CultureId> moderator_culture;
  bool want_explanations = false;

  // Shape only; registration is checked against the registry.
  void validate() const;
  static ModerationQuery from_json(const nlohmann::json& j);
};

struct CulturalAssessment {
  CultureId culture;
  double probability = 0.0;
  std::optional<std::string> explanation;
  std::string bundle_version;

  nlohmann::json to_json() const;
};

struct ReasoningStep {
  CultureId tool_invoked;
  CulturalAssessment observation;
};

struct ReasoningTrace {
  std::vector<ReasoningStep> steps;
  std::string summary;
  bool disagreement = false;
  bool degraded = false;  // summarizer failed, template used instead

  nlohmann::json to_json() const;
};

struct ReasonOptions {
  double disagreement_threshold = 0.25;
};

// Deterministic summary: optional moderator line, one line per culture with
// probability and the first sentence of its explanation, and a disagreement
// line when max - min probability exceeds the threshold.
std::string template_summary(const std::vector<ReasoningStep>& steps,
                             const std::optional<CultureId>& moderator_culture, double threshold);
bool has_disagreement(const std::vector<ReasoningStep>& steps, double threshold);

class ModerationService {
 public:
  ModerationService(std::shared_ptr<BundleRegistry> registry, model::DecodingConfig decoding = {},
                    ReasonOptions reason = {},
                    std::shared_ptr<llm::TextGenerator> summarizer = nullptr);

  // One assessment per requested culture, in request order.
  std::vector<CulturalAssessment> assess(const ModerationQuery& query) const;
  // Always requests explanations; they feed the summary.
  ReasoningTrace reason(const ModerationQuery& query) const;

  BundleRegistry& registry() const { return *registry_; }
  const ReasonOptions& reason_options() const { return reason_; }

 private:
  CulturalAssessment assess_one(const model::CulturalModelBundle& bundle, const std::string& content,
                                bool explain) const;
  std::vector<std::shared_ptr<const model::CulturalModelBundle>> resolve(
      const ModerationQuery& query) const;

  std::shared_ptr<BundleRegistry> registry_;
  model::DecodingConfig decoding_;
  ReasonOptions reason_;
  std::shared_ptr<llm::TextGenerator> summarizer_;
};

}  // namespace culturemod::service
