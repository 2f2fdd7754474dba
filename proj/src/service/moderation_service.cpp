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


#include "culturemod/service/moderation_service.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdio>

#include "culturemod/core/error.hpp"
#include "culturemod/model/stages.hpp"

namespace culturemod::service {

using nlohmann::json;

void ModerationQuery::validate() const {
  if (content.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw Error(ErrorKind::empty_input, "content is empty");
  }
  if (cultures.empty()) throw Error(ErrorKind::invalid_argument, "no cultures requested");
  for (const auto& c : cultures) {
    if (c.empty()) throw Error(ErrorKind::invalid_argument, "empty culture code");
  }
}

ModerationQuery ModerationQuery::from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::invalid_argument, "request body must be an object");
  ModerationQuery q;
  try {
    q.content = j.at("content").get<std::string>();
    for (const auto& c : j.at("cultures")) q.cultures.emplace_back(c.get<std::string>());
    if (j.contains("moderator_culture") && !j["moderator_culture"].is_null()) {
      q.moderator_culture = CultureId(j["moderator_culture"].get<std::string>());
    }
    q.want_explanations = j.value("want_explanations", false);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::invalid_argument, std::string("malformed query: ") + e.what());
  }
  q.validate();
  return q;
}

json CulturalAssessment::to_json() const {
  json j = {{"culture", culture.code()}, {"probability", probability}, {"bundle_version", bundle_version}};
  j["explanation"] = explanation ? json(*explanation) : json(nullptr);
  return j;
}

json ReasoningTrace::to_json() const {
  json s = json::array();
  for (const auto& step : steps) {
    s.push_back({{"tool_invoked", step.tool_invoked.code()}, {"observation", step.observation.to_json()}});
  }
  return {{"steps", s}, {"summary", summary}, {"disagreement", disagreement}, {"degraded", degraded}};
}

namespace {

std::string first_sentence(const std::string& text) {
  const auto end = text.find_first_of(".!?");
  std::string s = end == std::string::npos ? text : text.substr(0, end + 1);
  const auto b = s.find_first_not_of(" \t\r\n");
  return b == std::string::npos ? std::string() : s.substr(b);
}

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string label(const CultureId& c) {
  static const CultureRegistry names = CultureRegistry::defaults();
  if (names.contains(c)) return names.display_name(c) + " (" + c.code() + ")";
  return c.code();
}

}  // namespace

bool has_disagreement(const std::vector<ReasoningStep>& steps, double threshold) {
  if (steps.size() < 2) return false;
  const auto [lo, hi] = std::minmax_element(steps.begin(), steps.end(), [](const auto& a, const auto& b) {
    return a.observation.probability < b.observation.probability;
  });
  return hi->observation.probability - lo->observation.probability > threshold;
}

std::string template_summary(const std::vector<ReasoningStep>& steps,
                             const std::optional<CultureId>& moderator_culture, double threshold) {
  std::string out;
  if (moderator_culture) out += "Moderator culture: " + label(*moderator_culture) + "\n";
  for (const auto& step : steps) {
    const auto& o = step.observation;
    out += "- " + label(step.tool_invoked) + ": probability " + fixed3(o.probability);
    if (o.explanation && !o.explanation->empty()) out += ". " + first_sentence(*o.explanation);
    out += "\n";
  }
  if (has_disagreement(steps, threshold)) {
    const auto [lo, hi] = std::minmax_element(steps.begin(), steps.end(), [](const auto& a, const auto& b) {
      return a.observation.probability < b.observation.probability;
    });
    out += "Disagreement: " + label(hi->tool_invoked) + " at " + fixed3(hi->observation.probability) +
           " vs " + label(lo->tool_invoked) + " at " + fixed3(lo->observation.probability) +
           "; spread exceeds " + fixed3(threshold) + "\n";
  }
  return out;
}

ModerationService::ModerationService(std::shared_ptr<BundleRegistry> registry,
                                     model::DecodingConfig decoding, ReasonOptions reason,
                                     std::shared_ptr<llm::TextGenerator> summarizer)
    : registry_(std::move(registry)), decoding_(decoding), reason_(reason), summarizer_(std::move(summarizer)) {
  if (!registry_) throw Error(ErrorKind::configuration, "service needs a registry");
  decoding_.validate();
}

std::vector<std::shared_ptr<const model::CulturalModelBundle>> ModerationService::resolve(
    const ModerationQuery& query) const {
  query.validate();
  for (const auto& c : query.cultures) {
    if (!registry_->contains(c)) throw Error(ErrorKind::not_found, "unknown culture " + c.code());
  }
  std::vector<std::shared_ptr<const model::CulturalModelBundle>> out;
  for (const auto& c : query.cultures) {
    auto b = registry_->get(c);
    if (b->stage != model::Stage::classifier_ready || !b->head) {
      throw Error(ErrorKind::unavailable, "bundle for " + c.code() + " is not classifier_ready");
    }
    out.push_back(std::move(b));
  }
  return out;
}

CulturalAssessment ModerationService::assess_one(const model::CulturalModelBundle& bundle,
                                                 const std::string& content, bool explain) const {
  CulturalAssessment a;
  a.culture = bundle.culture;
  a.probability = model::predict_violation(bundle, content);
  a.bundle_version = bundle.version();
  if (explain) a.explanation = model::generate_explanation(bundle, content, decoding_);
  return a;
}

std::vector<CulturalAssessment> ModerationService::assess(const ModerationQuery& query) const {
  const auto bundles = resolve(query);
  std::vector<CulturalAssessment> out;
  out.reserve(bundles.size());
  for (std::size_t i = 0; i < bundles.size(); ++i) {
    auto a = assess_one(*bundles[i], query.content, query.want_explanations);
    a.culture = query.cultures[i];
    out.push_back(std::move(a));
  }
  return out;
}

ReasoningTrace ModerationService::reason(const ModerationQuery& query) const {
  const auto bundles = resolve(query);
  ReasoningTrace trace;
  for (std::size_t i = 0; i < bundles.size(); ++i) {
    auto a = assess_one(*bundles[i], query.content, true);
    a.culture = query.cultures[i];
    trace.steps.push_back({query.cultures[i], std::move(a)});
  }
  trace.disagreement = has_disagreement(trace.steps, reason_.disagreement_threshold);
  const auto fallback = template_summary(trace.steps, query.moderator_culture, reason_.disagreement_threshold);
  if (!summarizer_) {
    trace.summary = fallback;
    return trace;
  }
  llm::ChatPrompt prompt;
  prompt.system =
      "You brief a content moderator. Summarize the per-culture model outputs below in a few "
      "sentences, name every culture, and point out where they disagree.";
  prompt.user = "Content: " + query.content + "\n\nObservations:\n" + fallback;
  prompt.bindings = {{"content", query.content}, {"observations", fallback}};
  if (query.moderator_culture) prompt.bindings["moderator_culture"] = query.moderator_culture->code();
  try {
    trace.summary = llm::generate_with_retry(*summarizer_, prompt, 1);
    // A summary that drops a culture is not usable.
    for (const auto& c : query.cultures) {
      if (trace.summary.find(c.code()) == std::string::npos) {
        throw Error(ErrorKind::retriable, "summary omits " + c.code());
      }
    }
  } catch (const std::exception& e) {
    spdlog::warn("summarizer failed, using template: {}", e.what());
    trace.summary = fallback;
    trace.degraded = true;
  }
  return trace;
}

}  // namespace culturemod::service
