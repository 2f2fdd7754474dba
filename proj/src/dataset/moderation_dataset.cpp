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


#include "culturemod/dataset/moderation_dataset.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <optional>
#include <thread>

#include "culturemod/core/error.hpp"
#include "culturemod/core/io.hpp"
#include "culturemod/core/random.hpp"
#include "culturemod/core/text.hpp"
#include "culturemod/dataset/highlights.hpp"

namespace culturemod::dataset {

using nlohmann::json;

const char* to_string(ModeratorAction action) {
  return action == ModeratorAction::flagged ? "flagged" : "no_action";
}

ModeratorAction moderator_action_from_string(std::string_view name) {
  if (name == "flagged") return ModeratorAction::flagged;
  if (name == "no_action") return ModeratorAction::no_action;
  throw Error(ErrorKind::invalid_argument, "unknown moderator action: " + std::string(name));
}

json RawModerationEvent::to_json() const {
  return {{"event_id", event_id},
          {"snippet", snippet},
          {"risk_score", risk_score},
          {"moderator_action", to_string(moderator_action)},
          {"highlights_freeform", highlights_freeform},
          {"rationale_freeform", rationale_freeform},
          {"boundary", boundary},
          {"origin_culture", origin_culture.code()},
          {"fyi", fyi}};
}

RawModerationEvent RawModerationEvent::from_json(const json& j) {
  RawModerationEvent e;
  try {
    e.event_id = j.at("event_id").get<std::string>();
    e.snippet = j.at("snippet").get<std::string>();
    e.risk_score = j.value("risk_score", 0.0);
    e.moderator_action = moderator_action_from_string(j.at("moderator_action").get<std::string>());
    e.highlights_freeform = j.value("highlights_freeform", std::string());
    e.rationale_freeform = j.value("rationale_freeform", std::string());
    e.boundary = j.value("boundary", std::string());
    e.origin_culture = CultureId(j.at("origin_culture").get<std::string>());
    e.fyi = j.value("fyi", false);
  } catch (const json::exception& ex) {
    throw Error(ErrorKind::invalid_argument, std::string("malformed event record: ") + ex.what());
  }
  return e;
}

void ModerationRecord::validate() const {
  if (label != 0 && label != 1) throw Error(ErrorKind::invalid_argument, record_id + ": label not 0/1");
  if (is_fyi && label != 0) throw Error(ErrorKind::invalid_argument, record_id + ": FYI with label 1");
  if (text::trim(snippet).empty()) throw Error(ErrorKind::invalid_argument, record_id + ": empty snippet");
  if (text::trim(rationale).empty()) {
    throw Error(ErrorKind::invalid_argument, record_id + ": empty rationale");
  }
  if (culture.empty()) throw Error(ErrorKind::invalid_argument, record_id + ": no culture");
}

json ModerationRecord::to_json() const {
  return {{"record_id", record_id}, {"snippet", snippet},       {"label", label},
          {"rationale", rationale}, {"culture", culture.code()}, {"policy_category", policy_category},
          {"is_fyi", is_fyi}};
}

ModerationRecord ModerationRecord::from_json(const json& j) {
  ModerationRecord r;
  try {
    r.record_id = j.at("record_id").get<std::string>();
    r.snippet = j.at("snippet").get<std::string>();
    r.label = j.at("label").get<int>();
    r.rationale = j.at("rationale").get<std::string>();
    r.culture = CultureId(j.at("culture").get<std::string>());
    r.policy_category = j.value("policy_category", std::string());
    r.is_fyi = j.value("is_fyi", false);
  } catch (const json::exception& ex) {
    throw Error(ErrorKind::invalid_argument, std::string("malformed moderation record: ") + ex.what());
  }
  r.validate();
  return r;
}

json DatasetCounts::to_json() const {
  json labels = json::object();
  for (const auto& [l, n] : per_label) labels[std::to_string(l)] = n;
  return {{"per_label", labels},
          {"per_culture", per_culture},
          {"per_category", per_category},
          {"fyi", fyi},
          {"rejected", rejected}};
}

DatasetCounts DatasetCounts::from_json(const json& j) {
  DatasetCounts c;
  for (const auto& [k, v] : j.at("per_label").items()) c.per_label[std::stoi(k)] = v.get<std::size_t>();
  c.per_culture = j.at("per_culture").get<std::map<std::string, std::size_t>>();
  c.per_category = j.at("per_category").get<std::map<std::string, std::size_t>>();
  c.fyi = j.at("fyi").get<std::size_t>();
  c.rejected = j.value("rejected", std::size_t{0});
  return c;
}

DatasetCounts tally(std::span<const ModerationRecord> records, std::size_t rejected) {
  DatasetCounts c;
  c.per_label[0] = 0;
  c.per_label[1] = 0;
  for (const auto& r : records) {
    ++c.per_label[r.label];
    ++c.per_culture[r.culture.code()];
    ++c.per_category[r.policy_category];
    if (r.is_fyi) ++c.fyi;
  }
  c.rejected = rejected;
  return c;
}

std::string country_name(const CultureId& id) {
  static const CultureRegistry registry = CultureRegistry::defaults();
  return registry.contains(id) ? registry.display_name(id) : id.code();
}

namespace {

std::string format_score(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Payload used for flagged events: the joined quotes, or the whole snippet
// when the notes quote nothing.
std::string highlight_payload(const RawModerationEvent& e, std::vector<std::string>* quotes = nullptr) {
  auto hl = extract_highlights(e.highlights_freeform);
  std::string joined = hl.empty() ? text::trim(e.snippet) : text::join(hl, " ");
  if (quotes) *quotes = std::move(hl);
  return joined;
}

}  // namespace

llm::ChatPrompt rationale_prompt(const RawModerationEvent& event, const CultureId& content_country,
                                 const CultureId& target_country, const TemplateSet& templates) {
  const bool violative = event.moderator_action == ModeratorAction::flagged;
  const auto& system = templates.require(TemplateRole::system);
  const auto& branch =
      templates.require(violative ? TemplateRole::violative : TemplateRole::non_violative);
  std::map<std::string, std::string> b = {{"content_country", country_name(content_country)},
                                          {"target_country", country_name(target_country)}};
  if (violative) {
    std::vector<std::string> quotes;
    const auto payload = highlight_payload(event, &quotes);
    std::string quoted;
    if (quotes.empty()) {
      quoted = "\"" + payload + "\"";
    } else {
      for (std::size_t i = 0; i < quotes.size(); ++i) {
        if (i) quoted += ' ';
        quoted += "\"" + quotes[i] + "\"";
      }
    }
    b["highlight"] = quoted;
    b["rationale"] = text::trim(event.rationale_freeform);
    b["boundary"] = event.boundary;
  } else {
    b["score"] = format_score(event.risk_score);
    b["content"] = text::trim(event.snippet);
  }
  llm::ChatPrompt prompt;
  prompt.system = system.render(b);
  prompt.user = branch.render(b);
  prompt.bindings = std::move(b);
  return prompt;
}

std::string standardize_rationale(const RawModerationEvent& event, llm::TextGenerator& llm,
                                  const CultureId& content_country, const CultureId& target_country,
                                  const TemplateSet& templates, int max_retries) {
  const auto prompt = rationale_prompt(event, content_country, target_country, templates);
  return text::trim(llm::generate_with_retry(llm, prompt, max_retries));
}

namespace {

struct Prepared {
  std::optional<ModerationRecord> record;
  std::string reject_reason;
};

}  // namespace

ModerationDataset build_dataset(std::span<const RawModerationEvent> events, llm::TextGenerator& llm,
                                std::uint64_t seed, const TemplateSet& templates,
                                const BuildOptions& options) {
  if (events.empty()) throw Error(ErrorKind::empty_input, "build_dataset needs at least one event");
  templates.require(TemplateRole::system);

  std::vector<std::size_t> positive_lengths;
  for (const auto& e : events) {
    if (e.moderator_action == ModeratorAction::flagged && !e.fyi &&
        !text::trim(e.rationale_freeform).empty()) {
      const auto n = text::token_count(highlight_payload(e));
      if (n > 0) positive_lengths.push_back(n);
    }
  }
  if (positive_lengths.empty()) {
    spdlog::warn("no positive events; negatives are kept at full length");
  }

  std::vector<Prepared> prepared(events.size());
  auto process = [&](std::size_t i) {
    const auto& e = events[i];
    Prepared& out = prepared[i];
    if (text::trim(e.snippet).empty()) {
      out.reject_reason = "empty snippet";
      return;
    }
    const bool flagged = e.moderator_action == ModeratorAction::flagged;
    if (flagged && text::trim(e.rationale_freeform).empty()) {
      out.reject_reason = "flagged without a rationale";
      return;
    }
    if (!flagged && e.fyi) {
      out.reject_reason = "FYI on a no-action event";
      return;
    }
    ModerationRecord r;
    r.record_id = e.event_id;
    r.culture = e.origin_culture;
    r.policy_category = e.boundary;
    r.is_fyi = flagged && e.fyi;
    r.label = flagged && !e.fyi ? 1 : 0;
    if (flagged) {
      r.snippet = highlight_payload(e);
    } else if (!positive_lengths.empty()) {
      auto rng = make_rng(seed, i);
      r.snippet = truncate_negative(text::trim(e.snippet), positive_lengths, rng);
    } else {
      r.snippet = text::trim(e.snippet);
    }
    r.rationale = standardize_rationale(e, llm, options.moderator_culture, e.origin_culture,
                                        templates, options.max_retries);
    if (r.rationale.empty()) {
      out.reject_reason = "empty standardized rationale";
      return;
    }
    out.record = std::move(r);
  };

  const std::size_t workers =
      std::max<std::size_t>(1, std::min(options.max_in_flight, events.size()));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(events.size());
  auto worker = [&] {
    for (std::size_t i = next++; i < events.size(); i = next++) {
      try {
        process(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }

  ModerationDataset ds;
  std::size_t rejected = 0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (prepared[i].record) {
      ds.records.push_back(std::move(*prepared[i].record));
    } else {
      spdlog::warn("rejected event {}: {}", events[i].event_id, prepared[i].reject_reason);
      ++rejected;
    }
  }
  ds.counts = tally(ds.records, rejected);
  return ds;
}

std::vector<RawModerationEvent> load_events(const std::filesystem::path& path) {
  std::vector<RawModerationEvent> out;
  for (const auto& row : io::read_jsonl(path)) out.push_back(RawModerationEvent::from_json(row));
  return out;
}

void save_events(const std::filesystem::path& path, std::span<const RawModerationEvent> events) {
  std::vector<json> rows;
  rows.reserve(events.size());
  for (const auto& e : events) rows.push_back(e.to_json());
  io::write_jsonl(path, rows);
}

std::filesystem::path counts_path(const std::filesystem::path& dataset_path) {
  auto p = dataset_path;
  p += ".counts.json";
  return p;
}

void save_dataset(const std::filesystem::path& path, const ModerationDataset& dataset) {
  std::vector<json> rows;
  rows.reserve(dataset.records.size());
  for (const auto& r : dataset.records) rows.push_back(r.to_json());
  io::write_jsonl(path, rows);
  io::write_json(counts_path(path), dataset.counts.to_json());
}

ModerationDataset load_dataset(const std::filesystem::path& path) {
  ModerationDataset ds;
  for (const auto& row : io::read_jsonl(path)) ds.records.push_back(ModerationRecord::from_json(row));
  std::size_t rejected = 0;
  const auto cp = counts_path(path);
  if (std::filesystem::exists(cp)) rejected = DatasetCounts::from_json(io::read_json(cp)).rejected;
  ds.counts = tally(ds.records, rejected);
  return ds;
}

}  // namespace culturemod::dataset
