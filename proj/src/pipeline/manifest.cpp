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


#include "culturemod/pipeline/manifest.hpp"

#include <set>

#include "culturemod/core/error.hpp"
#include "culturemod/core/io.hpp"
#include "culturemod/core/random.hpp"
#include "culturemod/core/timestamp.hpp"
#include "culturemod/version.hpp"

namespace culturemod::pipeline {

using nlohmann::json;
namespace fs = std::filesystem;

json to_json(const ingestion::IngestOptions& o) {
  json j = {{"top_sources", o.top_sources}, {"cap", o.cap}, {"histogram_bins", o.histogram_bins}};
  j["window_days"] = o.window_days ? json(*o.window_days) : json(nullptr);
  j["now"] = o.now ? json(format_iso8601(*o.now)) : json(nullptr);
  return j;
}

ingestion::IngestOptions ingest_options_from_json(const json& j) {
  ingestion::IngestOptions o;
  o.top_sources = j.value("top_sources", o.top_sources);
  o.cap = j.value("cap", o.cap);
  o.histogram_bins = j.value("histogram_bins", o.histogram_bins);
  if (j.contains("window_days") && !j["window_days"].is_null()) o.window_days = j["window_days"].get<int>();
  if (j.contains("now") && !j["now"].is_null()) o.now = parse_iso8601(j["now"].get<std::string>());
  return o;
}

json to_json(const dataset::BuildOptions& o) {
  return {{"moderator_culture", o.moderator_culture.code()},
          {"max_in_flight", o.max_in_flight},
          {"max_retries", o.max_retries}};
}

dataset::BuildOptions build_options_from_json(const json& j) {
  dataset::BuildOptions o;
  o.moderator_culture = CultureId(j.value("moderator_culture", o.moderator_culture.code()));
  o.max_in_flight = j.value("max_in_flight", o.max_in_flight);
  o.max_retries = j.value("max_retries", o.max_retries);
  return o;
}

json to_json(const model::HeadTrainingOptions& o) {
  return {{"iterations", o.iterations},
          {"test_fraction", o.test_fraction},
          {"c", o.logistic.c},
          {"max_iterations", o.logistic.max_iterations},
          {"tolerance", o.logistic.tolerance}};
}

model::HeadTrainingOptions head_options_from_json(const json& j) {
  model::HeadTrainingOptions o;
  o.iterations = j.value("iterations", o.iterations);
  o.test_fraction = j.value("test_fraction", o.test_fraction);
  o.logistic.c = j.value("c", o.logistic.c);
  o.logistic.max_iterations = j.value("max_iterations", o.logistic.max_iterations);
  o.logistic.tolerance = j.value("tolerance", o.logistic.tolerance);
  return o;
}

Seeds Seeds::from_root(std::uint64_t root) {
  Seeds s;
  std::uint64_t* fields[] = {&s.split, &s.dataset, &s.init, &s.stage1, &s.stage2, &s.head, &s.study, &s.kendall};
  for (std::size_t i = 0; i < std::size(fields); ++i) *fields[i] = derive_seed(root, i + 1);
  return s;
}

json StageRecord::to_json() const { return {{"input_digest", input_digest}, {"outputs", outputs}}; }

StageRecord StageRecord::from_json(const json& j) {
  StageRecord r;
  r.input_digest = j.at("input_digest").get<std::string>();
  r.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
  return r;
}

fs::path ExperimentManifest::resolve(const fs::path& p) const {
  return p.is_absolute() ? p : base_dir / p;
}

void ExperimentManifest::validate() const {
  if (experiment_id.empty()) throw Error(ErrorKind::invalid_argument, "manifest needs an experiment_id");
  if (cultures.empty()) throw Error(ErrorKind::invalid_argument, "manifest culture set is empty");
  std::set<CultureId> seen;
  for (const auto& c : cultures) {
    if (c.empty() || !seen.insert(c).second) {
      throw Error(ErrorKind::invalid_argument, "culture set has empty or repeated codes");
    }
  }
  std::vector<fs::path> inputs = {data.articles, data.events};
  if (data.templates) inputs.push_back(*data.templates);
  if (data.pretrained) inputs.push_back(*data.pretrained);
  if (data.summarizer.rfind("reference:", 0) == 0) inputs.emplace_back(data.summarizer.substr(10));
  for (const auto& p : inputs) {
    if (p.empty() || !fs::exists(resolve(p))) {
      throw Error(ErrorKind::not_found, "manifest input " + p.string() + " does not exist");
    }
  }
  auto shape = model.config;
  shape.vocab_size = 1;  // set from the tokenizer at init
  shape.validate();
  schedules.stage1.validate();
  schedules.stage2.validate();
  schedules.stage2_all.validate();
  evaluation.decoding.validate();
  if (evaluation.heatmap_holdout < 1) throw Error(ErrorKind::invalid_argument, "heatmap_holdout must be >= 1");
  if (evaluation.study_items < 0) throw Error(ErrorKind::invalid_argument, "study_items must be >= 0");
}

json ExperimentManifest::to_json() const {
  json cs = json::array();
  for (const auto& c : cultures) cs.push_back(c.code());
  json d = {{"articles", data.articles.string()},
            {"events", data.events.string()},
            {"summarizer", data.summarizer},
            {"rationale_llm", data.rationale_llm}};
  d["templates"] = data.templates ? json(data.templates->string()) : json(nullptr);
  d["pretrained"] = data.pretrained ? json(data.pretrained->string()) : json(nullptr);
  d["annotations"] = data.annotations ? json(data.annotations->string()) : json(nullptr);
  json st = json::object();
  for (const auto& [name, rec] : stages) st[name] = rec.to_json();
  return {
      {"experiment_id", experiment_id},
      {"tool_version", tool_version.empty() ? std::string(kToolVersion) : tool_version},
      {"cultures", cs},
      {"data", d},
      {"work_dir", work_dir.string()},
      {"model", {{"config", model.config.to_json()}, {"tokenizer", model.tokenizer}, {"vocab_budget", model.vocab_budget}}},
      {"ingest", pipeline::to_json(ingest)},
      {"dataset", pipeline::to_json(dataset)},
      {"schedules",
       {{"stage1", schedules.stage1.to_json()},
        {"stage2", schedules.stage2.to_json()},
        {"stage2_all", schedules.stage2_all.to_json()},
        {"head", pipeline::to_json(schedules.head)}}},
      {"evaluation",
       {{"decoding", evaluation.decoding.to_json()},
        {"heatmap_holdout", evaluation.heatmap_holdout},
        {"study_items", evaluation.study_items},
        {"kendall_bootstrap", evaluation.kendall_bootstrap},
        {"kendall_permutation", evaluation.kendall_permutation}}},
      {"seeds",
       {{"split", seeds.split},
        {"dataset", seeds.dataset},
        {"init", seeds.init},
        {"stage1", seeds.stage1},
        {"stage2", seeds.stage2},
        {"head", seeds.head},
        {"study", seeds.study},
        {"kendall", seeds.kendall}}},
      {"stages", st},
  };
}

namespace {

std::optional<fs::path> opt_path(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return fs::path(j[key].get<std::string>());
}

}  // namespace

ExperimentManifest ExperimentManifest::from_json(const json& j, const fs::path& base_dir) {
  ExperimentManifest m;
  m.base_dir = base_dir;
  try {
    m.experiment_id = j.at("experiment_id").get<std::string>();
    m.tool_version = j.value("tool_version", std::string(kToolVersion));
    for (const auto& c : j.at("cultures")) m.cultures.emplace_back(c.get<std::string>());
    const auto& d = j.at("data");
    m.data.articles = d.at("articles").get<std::string>();
    m.data.events = d.at("events").get<std::string>();
    m.data.summarizer = d.value("summarizer", m.data.summarizer);
    m.data.rationale_llm = d.value("rationale_llm", m.data.rationale_llm);
    m.data.templates = opt_path(d, "templates");
    m.data.pretrained = opt_path(d, "pretrained");
    m.data.annotations = opt_path(d, "annotations");
    m.work_dir = j.value("work_dir", m.work_dir.string());
    if (j.contains("model")) {
      const auto& mo = j["model"];
      if (mo.contains("config")) m.model.config = model::EncoderDecoderConfig::from_json(mo["config"]);
      m.model.tokenizer = mo.value("tokenizer", m.model.tokenizer);
      m.model.vocab_budget = mo.value("vocab_budget", m.model.vocab_budget);
    }
    if (j.contains("ingest")) m.ingest = ingest_options_from_json(j["ingest"]);
    if (j.contains("dataset")) m.dataset = build_options_from_json(j["dataset"]);
    if (j.contains("schedules")) {
      const auto& s = j["schedules"];
      if (s.contains("stage1")) m.schedules.stage1 = model::TrainingSchedule::from_json(s["stage1"]);
      if (s.contains("stage2")) m.schedules.stage2 = model::TrainingSchedule::from_json(s["stage2"]);
      if (s.contains("stage2_all")) {
        m.schedules.stage2_all = model::TrainingSchedule::from_json(s["stage2_all"]);
      } else {
        m.schedules.stage2_all = m.schedules.stage2;
      }
      if (s.contains("head")) m.schedules.head = head_options_from_json(s["head"]);
    }
    if (j.contains("evaluation")) {
      const auto& e = j["evaluation"];
      if (e.contains("decoding")) m.evaluation.decoding = model::DecodingConfig::from_json(e["decoding"]);
      m.evaluation.heatmap_holdout = e.value("heatmap_holdout", m.evaluation.heatmap_holdout);
      m.evaluation.study_items = e.value("study_items", m.evaluation.study_items);
      m.evaluation.kendall_bootstrap = e.value("kendall_bootstrap", m.evaluation.kendall_bootstrap);
      m.evaluation.kendall_permutation = e.value("kendall_permutation", m.evaluation.kendall_permutation);
    }
    // A bare root seed expands to every stream; explicit entries win.
    m.seeds = Seeds::from_root(j.value("seed", std::uint64_t{0}));
    if (j.contains("seeds")) {
      const auto& s = j["seeds"];
      m.seeds.split = s.value("split", m.seeds.split);
      m.seeds.dataset = s.value("dataset", m.seeds.dataset);
      m.seeds.init = s.value("init", m.seeds.init);
      m.seeds.stage1 = s.value("stage1", m.seeds.stage1);
      m.seeds.stage2 = s.value("stage2", m.seeds.stage2);
      m.seeds.head = s.value("head", m.seeds.head);
      m.seeds.study = s.value("study", m.seeds.study);
      m.seeds.kendall = s.value("kendall", m.seeds.kendall);
    }
    if (j.contains("stages")) {
      for (const auto& [name, rec] : j["stages"].items()) m.stages[name] = StageRecord::from_json(rec);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::configuration, std::string("malformed manifest: ") + e.what());
  }
  return m;
}

ExperimentManifest load_manifest(const fs::path& path) {
  auto base = path.parent_path();
  if (base.empty()) base = ".";
  return ExperimentManifest::from_json(io::read_json(path), base);
}

void save_manifest(const ExperimentManifest& manifest, const fs::path& path) {
  for (const auto& [stage, rec] : manifest.stages) {
    for (const auto& [rel, digest] : rec.outputs) {
      if (!fs::exists(manifest.work() / rel)) {
        throw Error(ErrorKind::io, "stage " + stage + " output " + rel + " is missing");
      }
    }
  }
  io::write_json(path, manifest.to_json());
}

}  // namespace culturemod::pipeline
