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


#include "culturemod/pipeline/pipeline.hpp"

#include <fcntl.h>
#include <spdlog/spdlog.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <numeric>

#include "culturemod/core/digest.hpp"
#include "culturemod/core/error.hpp"
#include "culturemod/core/io.hpp"
#include "culturemod/core/random.hpp"
#include "culturemod/core/text_generator.hpp"
#include "culturemod/eval/heatmap.hpp"
#include "culturemod/eval/metrics.hpp"
#include "culturemod/eval/score_report.hpp"
#include "culturemod/eval/study.hpp"
#include "culturemod/ingestion/summarizer.hpp"
#include "culturemod/pipeline/report.hpp"

namespace culturemod::pipeline {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class WorkLock {
 public:
  explicit WorkLock(const fs::path& path) {
    fd_ = ::open(path.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error(ErrorKind::io, "cannot open lockfile " + path.string());
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      ::close(fd_);
      throw Error(ErrorKind::conflict, "another run holds " + path.string());
    }
  }
  ~WorkLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  WorkLock(const WorkLock&) = delete;
  WorkLock& operator=(const WorkLock&) = delete;

 private:
  int fd_ = -1;
};

std::map<std::string, std::string> digest_outputs(const fs::path& work, const std::string& stage) {
  std::map<std::string, std::string> out;
  const auto dir = work / stage;
  if (!fs::exists(dir)) return out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    out[fs::relative(e.path(), work).generic_string()] = sha256_file(e.path());
  }
  return out;
}

bool outputs_intact(const fs::path& work, const StageRecord& rec) {
  if (rec.outputs.empty()) return false;
  for (const auto& [rel, digest] : rec.outputs) {
    const auto p = work / rel;
    if (!fs::exists(p) || sha256_file(p) != digest) return false;
  }
  return true;
}

std::string culture_file(const std::string& dir, const CultureId& c, const char* suffix) {
  return dir + "/" + c.code() + suffix;
}

model::TrainingSchedule seeded(model::TrainingSchedule s, std::uint64_t seed, const CultureId& c) {
  s.seed = derive_seed(seed, stable_hash(c.code()));
  return s;
}

dataset::ModerationDataset only_culture(const dataset::ModerationDataset& all, const CultureId& c) {
  dataset::ModerationDataset out;
  for (const auto& r : all.records) {
    if (r.culture == c) out.records.push_back(r);
  }
  out.counts = dataset::tally(out.records);
  return out;
}

class Runner {
 public:
  Runner(ExperimentManifest& m) : m_(m), work_(m.work()) {}

  // Stage config and the upstream artifacts it consumes.
  std::string input_digest(const std::string& stage) const {
    json j = {{"stage", stage}, {"tool_version", m_.to_json()["tool_version"]}};
    const auto full = m_.to_json();
    json cultures = full["cultures"];
    auto upstream = [&](std::initializer_list<const char*> names) {
      json u = json::object();
      for (const char* n : names) u[n] = stage_digest(m_, n);
      return u;
    };
    auto file = [&](const fs::path& p) { return sha256_tree(m_.resolve(p)); };
    if (stage == "ingest") {
      j["config"] = {{"cultures", cultures}, {"ingest", full["ingest"]},
                     {"summarizer", m_.data.summarizer}, {"holdout", m_.evaluation.heatmap_holdout},
                     {"seed", m_.seeds.split}};
      j["inputs"] = {{"articles", file(m_.data.articles)}};
      if (m_.data.summarizer.rfind("reference:", 0) == 0) {
        j["inputs"]["summaries"] = file(m_.data.summarizer.substr(10));
      }
    } else if (stage == "dataset") {
      j["config"] = {{"dataset", full["dataset"]}, {"llm", m_.data.rationale_llm}, {"seed", m_.seeds.dataset}};
      j["inputs"] = {{"events", file(m_.data.events)}};
      if (m_.data.templates) j["inputs"]["templates"] = file(*m_.data.templates);
    } else if (stage == "init") {
      j["config"] = {{"model", full["model"]}, {"seed", m_.seeds.init}};
      j["upstream"] = upstream({"ingest", "dataset"});
      if (m_.data.pretrained) j["inputs"] = {{"pretrained", file(*m_.data.pretrained)}};
    } else if (stage == "stage1") {
      j["config"] = {{"cultures", cultures}, {"schedule", full["schedules"]["stage1"]}, {"seed", m_.seeds.stage1}};
      j["upstream"] = upstream({"ingest", "init"});
    } else if (stage == "stage2") {
      j["config"] = {{"cultures", cultures},
                     {"schedule", full["schedules"]["stage2"]},
                     {"schedule_all", full["schedules"]["stage2_all"]},
                     {"seed", m_.seeds.stage2}};
      j["upstream"] = upstream({"dataset", "stage1"});
    } else if (stage == "stage3") {
      j["config"] = {{"cultures", cultures}, {"head", full["schedules"]["head"]}, {"seed", m_.seeds.head}};
      j["upstream"] = upstream({"dataset", "stage2"});
    } else if (stage == "evaluate") {
      j["config"] = {{"cultures", cultures},
                     {"evaluation", full["evaluation"]},
                     {"head", full["schedules"]["head"]},
                     {"seeds", {m_.seeds.head, m_.seeds.study}}};
      j["upstream"] = upstream({"ingest", "dataset", "init", "stage1", "stage3"});
    } else if (stage == "report") {
      j["config"] = {{"evaluation", full["evaluation"]}, {"seed", m_.seeds.kendall}, {"id", m_.experiment_id}};
      j["upstream"] = upstream({"evaluate"});
      if (m_.data.annotations) j["inputs"] = {{"annotations", file(*m_.data.annotations)}};
    } else {
      throw Error(ErrorKind::invalid_argument, "unknown stage " + stage);
    }
    return sha256_hex(j.dump());
  }

  void run(const std::string& stage) {
    const auto dir = work_ / stage;
    fs::remove_all(dir);
    fs::create_directories(dir);
    if (stage == "ingest") ingest();
    else if (stage == "dataset") build_dataset();
    else if (stage == "init") init();
    else if (stage == "stage1") stage1();
    else if (stage == "stage2") stage2();
    else if (stage == "stage3") stage3();
    else if (stage == "evaluate") evaluate();
    else if (stage == "report") io::write_file(dir / "report.txt", render_report(m_));
  }

 private:
  fs::path at(const std::string& rel) const { return work_ / rel; }

  std::string summarizer_spec() const {
    const auto& s = m_.data.summarizer;
    if (s.rfind("reference:", 0) == 0) return "reference:" + m_.resolve(s.substr(10)).string();
    return s;
  }

  std::shared_ptr<const model::CulturalModelBundle> bundle(const std::string& rel) const {
    return std::make_shared<const model::CulturalModelBundle>(model::load_bundle(at(rel)));
  }

  void ingest() {
    const auto articles = ingestion::load_articles(m_.resolve(m_.data.articles));
    auto summarizer = ingestion::make_summarizer(summarizer_spec());
    auto diets = ingestion::build_media_diets(articles, m_.cultures, m_.ingest, *summarizer);
    for (const auto& c : m_.cultures) {
      auto& d = diets.at(c);
      const auto holdout = static_cast<std::size_t>(m_.evaluation.heatmap_holdout);
      if (d.pairs.size() <= holdout) {
        throw Error(ErrorKind::empty_input, c.code() + " media diet has " + std::to_string(d.pairs.size()) +
                                                " pairs, not enough for a holdout of " + std::to_string(holdout));
      }
      std::vector<std::size_t> order(d.pairs.size());
      std::iota(order.begin(), order.end(), 0);
      auto rng = make_rng(m_.seeds.split, stable_hash(c.code()));
      culturemod::shuffle(order.begin(), order.end(), rng);
      ingestion::MediaDietDataset train{c, {}, {}, d.diagnostics}, test{c, {}, {}, d.diagnostics};
      for (std::size_t k = 0; k < order.size(); ++k) {
        auto& dst = k < holdout ? test : train;
        dst.pairs.push_back(d.pairs[order[k]]);
        dst.facets.push_back(d.facets[order[k]]);
      }
      ingestion::save_media_diet(at(culture_file("ingest", c, ".train.jsonl")), train);
      ingestion::save_media_diet(at(culture_file("ingest", c, ".test.jsonl")), test);
    }
  }

  void build_dataset() {
    const auto events = dataset::load_events(m_.resolve(m_.data.events));
    auto llm = llm::make_text_generator(m_.data.rationale_llm);
    const auto templates = m_.data.templates ? dataset::TemplateSet::load(m_.resolve(*m_.data.templates))
                                              : dataset::TemplateSet::defaults();
    const auto ds = dataset::build_dataset(events, *llm, m_.seeds.dataset, templates, m_.dataset);
    dataset::save_dataset(at("dataset/dataset.jsonl"), ds);
  }

  void init() {
    model::CulturalModelBundle base;
    if (m_.data.pretrained) {
      base = model::load_bundle(m_.resolve(*m_.data.pretrained));
      if (base.stage != model::Stage::base) {
        throw Error(ErrorKind::configuration, "pretrained bundle must be a base-stage bundle");
      }
    } else {
      std::vector<std::string> corpus;
      for (const auto& c : m_.cultures) {
        for (const auto& p : ingestion::load_media_diet(at(culture_file("ingest", c, ".train.jsonl"))).pairs) {
          corpus.push_back(p.article_text);
          corpus.push_back(p.summary_text);
        }
      }
      for (const auto& r : dataset::load_dataset(at("dataset/dataset.jsonl")).records) {
        corpus.push_back(r.snippet);
        corpus.push_back(r.rationale);
      }
      std::shared_ptr<const model::Tokenizer> tok =
          model::train_tokenizer(m_.model.tokenizer, corpus, m_.model.vocab_budget);
      auto cfg = m_.model.config;
      cfg.vocab_size = tok->vocab_size();
      cfg.tokenizer_id = tok->id();
      base = model::init_base_model(cfg, tok, m_.seeds.init);
    }
    model::save_bundle(base, at("init/base"));
  }

  void stage1() {
    const auto base = model::load_bundle(at("init/base"));
    for (const auto& c : m_.cultures) {
      const auto diet = ingestion::load_media_diet(at(culture_file("ingest", c, ".train.jsonl")));
      auto r = model::finetune_summarization(base, diet, seeded(m_.schedules.stage1, m_.seeds.stage1, c));
      model::save_bundle(r.bundle, at("stage1/" + c.code()));
      io::write_json(at(culture_file("stage1", c, ".log.json")), r.log.to_json());
    }
  }

  void stage2() {
    const auto records = dataset::load_dataset(at("dataset/dataset.jsonl"));
    for (const auto& c : m_.cultures) {
      const auto m1 = model::load_bundle(at("stage1/" + c.code()));
      auto s = model::finetune_rationales(m1, records, model::RationaleMode::stratified,
                                          seeded(m_.schedules.stage2, m_.seeds.stage2, c));
      model::save_bundle(s.bundle, at("stage2/stratified/" + c.code()));
      io::write_json(at(culture_file("stage2/stratified", c, ".log.json")), s.log.to_json());
      if (m_.schedules.stage2_all.total_steps > 0) {
        auto a = model::finetune_rationales(
            m1, records, model::RationaleMode::all,
            seeded(m_.schedules.stage2_all, derive_seed(m_.seeds.stage2, 1), c));
        model::save_bundle(a.bundle, at("stage2/all/" + c.code()));
        io::write_json(at(culture_file("stage2/all", c, ".log.json")), a.log.to_json());
      }
    }
  }

  void stage3() {
    const auto records = dataset::load_dataset(at("dataset/dataset.jsonl"));
    for (const auto& c : m_.cultures) {
      const auto m2 = model::load_bundle(at("stage2/stratified/" + c.code()));
      auto opts = m_.schedules.head;
      opts.seed = m_.seeds.head;
      const auto before = model::encoder_digest(*m2.model);
      auto r = model::train_classifier_head(m2, only_culture(records, c), opts);
      if (model::encoder_digest(*r.bundle.model) != before) {
        throw Error(ErrorKind::diverged, "encoder changed while fitting the head for " + c.code());
      }
      if (fs::exists(at("stage2/all/" + c.code()))) {
        r.bundle = model::attach_explainer(r.bundle, model::load_bundle(at("stage2/all/" + c.code())));
      }
      model::save_bundle(r.bundle, at("stage3/" + c.code()));
      io::write_json(at(culture_file("stage3", c, ".report.json")), r.report.to_json());
    }
  }

  void evaluate() {
    const auto base = bundle("init/base");
    const auto records = dataset::load_dataset(at("dataset/dataset.jsonl"));
    model::BundleMap stage1, classifiers;
    std::map<CultureId, std::vector<ingestion::SummaryPair>> tests;
    for (const auto& c : m_.cultures) {
      stage1[c] = bundle("stage1/" + c.code());
      classifiers[c] = bundle("stage3/" + c.code());
      tests[c] = ingestion::load_media_diet(at(culture_file("ingest", c, ".test.jsonl"))).pairs;
    }
    const auto heat = eval::cross_culture_heatmap(m_.cultures, stage1, tests, *base, m_.evaluation.decoding);
    io::write_json(at("evaluate/heatmap.json"), heat.to_json());

    auto head = m_.schedules.head;
    head.seed = m_.seeds.head;
    json au = json::object();
    for (const auto& t : m_.cultures) {
      const auto own = only_culture(records, t);
      std::vector<std::string> snippets;
      std::vector<int> labels;
      for (const auto& r : own.records) {
        snippets.push_back(r.snippet);
        labels.push_back(r.label);
      }
      std::map<std::string, model::ClassifierTrainingReport> runs;
      runs["base"] = model::cross_validate_head(model::encode_cls(*base, snippets), labels, head);
      for (const auto& c : m_.cultures) {
        runs[c.code()] = model::cross_validate_head(model::encode_cls(*classifiers[c], snippets), labels, head);
      }
      json models = json::object();
      for (const auto& [name, rep] : runs) models[name] = rep.to_json();
      json welch = json::object();
      const auto& mine = runs.at(t.code()).per_run_auroc;
      for (const auto& [name, rep] : runs) {
        if (name == t.code()) continue;
        welch[name] = eval::welch_t_test(mine, rep.per_run_auroc).to_json();
      }
      au[t.code()] = {{"records", own.records.size()}, {"models", models}, {"welch_vs", welch}};
    }
    io::write_json(at("evaluate/auroc.json"), au);

    for (const auto& c : m_.cultures) {
      std::vector<eval::Prediction> preds;
      for (const auto& r : records.records) preds.emplace_back(r, model::predict_violation(*classifiers[c], r.snippet));
      io::write_json(at(culture_file("evaluate/scores", c, ".json")),
                     eval::score_distribution_report(preds, c).to_json());
    }

    if (m_.evaluation.study_items > 0) {
      for (const auto& t : m_.cultures) {
        std::vector<CultureId> distractors;
        for (const auto& c : m_.cultures) {
          if (c != t && distractors.size() < 3) distractors.push_back(c);
        }
        const auto study = eval::build_human_eval_study(records, t, distractors, classifiers,
                                                        m_.evaluation.study_items,
                                                        derive_seed(m_.seeds.study, stable_hash(t.code())),
                                                        m_.evaluation.decoding);
        io::write_json(at(culture_file("evaluate/study", t, ".json")), study.to_json());
        io::write_file(at(culture_file("evaluate/study", t, ".txt")), eval::format_study_text(study));
      }
    }
  }

  ExperimentManifest& m_;
  fs::path work_;
};

}  // namespace

std::string stage_digest(const ExperimentManifest& manifest, const std::string& stage) {
  auto it = manifest.stages.find(stage);
  if (it == manifest.stages.end()) return {};
  return sha256_hex(json(it->second.outputs).dump());
}

RunSummary run_pipeline(ExperimentManifest& manifest, const fs::path& manifest_path, const RunOptions& options) {
  manifest.validate();
  if (options.until && std::find(std::begin(kStages), std::end(kStages), *options.until) == std::end(kStages)) {
    throw Error(ErrorKind::invalid_argument, "unknown stage " + *options.until);
  }
  const auto work = manifest.work();
  fs::create_directories(work);
  WorkLock lock(work / ".lock");
  Runner runner(manifest);
  RunSummary summary;
  for (const char* name : kStages) {
    const std::string stage = name;
    const auto digest = runner.input_digest(stage);
    auto it = manifest.stages.find(stage);
    if (!options.force && it != manifest.stages.end() && it->second.input_digest == digest &&
        outputs_intact(work, it->second)) {
      spdlog::info("stage {}: up to date", stage);
      summary.skipped.push_back(stage);
    } else {
      spdlog::info("stage {}: running", stage);
      manifest.stages.erase(stage);
      try {
        runner.run(stage);
      } catch (const Error& e) {
        save_manifest(manifest, manifest_path);
        throw Error(e.kind(), "stage " + stage + " failed: " + e.what());
      } catch (const std::exception& e) {
        save_manifest(manifest, manifest_path);
        throw Error(ErrorKind::io, "stage " + stage + " failed: " + e.what());
      }
      manifest.stages[stage] = {digest, digest_outputs(work, stage)};
      save_manifest(manifest, manifest_path);
      summary.executed.push_back(stage);
    }
    if (options.until && *options.until == stage) break;
  }
  return summary;
}

}  // namespace culturemod::pipeline
