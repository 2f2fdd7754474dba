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


#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <csignal>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "culturemod/core/error.hpp"
#include "culturemod/core/io.hpp"
#include "culturemod/core/text_generator.hpp"
#include "culturemod/dataset/moderation_dataset.hpp"
#include "culturemod/eval/heatmap.hpp"
#include "culturemod/eval/kendall.hpp"
#include "culturemod/eval/metrics.hpp"
#include "culturemod/eval/score_report.hpp"
#include "culturemod/eval/study.hpp"
#include "culturemod/ingestion/media_diet.hpp"
#include "culturemod/ingestion/summarizer.hpp"
#include "culturemod/model/stages.hpp"
#include "culturemod/pipeline/pipeline.hpp"
#include "culturemod/pipeline/report.hpp"
#include "culturemod/service/http_server.hpp"
#include "culturemod/synthetic/synthetic.hpp"
#include "culturemod/version.hpp"

using namespace culturemod;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument:
    case ErrorKind::empty_input:
      return 2;
    case ErrorKind::configuration:
      return 3;
    case ErrorKind::not_found:
      return 4;
    case ErrorKind::unavailable:
    case ErrorKind::retriable:
      return 5;
    case ErrorKind::conflict:
      return 6;
    case ErrorKind::io:
      return 7;
    case ErrorKind::diverged:
      return 8;
  }
  return 1;
}

std::vector<CultureId> cultures_of(const std::vector<std::string>& codes) {
  std::vector<CultureId> out;
  for (const auto& c : codes) out.emplace_back(c);
  return out;
}

// "US=path" pairs.
std::map<CultureId, std::string> keyed(const std::vector<std::string>& items) {
  std::map<CultureId, std::string> out;
  for (const auto& s : items) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorKind::invalid_argument, "expected CULTURE=PATH, got " + s);
    }
    out[CultureId(s.substr(0, eq))] = s.substr(eq + 1);
  }
  return out;
}

void emit(const json& j, const std::string& out, const std::string& name = "result") {
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else if (fs::is_directory(out) || fs::path(out).extension().empty()) {
    io::write_json(fs::path(out) / (name + ".json"), j);
  } else {
    io::write_json(out, j);
  }
}

std::vector<std::string> snippets_of(const std::string& text, const std::string& input) {
  std::vector<std::string> out;
  if (!input.empty()) {
    std::istringstream in(io::read_file(input));
    for (std::string line; std::getline(in, line);) {
      if (line.find_first_not_of(" \t\r") != std::string::npos) out.push_back(line);
    }
  } else if (!text.empty()) {
    out.push_back(text);
  }
  if (out.empty()) throw Error(ErrorKind::invalid_argument, "--text or --input is required");
  return out;
}

struct Schedule {
  int steps = 2000;
  double lr = 1e-3;
  double warmup = 0.05;
  int batch = 8;
  double weight_decay = 0.01;

  void add(CLI::App* app) {
    app->add_option("--steps", steps, "Optimizer steps")->capture_default_str();
    app->add_option("--lr", lr, "Peak learning rate")->capture_default_str();
    app->add_option("--warmup", warmup, "Warmup fraction")->capture_default_str();
    app->add_option("--batch", batch, "Batch size")->capture_default_str();
    app->add_option("--weight-decay", weight_decay, "AdamW weight decay")->capture_default_str();
  }
  // A schedule file, when given, replaces the flag values.
  model::TrainingSchedule get(std::uint64_t seed, const std::string& file = {}) const {
    if (!file.empty()) {
      auto s = model::TrainingSchedule::from_json(io::read_json(file));
      s.seed = seed;
      return s;
    }
    model::TrainingSchedule s;
    s.total_steps = steps;
    s.learning_rate = lr;
    s.warmup_fraction = warmup;
    s.batch_size = batch;
    s.weight_decay = weight_decay;
    s.seed = seed;
    return s;
  }
};

struct Decoding {
  int beam = 4;
  double length_penalty = 1.0;
  double repetition_penalty = 1.2;
  int max_tokens = 32;

  void add(CLI::App* app) {
    app->add_option("--beam", beam, "Beam width")->capture_default_str();
    app->add_option("--length-penalty", length_penalty)->capture_default_str();
    app->add_option("--repetition-penalty", repetition_penalty)->capture_default_str();
    app->add_option("--max-tokens", max_tokens)->capture_default_str();
  }
  model::DecodingConfig get() const {
    model::DecodingConfig d;
    d.beam_width = beam;
    d.length_penalty = length_penalty;
    d.repetition_penalty = repetition_penalty;
    d.max_output_tokens = max_tokens;
    return d;
  }
};

service::HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Culturally attuned content moderation models: data, training, evaluation and serving"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.set_config("--config", "", "TOML/INI file with option defaults (sections per verb)");
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  bool force = false;
  std::string log_level = "info";
  app.add_option("--seed", seed, "Root seed for stochastic steps")->capture_default_str();
  app.add_flag("--force", force, "Rerun pipeline stages even when up to date");
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error")->capture_default_str();

  // synth
  auto* synth = app.add_subcommand("synth", "Write a synthetic multi-culture corpus");
  std::string synth_out;
  std::vector<std::string> synth_cultures = {"US", "AU", "NG"};
  synthetic::CorpusOptions corpus;
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--cultures", synth_cultures)->delimiter(',')->capture_default_str();
  synth->add_option("--articles", corpus.articles_per_culture)->capture_default_str();
  synth->add_option("--flagged", corpus.events.flagged)->capture_default_str();
  synth->add_option("--fyi", corpus.events.fyi)->capture_default_str();
  synth->add_option("--no-action", corpus.events.no_action)->capture_default_str();

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Curate media diets and generate summary targets");
  std::string ingest_articles, ingest_out, ingest_summarizer = "first-sentence";
  std::vector<std::string> ingest_cultures;
  ingestion::IngestOptions ingest_opts;
  std::optional<int> ingest_window;
  ingest->add_option("--articles,--input", ingest_articles, "MediaArticle JSON lines")->required()->check(CLI::ExistingFile);
  ingest->add_option("--cultures,--culture", ingest_cultures)->delimiter(',')->required();
  ingest->add_option("--out", ingest_out, "Output file (one culture, .jsonl) or directory of <CULTURE>.jsonl")->required();
  ingest->add_option("--summarizer", ingest_summarizer, "first-sentence, lead-N, reference:<file>, llm:<backend>")
      ->capture_default_str();
  ingest->add_option("--top-sources", ingest_opts.top_sources)->capture_default_str();
  ingest->add_option("--cap", ingest_opts.cap)->capture_default_str();
  ingest->add_option("--window-days", ingest_window);

  // build-dataset
  auto* build = app.add_subcommand("build-dataset", "Standardize moderation events into records");
  std::string build_events, build_out, build_llm = "stub", build_templates, build_moderator = "US";
  build->add_option("--events", build_events)->required()->check(CLI::ExistingFile);
  build->add_option("--out", build_out, "Dataset JSON lines")->required();
  build->add_option("--llm", build_llm, "echo, stub or http")->capture_default_str();
  build->add_option("--templates", build_templates, "Prompt template directory")->check(CLI::ExistingDirectory);
  build->add_option("--moderator-culture", build_moderator)->capture_default_str();

  // init
  auto* init = app.add_subcommand("init", "Train the shared tokenizer and initialize a base bundle");
  std::vector<std::string> init_diets;
  std::string init_dataset, init_out, init_tokenizer = "word", init_pretrained;
  int init_vocab = 4000;
  model::EncoderDecoderConfig init_cfg;
  init->add_option("--diets", init_diets, "Media-diet files for the tokenizer corpus")->required();
  init->add_option("--dataset", init_dataset, "Moderation dataset for the tokenizer corpus");
  init->add_option("--out", init_out, "Bundle directory")->required();
  init->add_option("--tokenizer", init_tokenizer, "word or bpe")->capture_default_str();
  init->add_option("--vocab", init_vocab)->capture_default_str();
  init->add_option("--hidden", init_cfg.hidden_dim)->capture_default_str();
  init->add_option("--layers", init_cfg.num_layers)->capture_default_str();
  init->add_option("--heads", init_cfg.num_heads)->capture_default_str();
  init->add_option("--ffn", init_cfg.ffn_dim)->capture_default_str();
  init->add_option("--max-length", init_cfg.max_sequence_length)->capture_default_str();
  init->add_option("--pretrained", init_pretrained, "Copy weights from a base bundle")->check(CLI::ExistingDirectory);

  // train
  auto* train = app.add_subcommand("train", "Run one training stage");
  train->require_subcommand(1);
  auto* s1 = train->add_subcommand("stage1", "Media-diet summarization fine-tuning");
  auto* s2 = train->add_subcommand("stage2", "Rationale fine-tuning");
  auto* s3 = train->add_subcommand("stage3", "Classifier head on frozen embeddings");
  std::string t_bundle, t_out, t_diet, t_dataset, t_mode = "stratified", t_explainer, t_report, t_schedule,
      t_culture;
  Schedule sched;
  model::HeadTrainingOptions head_opts;
  for (auto* s : {s1, s2, s3}) {
    s->add_option("--bundle", t_bundle, "Input bundle directory")->required()->check(CLI::ExistingDirectory);
    s->add_option("--out", t_out, "Output bundle directory")->required();
    s->add_option("--culture", t_culture, "Expected culture of the data (stage 1) or records to keep");
  }
  for (auto* s : {s1, s2}) {
    s->add_option("--schedule", t_schedule, "TrainingSchedule JSON used instead of the schedule flags")
        ->check(CLI::ExistingFile);
  }
  s1->add_option("--diet,--data", t_diet, "Media-diet JSON lines")->required()->check(CLI::ExistingFile);
  sched.add(s1);
  s2->add_option("--dataset,--data", t_dataset)->required()->check(CLI::ExistingFile);
  s2->add_option("--mode", t_mode, "stratified or all")->capture_default_str();
  sched.add(s2);
  s3->add_option("--dataset,--data", t_dataset)->required()->check(CLI::ExistingFile);
  s3->add_option("--explainer", t_explainer, "Stage-2 bundle used for explanations")->check(CLI::ExistingDirectory);
  s3->add_option("--iterations", head_opts.iterations)->capture_default_str();
  s3->add_option("--test-fraction", head_opts.test_fraction)->capture_default_str();
  s3->add_option("--report", t_report, "Write the cross-validation report here");

  // explain / score
  auto* explain = app.add_subcommand("explain", "Generate an explanation for one snippet");
  auto* score = app.add_subcommand("score", "Violation probability for snippets");
  std::string x_bundle, x_text, x_input, x_dataset, x_out;
  Decoding decoding;
  for (auto* s : {explain, score}) {
    s->add_option("--bundle", x_bundle)->required()->check(CLI::ExistingDirectory);
    s->add_option("--text", x_text, "Snippet");
    s->add_option("--input", x_input, "File with one snippet per line")->check(CLI::ExistingFile);
  }
  decoding.add(explain);
  score->add_option("--dataset", x_dataset, "Score every record instead of --text")->check(CLI::ExistingFile);
  score->add_option("--out", x_out, "Write JSON here instead of stdout");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Evaluation reports");
  evaluate->require_subcommand(1);
  auto* e_heat = evaluate->add_subcommand("heatmap", "Cross-culture ROUGE-1 heatmap");
  auto* e_auroc = evaluate->add_subcommand("auroc", "Repeated-split AUROC for one or more encoders");
  auto* e_box = evaluate->add_subcommand("boxplots", "Score distributions by stratum");
  auto* e_kendall = evaluate->add_subcommand("kendall", "Kendall's W with bootstrap CI and permutation p");
  auto* e_study = evaluate->add_subcommand("study", "Build a blinded explanation-ranking study");
  std::string e_base, e_out, e_dataset, e_culture, e_rankings, e_sessions;
  std::vector<std::string> e_bundles, e_tests, e_distractors;
  int e_items = 20, e_boot = 10000, e_perm = 10000;
  Decoding e_decoding;
  e_heat->add_option("--base", e_base)->required()->check(CLI::ExistingDirectory);
  e_heat->add_option("--bundles", e_bundles, "CULTURE=DIR stage-1 bundles")->required();
  e_heat->add_option("--tests,--in", e_tests, "CULTURE=FILE media-diet test sets")->required();
  e_decoding.add(e_heat);
  e_auroc->add_option("--bundles", e_bundles, "NAME=DIR encoders to compare")->required();
  e_auroc->add_option("--dataset,--in", e_dataset)->required()->check(CLI::ExistingFile);
  e_auroc->add_option("--culture", e_culture, "Restrict to records of this culture");
  e_auroc->add_option("--iterations", head_opts.iterations)->capture_default_str();
  e_box->add_option("--bundle", x_bundle)->required()->check(CLI::ExistingDirectory);
  e_box->add_option("--dataset,--in", e_dataset)->required()->check(CLI::ExistingFile);
  e_kendall->add_option("--rankings,--in", e_rankings, "JSON matrix (raters x items) of ranks");
  e_kendall->add_option("--sessions", e_sessions, "Annotation JSON lines; one result per annotator culture");
  e_kendall->add_option("--bootstrap", e_boot)->capture_default_str();
  e_kendall->add_option("--permutations", e_perm)->capture_default_str();
  e_study->add_option("--dataset", e_dataset)->required()->check(CLI::ExistingFile);
  e_study->add_option("--target", e_culture)->required();
  e_study->add_option("--bundles", e_bundles, "CULTURE=DIR classifier bundles")->required();
  e_study->add_option("--distractors", e_distractors)->delimiter(',')->required();
  e_study->add_option("--items", e_items)->capture_default_str();
  e_decoding.add(e_study);
  for (auto* s : {e_heat, e_auroc, e_box, e_kendall, e_study}) {
    s->add_option("--out", e_out, "Output JSON file, or a directory to write <verb>.json into");
  }

  // serve
  auto* serve = app.add_subcommand("serve", "Run the moderation HTTP service");
  std::string serve_config, serve_bundles, serve_host, serve_static;
  int serve_port = -1;
  serve->add_option("--service-config", serve_config, "Service JSON config")->check(CLI::ExistingFile);
  serve->add_option("--bundle-dir", serve_bundles);
  serve->add_option("--host", serve_host);
  serve->add_option("--port", serve_port);
  serve->add_option("--static-dir", serve_static, "UI bundle to mount at /");

  // report / run
  auto* report = app.add_subcommand("report", "Render the experiment report");
  auto* run = app.add_subcommand("run", "Run the full pipeline from a manifest");
  std::string manifest_path, report_out, run_until;
  report->add_option("--manifest", manifest_path)->required()->check(CLI::ExistingFile);
  report->add_option("--out", report_out, "Write the report here instead of stdout");
  run->add_option("--manifest", manifest_path)->required()->check(CLI::ExistingFile);
  run->add_option("--until", run_until, "Stop after this stage");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*synth) {
      corpus.cultures = cultures_of(synth_cultures);
      corpus.seed = seed;
      synthetic::write_corpus(synth_out, corpus);
    } else if (*ingest) {
      ingest_opts.window_days = ingest_window;
      const auto articles = ingestion::load_articles(ingest_articles);
      auto summarizer = ingestion::make_summarizer(ingest_summarizer);
      const auto diets = ingestion::build_media_diets(articles, cultures_of(ingest_cultures), ingest_opts, *summarizer);
      const bool single_file = diets.size() == 1 && fs::path(ingest_out).extension() == ".jsonl";
      for (const auto& [c, d] : diets) {
        ingestion::save_media_diet(single_file ? fs::path(ingest_out) : fs::path(ingest_out) / (c.code() + ".jsonl"), d);
        std::cout << c.code() << ": " << d.pairs.size() << " pairs\n";
      }
    } else if (*build) {
      auto llm = llm::make_text_generator(build_llm);
      const auto templates = build_templates.empty() ? dataset::TemplateSet::defaults()
                                                     : dataset::TemplateSet::load(build_templates);
      dataset::BuildOptions opts;
      opts.moderator_culture = CultureId(build_moderator);
      const auto ds = dataset::build_dataset(dataset::load_events(build_events), *llm, seed, templates, opts);
      dataset::save_dataset(build_out, ds);
      std::cout << ds.counts.to_json().dump(2) << "\n";
    } else if (*init) {
      model::CulturalModelBundle base;
      if (!init_pretrained.empty()) {
        base = model::load_bundle(init_pretrained);
      } else {
        std::vector<std::string> text;
        for (const auto& f : init_diets) {
          for (const auto& p : ingestion::load_media_diet(f).pairs) {
            text.push_back(p.article_text);
            text.push_back(p.summary_text);
          }
        }
        if (!init_dataset.empty()) {
          for (const auto& r : dataset::load_dataset(init_dataset).records) {
            text.push_back(r.snippet);
            text.push_back(r.rationale);
          }
        }
        std::shared_ptr<const model::Tokenizer> tok = model::train_tokenizer(init_tokenizer, text, init_vocab);
        init_cfg.vocab_size = tok->vocab_size();
        init_cfg.tokenizer_id = tok->id();
        base = model::init_base_model(init_cfg, tok, seed);
      }
      model::save_bundle(base, init_out);
      std::cout << "base bundle " << base.version() << "\n";
    } else if (*train) {
      const auto in = model::load_bundle(t_bundle);
      if (*s1) {
        const auto diet = ingestion::load_media_diet(t_diet);
        if (!t_culture.empty() && diet.culture.code() != t_culture) {
          throw Error(ErrorKind::invalid_argument, "diet culture " + diet.culture.code() + " is not " + t_culture);
        }
        auto r = model::finetune_summarization(in, diet, sched.get(seed, t_schedule));
        model::save_bundle(r.bundle, t_out);
        std::cout << "final loss " << r.log.final_loss << "\n";
      } else if (*s2) {
        auto r = model::finetune_rationales(in, dataset::load_dataset(t_dataset),
                                            model::rationale_mode_from_string(t_mode), sched.get(seed, t_schedule));
        model::save_bundle(r.bundle, t_out);
        std::cout << "final loss " << r.log.final_loss << "\n";
      } else {
        head_opts.seed = seed;
        auto records = dataset::load_dataset(t_dataset);
        const CultureId keep = t_culture.empty() ? in.culture : CultureId(t_culture);
        std::erase_if(records.records, [&](const auto& r) { return r.culture != keep; });
        auto r = model::train_classifier_head(in, records, head_opts);
        if (!t_explainer.empty()) r.bundle = model::attach_explainer(r.bundle, model::load_bundle(t_explainer));
        model::save_bundle(r.bundle, t_out);
        if (!t_report.empty()) io::write_json(t_report, r.report.to_json());
        std::cout << "mean AUROC " << r.report.mean_auroc << " (" << r.report.ci95_low << ", "
                  << r.report.ci95_high << ")\n";
      }
    } else if (*explain) {
      const auto b = model::load_bundle(x_bundle);
      for (const auto& text : snippets_of(x_text, x_input)) {
        std::cout << model::generate_explanation(b, text, decoding.get()) << "\n";
      }
    } else if (*score) {
      const auto b = model::load_bundle(x_bundle);
      json out = json::array();
      if (!x_dataset.empty()) {
        for (const auto& r : dataset::load_dataset(x_dataset).records) {
          out.push_back({{"record_id", r.record_id}, {"label", r.label},
                         {"probability", model::predict_violation(b, r.snippet)}});
        }
      } else {
        for (const auto& text : snippets_of(x_text, x_input)) {
          out.push_back({{"snippet", text}, {"probability", model::predict_violation(b, text)}});
        }
      }
      emit(out, x_out);
    } else if (*evaluate) {
      if (*e_heat) {
        model::BundleMap bundles;
        std::map<CultureId, std::vector<ingestion::SummaryPair>> tests;
        std::vector<CultureId> order;
        for (const auto& [c, dir] : keyed(e_bundles)) {
          bundles[c] = std::make_shared<const model::CulturalModelBundle>(model::load_bundle(dir));
          order.push_back(c);
        }
        for (const auto& [c, f] : keyed(e_tests)) tests[c] = ingestion::load_media_diet(f).pairs;
        const auto base = model::load_bundle(e_base);
        const auto m = eval::cross_culture_heatmap(order, bundles, tests, base, e_decoding.get());
        emit(m.to_json(), e_out, "heatmap");
      } else if (*e_auroc) {
        auto records = dataset::load_dataset(e_dataset);
        if (!e_culture.empty()) {
          std::erase_if(records.records, [&](const auto& r) { return r.culture.code() != e_culture; });
        }
        std::vector<std::string> snippets;
        std::vector<int> labels;
        for (const auto& r : records.records) {
          snippets.push_back(r.snippet);
          labels.push_back(r.label);
        }
        head_opts.seed = seed;
        json out = json::object();
        std::map<std::string, model::ClassifierTrainingReport> runs;
        for (const auto& [name, dir] : keyed(e_bundles)) {
          runs[name.code()] = model::cross_validate_head(model::encode_cls(model::load_bundle(dir), snippets),
                                                         labels, head_opts);
          out[name.code()] = runs[name.code()].to_json();
        }
        json welch = json::object();
        for (auto a = runs.begin(); a != runs.end(); ++a) {
          for (auto b = std::next(a); b != runs.end(); ++b) {
            welch[a->first + " vs " + b->first] =
                eval::welch_t_test(a->second.per_run_auroc, b->second.per_run_auroc).to_json();
          }
        }
        emit({{"models", out}, {"welch", welch}}, e_out, "auroc");
      } else if (*e_box) {
        const auto b = model::load_bundle(x_bundle);
        std::vector<eval::Prediction> preds;
        for (const auto& r : dataset::load_dataset(e_dataset).records) {
          preds.emplace_back(r, model::predict_violation(b, r.snippet));
        }
        emit(eval::score_distribution_report(preds, b.culture).to_json(), e_out, "boxplots");
      } else if (*e_kendall) {
        if (!e_rankings.empty()) {
          const auto m = io::read_json(e_rankings).get<eval::RankMatrix>();
          emit(eval::kendalls_w_inference(m, e_boot, e_perm, seed).to_json(), e_out, "kendall");
        } else if (!e_sessions.empty()) {
          std::vector<eval::AnnotationSession> sessions;
          for (const auto& row : io::read_jsonl(e_sessions)) sessions.push_back(eval::AnnotationSession::from_json(row));
          emit(eval::study_report(sessions, e_boot, e_perm, seed).to_json(), e_out, "kendall");
        } else {
          throw Error(ErrorKind::invalid_argument, "--rankings or --sessions is required");
        }
      } else if (*e_study) {
        model::BundleMap bundles;
        for (const auto& [c, dir] : keyed(e_bundles)) {
          bundles[c] = std::make_shared<const model::CulturalModelBundle>(model::load_bundle(dir));
        }
        const auto study = eval::build_human_eval_study(dataset::load_dataset(e_dataset), CultureId(e_culture),
                                                        cultures_of(e_distractors), bundles, e_items, seed,
                                                        e_decoding.get());
        if (e_out.empty()) {
          std::cout << eval::format_study_text(study);
        } else {
          io::write_json(e_out, study.to_json());
        }
      }
    } else if (*serve) {
      auto cfg = service::load_service_config(serve_config.empty() ? std::nullopt
                                                                   : std::optional<fs::path>(serve_config));
      if (!serve_bundles.empty()) cfg.bundle_dir = serve_bundles;
      if (!serve_host.empty()) cfg.host = serve_host;
      if (serve_port >= 0) cfg.port = serve_port;
      if (!serve_static.empty()) cfg.static_dir = serve_static;
      cfg.seed = seed;
      auto server = service::make_http_server(cfg);
      g_server = server.get();
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      server->listen();
      g_server = nullptr;
    } else if (*report) {
      const auto text = pipeline::render_report(pipeline::load_manifest(manifest_path));
      if (report_out.empty()) {
        std::cout << text;
      } else {
        io::write_file(report_out, text);
      }
    } else if (*run) {
      auto m = pipeline::load_manifest(manifest_path);
      pipeline::RunOptions opts;
      opts.force = force;
      if (!run_until.empty()) opts.until = run_until;
      const auto summary = pipeline::run_pipeline(m, manifest_path, opts);
      for (const auto& s : summary.executed) std::cout << "ran " << s << "\n";
      for (const auto& s : summary.skipped) std::cout << "up to date " << s << "\n";
    }
  } catch (const Error& e) {
    spdlog::error("{}: {}", to_string(e.kind()), e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
