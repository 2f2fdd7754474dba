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


#include "culturemod/model/stages.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "culturemod/core/digest.hpp"
#include "culturemod/core/error.hpp"
#include "culturemod/core/random.hpp"
#include "culturemod/core/text.hpp"
#include "culturemod/eval/metrics.hpp"

namespace culturemod::model {

using nlohmann::json;

namespace {

void require_stage(const CulturalModelBundle& b, Stage minimum, const char* op) {
  if (static_cast<int>(b.stage) < static_cast<int>(minimum)) {
    throw Error(ErrorKind::invalid_argument, std::string(op) + " needs stage " + to_string(minimum) +
                                                 " or later, bundle is " + to_string(b.stage));
  }
}

std::string dataset_digest(const std::vector<std::pair<std::string, std::string>>& rows) {
  std::string bytes;
  for (const auto& [a, b] : rows) {
    bytes += a;
    bytes += '\x1f';
    bytes += b;
    bytes += '\x1e';
  }
  return sha256_hex(bytes).substr(0, 16);
}

StageResult run_stage(const CulturalModelBundle& bundle, Stage next, const CultureId& culture,
                      const std::vector<std::pair<std::string, std::string>>& rows,
                      const TrainingSchedule& schedule, json details, const StepCallback& on_step) {
  schedule.validate();
  const auto& tok = *bundle.tokenizer;
  const int max_len = bundle.model->config().max_sequence_length;
  std::vector<Seq2SeqExample> examples;
  examples.reserve(rows.size());
  for (const auto& [src, tgt] : rows) examples.push_back(make_example(tok, src, tgt, max_len));

  auto model = std::make_shared<Seq2SeqTransformer>(*bundle.model);
  StageResult out;
  out.log = train_seq2seq(*model, examples, schedule, on_step);

  out.bundle = bundle;
  out.bundle.model = std::move(model);
  out.bundle.culture = culture;
  out.bundle.stage = next;
  out.bundle.head.reset();
  out.bundle.explainer.reset();
  details["dataset"] = dataset_digest(rows);
  details["examples"] = rows.size();
  details["schedule"] = schedule.to_json();
  details["final_loss"] = out.log.final_loss;
  out.bundle.provenance.push_back({next, std::move(details)});
  out.bundle.validate();
  return out;
}

}  // namespace

CulturalModelBundle init_base_model(const EncoderDecoderConfig& config,
                                    std::shared_ptr<const Tokenizer> tokenizer, std::uint64_t seed,
                                    const std::optional<std::filesystem::path>& pretrained) {
  config.validate();
  if (!tokenizer) throw Error(ErrorKind::configuration, "init_base_model needs a tokenizer");
  if (tokenizer->vocab_size() != config.vocab_size) {
    throw Error(ErrorKind::configuration, "config vocab_size " + std::to_string(config.vocab_size) +
                                              " differs from tokenizer vocabulary " +
                                              std::to_string(tokenizer->vocab_size()));
  }
  auto model = std::make_shared<Seq2SeqTransformer>(config, seed);
  json details = {{"config", config.to_json()}};
  if (pretrained) {
    const auto source = load_bundle(*pretrained);
    if (!(source.model->config() == config)) {
      throw Error(ErrorKind::configuration,
                  "pretrained checkpoint " + pretrained->string() + " has an incompatible shape");
    }
    load_weights(*model, serialize_weights(*source.model, "encoder."), "encoder.");
    load_weights(*model, serialize_weights(*source.model, "decoder."), "decoder.");
    details["pretrained"] = source.version();
  } else {
    details["seed"] = seed;
  }
  CulturalModelBundle b;
  b.stage = Stage::base;
  b.model = std::move(model);
  b.tokenizer = std::move(tokenizer);
  b.provenance.push_back({Stage::base, std::move(details)});
  b.validate();
  return b;
}

std::vector<int> frame_source(const Tokenizer& tokenizer, std::string_view input, int max_length) {
  auto ids = tokenizer.encode(input);
  if (ids.empty()) throw Error(ErrorKind::invalid_argument, "input has no tokens");
  const auto room = static_cast<std::size_t>(max_length - 2);
  if (ids.size() > room) ids.resize(room);
  std::vector<int> out;
  out.reserve(ids.size() + 2);
  out.push_back(special::cls);
  out.insert(out.end(), ids.begin(), ids.end());
  out.push_back(special::sep);
  return out;
}

Seq2SeqExample make_example(const Tokenizer& tokenizer, std::string_view source,
                            std::string_view target, int max_length) {
  Seq2SeqExample ex;
  ex.source = frame_source(tokenizer, source, max_length);
  auto ids = tokenizer.encode(target);
  if (ids.empty()) throw Error(ErrorKind::invalid_argument, "target has no tokens");
  const auto room = static_cast<std::size_t>(max_length - 1);
  if (ids.size() > room) ids.resize(room);
  ex.decoder_in.push_back(special::bos);
  ex.decoder_in.insert(ex.decoder_in.end(), ids.begin(), ids.end());
  ex.target = ids;
  ex.target.push_back(special::eos);
  return ex;
}

StageResult finetune_summarization(const CulturalModelBundle& bundle,
                                   const ingestion::MediaDietDataset& diet,
                                   const TrainingSchedule& schedule, const StepCallback& on_step) {
  if (bundle.stage != Stage::base) {
    throw Error(ErrorKind::invalid_argument, std::string("finetune_summarization needs a base bundle, got ") +
                                                 to_string(bundle.stage));
  }
  if (diet.pairs.empty()) throw Error(ErrorKind::empty_input, "empty media diet");
  if (diet.culture.empty()) throw Error(ErrorKind::invalid_argument, "media diet has no culture");
  std::vector<std::pair<std::string, std::string>> rows;
  rows.reserve(diet.pairs.size());
  for (const auto& p : diet.pairs) rows.emplace_back(p.article_text, p.summary_text);
  return run_stage(bundle, Stage::media_diet, diet.culture, rows, schedule,
                   {{"task", "summarization"}}, on_step);
}

const char* to_string(RationaleMode mode) { return mode == RationaleMode::stratified ? "stratified" : "all"; }

RationaleMode rationale_mode_from_string(std::string_view name) {
  if (name == "stratified") return RationaleMode::stratified;
  if (name == "all") return RationaleMode::all;
  throw Error(ErrorKind::configuration, "unknown rationale mode: " + std::string(name));
}

StageResult finetune_rationales(const CulturalModelBundle& bundle,
                                const dataset::ModerationDataset& records, RationaleMode mode,
                                const TrainingSchedule& schedule, const StepCallback& on_step) {
  if (bundle.stage != Stage::media_diet && bundle.stage != Stage::rationale_tuned) {
    throw Error(ErrorKind::invalid_argument, std::string("finetune_rationales needs a media_diet bundle, got ") +
                                                 to_string(bundle.stage));
  }
  std::vector<std::pair<std::string, std::string>> rows;
  for (const auto& r : records.records) {
    if (mode == RationaleMode::stratified && (r.label != 1 || r.culture != bundle.culture)) continue;
    rows.emplace_back(r.snippet, r.rationale);
  }
  if (rows.empty()) {
    throw Error(ErrorKind::empty_input, mode == RationaleMode::stratified
                                            ? "no culture-matched rationales"
                                            : "no rationales");
  }
  return run_stage(bundle, Stage::rationale_tuned, bundle.culture, rows, schedule,
                   {{"task", "rationales"}, {"mode", to_string(mode)}}, on_step);
}

std::vector<float> embed_cls(const CulturalModelBundle& bundle, std::string_view snippet) {
  require_stage(bundle, Stage::media_diet, "embed_cls");
  if (text::trim(snippet).empty()) throw Error(ErrorKind::invalid_argument, "empty snippet");
  const auto src = frame_source(*bundle.tokenizer, snippet, bundle.model->config().max_sequence_length);
  const auto states = bundle.model->encode(src);
  return {states.row(0), states.row(0) + states.cols};
}

std::vector<std::vector<float>> encode_cls(const CulturalModelBundle& bundle,
                                           const std::vector<std::string>& snippets) {
  const int max_len = bundle.model->config().max_sequence_length;
  std::vector<std::vector<int>> framed;
  framed.reserve(snippets.size());
  for (const auto& s : snippets) {
    if (text::trim(s).empty()) throw Error(ErrorKind::invalid_argument, "empty snippet");
    framed.push_back(frame_source(*bundle.tokenizer, s, max_len));
  }
  std::vector<std::vector<float>> out(snippets.size());
  const auto n = static_cast<long>(snippets.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    const auto states = bundle.model->encode(framed[static_cast<std::size_t>(i)]);
    out[static_cast<std::size_t>(i)].assign(states.row(0), states.row(0) + states.cols);
  }
  return out;
}

ClassifierTrainingReport cross_validate_head(const std::vector<std::vector<float>>& embeddings,
                                             std::span<const int> labels,
                                             const HeadTrainingOptions& options) {
  const std::size_t n = embeddings.size();
  if (n != labels.size()) throw Error(ErrorKind::invalid_argument, "embeddings and labels differ in length");
  if (options.iterations < 1) throw Error(ErrorKind::configuration, "iterations must be >= 1");
  if (!(options.test_fraction > 0.0 && options.test_fraction < 1.0)) {
    throw Error(ErrorKind::configuration, "test_fraction must lie in (0, 1)");
  }
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  if (positives == 0 || positives == n) {
    throw Error(ErrorKind::invalid_argument, "classifier training needs both labels");
  }
  if (n < 4) throw Error(ErrorKind::invalid_argument, "too few records for train/test splits");
  const auto n_test = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::lround(options.test_fraction * static_cast<double>(n))), 1, n - 1);

  ClassifierTrainingReport report;
  std::uint64_t stream = 0;
  for (int run = 0; run < options.iterations; ++run) {
    for (int attempt = 0;; ++attempt) {
      if (attempt >= 1000) throw Error(ErrorKind::invalid_argument, "could not draw a two-class split");
      const auto split_seed = derive_seed(options.seed, stream++);
      std::vector<std::size_t> idx(n);
      std::iota(idx.begin(), idx.end(), 0);
      auto rng = make_rng(split_seed);
      shuffle(idx.begin(), idx.end(), rng);
      std::vector<std::vector<float>> train_x, test_x;
      std::vector<int> train_y, test_y;
      for (std::size_t i = 0; i < n; ++i) {
        auto& xs = i < n_test ? test_x : train_x;
        auto& ys = i < n_test ? test_y : train_y;
        xs.push_back(embeddings[idx[i]]);
        ys.push_back(labels[idx[i]]);
      }
      auto two_class = [](const std::vector<int>& y) {
        const auto p = std::count(y.begin(), y.end(), 1);
        return p > 0 && p < static_cast<long>(y.size());
      };
      if (!two_class(train_y) || !two_class(test_y)) {
        spdlog::info("split {} is single-class, redrawing", run);
        ++report.redraws;
        continue;
      }
      const auto head = fit_logistic(train_x, train_y, options.logistic);
      std::vector<double> scores;
      scores.reserve(test_x.size());
      for (const auto& x : test_x) scores.push_back(head.logit(x));
      report.per_run_auroc.push_back(eval::auroc(scores, test_y));
      report.split_seeds.push_back(split_seed);
      break;
    }
  }
  report.mean_auroc = eval::mean(report.per_run_auroc);
  const auto ci = eval::normal_ci95(report.per_run_auroc);
  report.ci95_low = ci.low;
  report.ci95_high = ci.high;
  return report;
}

ClassifierResult train_classifier_head(const CulturalModelBundle& bundle,
                                       const dataset::ModerationDataset& records,
                                       const HeadTrainingOptions& options) {
  if (bundle.stage != Stage::rationale_tuned) {
    throw Error(ErrorKind::invalid_argument, std::string("train_classifier_head needs a rationale_tuned bundle, got ") +
                                                 to_string(bundle.stage));
  }
  std::vector<std::string> snippets;
  std::vector<int> labels;
  for (const auto& r : records.records) {
    snippets.push_back(r.snippet);
    labels.push_back(r.label);
  }
  const auto x = encode_cls(bundle, snippets);
  ClassifierResult out;
  out.report = cross_validate_head(x, labels, options);
  out.bundle = bundle;
  out.bundle.head = fit_logistic(x, labels, options.logistic);
  out.bundle.stage = Stage::classifier_ready;
  out.bundle.provenance.push_back(
      {Stage::classifier_ready,
       {{"task", "classification"},
        {"records", records.records.size()},
        {"iterations", options.iterations},
        {"test_fraction", options.test_fraction},
        {"seed", options.seed},
        {"c", options.logistic.c},
        {"mean_auroc", out.report.mean_auroc}}});
  out.bundle.validate();
  return out;
}

CulturalModelBundle attach_explainer(const CulturalModelBundle& classifier,
                                     const CulturalModelBundle& explainer) {
  require_stage(explainer, Stage::rationale_tuned, "attach_explainer");
  if (explainer.culture != classifier.culture) {
    throw Error(ErrorKind::invalid_argument, "explainer culture differs from the classifier's");
  }
  auto out = classifier;
  auto ex = explainer;
  ex.explainer.reset();
  out.explainer = std::make_shared<const CulturalModelBundle>(std::move(ex));
  return out;
}

double predict_violation(const CulturalModelBundle& bundle, std::string_view snippet) {
  if (bundle.stage != Stage::classifier_ready || !bundle.head) {
    throw Error(ErrorKind::invalid_argument, std::string("predict_violation needs a classifier_ready bundle, got ") +
                                                 to_string(bundle.stage));
  }
  return bundle.head->predict(embed_cls(bundle, snippet));
}

std::string generate_text(const CulturalModelBundle& bundle, std::string_view input,
                          const DecodingConfig& decoding) {
  decoding.validate();
  if (text::trim(input).empty()) throw Error(ErrorKind::invalid_argument, "empty snippet");
  const auto& model = *bundle.model;
  const int max_len = model.config().max_sequence_length;
  const auto source = model.encode_source(frame_source(*bundle.tokenizer, input, max_len));
  auto cfg = decoding;
  cfg.max_output_tokens = std::min(cfg.max_output_tokens, max_len - 1);
  const NextLogitsFn next = [&](std::span<const int> prefix) {
    return model.next_token_logits(source, prefix);
  };
  const auto result = cfg.beam_width == 1 ? greedy_decode(next, special::bos, special::eos, cfg)
                                          : beam_search(next, special::bos, special::eos, cfg);
  return bundle.tokenizer->decode(result.tokens);
}

std::string generate_explanation(const CulturalModelBundle& bundle, std::string_view snippet,
                                 const DecodingConfig& decoding) {
  require_stage(bundle, Stage::rationale_tuned, "generate_explanation");
  return generate_text(bundle.explainer ? *bundle.explainer : bundle, snippet, decoding);
}

}  // namespace culturemod::model
