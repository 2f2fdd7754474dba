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


#include "culturemod/model/bundle.hpp"

#include <cstring>

#include "culturemod/core/digest.hpp"
#include "culturemod/core/error.hpp"
#include "culturemod/core/io.hpp"

namespace culturemod::model {

using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'C', 'M', 'W', 'T'};
constexpr std::uint32_t kFormat = 1;
constexpr int kManifestVersion = 1;

constexpr Stage kStages[] = {Stage::base, Stage::media_diet, Stage::rationale_tuned,
                             Stage::classifier_ready};

template <class T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <class T>
T take(std::string_view& in) {
  if (in.size() < sizeof(T)) throw Error(ErrorKind::configuration, "truncated weight blob");
  T v;
  std::memcpy(&v, in.data(), sizeof(T));
  in.remove_prefix(sizeof(T));
  return v;
}

}  // namespace

const char* to_string(Stage stage) {
  switch (stage) {
    case Stage::base: return "base";
    case Stage::media_diet: return "media_diet";
    case Stage::rationale_tuned: return "rationale_tuned";
    case Stage::classifier_ready: return "classifier_ready";
  }
  return "?";
}

Stage stage_from_string(std::string_view name) {
  for (auto s : kStages) {
    if (name == to_string(s)) return s;
  }
  throw Error(ErrorKind::configuration, "unknown stage: " + std::string(name));
}

json ProvenanceEntry::to_json() const { return {{"stage", to_string(stage)}, {"details", details}}; }

ProvenanceEntry ProvenanceEntry::from_json(const json& j) {
  return {stage_from_string(j.at("stage").get<std::string>()), j.value("details", json::object())};
}

json ClassifierTrainingReport::to_json() const {
  return {{"per_run_auroc", per_run_auroc}, {"mean_auroc", mean_auroc},
          {"ci95", {ci95_low, ci95_high}},  {"split_seeds", split_seeds},
          {"redraws", redraws}};
}

ClassifierTrainingReport ClassifierTrainingReport::from_json(const json& j) {
  ClassifierTrainingReport r;
  r.per_run_auroc = j.at("per_run_auroc").get<std::vector<double>>();
  r.mean_auroc = j.at("mean_auroc").get<double>();
  r.ci95_low = j.at("ci95").at(0).get<double>();
  r.ci95_high = j.at("ci95").at(1).get<double>();
  r.split_seeds = j.value("split_seeds", std::vector<std::uint64_t>{});
  r.redraws = j.value("redraws", 0);
  return r;
}

void CulturalModelBundle::validate() const {
  if (!model || !tokenizer) throw Error(ErrorKind::configuration, "bundle without weights or tokenizer");
  if (head.has_value() != (stage == Stage::classifier_ready)) {
    throw Error(ErrorKind::configuration, "classifier head must be present exactly at classifier_ready");
  }
  if (stage != Stage::base && culture.empty()) {
    throw Error(ErrorKind::configuration, "a tuned bundle must name its culture");
  }
  if (tokenizer->vocab_size() != model->config().vocab_size) {
    throw Error(ErrorKind::configuration, "tokenizer and model vocabulary sizes differ");
  }
  int last = -1;
  for (const auto& p : provenance) {
    if (static_cast<int>(p.stage) < last) {
      throw Error(ErrorKind::configuration, "provenance is not in stage order");
    }
    last = static_cast<int>(p.stage);
  }
}

std::string CulturalModelBundle::version() const {
  std::string bytes = serialize_weights(*model, "");
  if (head) bytes += head->to_json().dump();
  if (explainer) bytes += explainer->version();
  return sha256_hex(bytes).substr(0, 16);
}

std::string serialize_weights(const Seq2SeqTransformer& model, std::string_view prefix) {
  std::string out(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kFormat);
  std::uint32_t count = 0;
  for (const auto& p : model.params()) {
    if (p.name.starts_with(prefix)) ++count;
  }
  put<std::uint32_t>(out, count);
  for (const auto& p : model.params()) {
    if (!p.name.starts_with(prefix)) continue;
    put<std::uint32_t>(out, static_cast<std::uint32_t>(p.name.size()));
    out += p.name;
    put<std::int32_t>(out, p.rows);
    put<std::int32_t>(out, p.cols);
    out.append(reinterpret_cast<const char*>(p.value.data()), p.value.size() * sizeof(float));
  }
  return out;
}

void load_weights(Seq2SeqTransformer& model, std::string_view blob, std::string_view prefix) {
  if (blob.size() < sizeof kMagic || std::memcmp(blob.data(), kMagic, sizeof kMagic) != 0) {
    throw Error(ErrorKind::configuration, "not a weight blob");
  }
  blob.remove_prefix(sizeof kMagic);
  if (take<std::uint32_t>(blob) != kFormat) throw Error(ErrorKind::configuration, "unsupported weight format");
  const auto count = take<std::uint32_t>(blob);
  std::size_t expected = 0;
  for (const auto& p : model.params()) {
    if (p.name.starts_with(prefix)) ++expected;
  }
  if (count != expected) {
    throw Error(ErrorKind::configuration, "weight blob holds " + std::to_string(count) +
                                              " tensors, model expects " + std::to_string(expected));
  }
  auto& params = model.params();
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto len = take<std::uint32_t>(blob);
    if (blob.size() < len) throw Error(ErrorKind::configuration, "truncated weight blob");
    const std::string name(blob.substr(0, len));
    blob.remove_prefix(len);
    const auto rows = take<std::int32_t>(blob);
    const auto cols = take<std::int32_t>(blob);
    auto it = std::find_if(params.begin(), params.end(), [&](const Param& p) { return p.name == name; });
    if (it == params.end()) throw Error(ErrorKind::configuration, "unexpected tensor " + name);
    if (it->rows != rows || it->cols != cols) {
      throw Error(ErrorKind::configuration, "shape mismatch for " + name + ": checkpoint " +
                                                std::to_string(rows) + "x" + std::to_string(cols) +
                                                ", model " + std::to_string(it->rows) + "x" +
                                                std::to_string(it->cols));
    }
    const std::size_t bytes = it->value.size() * sizeof(float);
    if (blob.size() < bytes) throw Error(ErrorKind::configuration, "truncated weight blob");
    std::memcpy(it->value.data(), blob.data(), bytes);
    blob.remove_prefix(bytes);
  }
}

std::string encoder_digest(const Seq2SeqTransformer& model) {
  return sha256_hex(serialize_weights(model, "encoder."));
}

void save_bundle(const CulturalModelBundle& bundle, const std::filesystem::path& dir) {
  bundle.validate();
  std::filesystem::create_directories(dir);
  json provenance = json::array();
  for (const auto& p : bundle.provenance) provenance.push_back(p.to_json());
  const json manifest = {{"format", kManifestVersion},
                         {"culture", bundle.culture.code()},
                         {"stage", to_string(bundle.stage)},
                         {"version", bundle.version()},
                         {"config", bundle.model->config().to_json()},
                         {"provenance", provenance},
                         {"has_explainer", static_cast<bool>(bundle.explainer)}};
  io::write_file(dir / "tokenizer.txt", bundle.tokenizer->serialize());
  io::write_file(dir / "encoder.bin", serialize_weights(*bundle.model, "encoder."));
  io::write_file(dir / "decoder.bin", serialize_weights(*bundle.model, "decoder."));
  const auto head_path = dir / "classifier.json";
  if (bundle.head) {
    io::write_json(head_path, bundle.head->to_json());
  } else {
    std::filesystem::remove(head_path);
  }
  if (bundle.explainer) {
    save_bundle(*bundle.explainer, dir / "explainer");
  } else {
    std::filesystem::remove_all(dir / "explainer");
  }
  // The manifest goes last so a readable manifest implies complete weights.
  io::write_json(dir / "manifest.json", manifest);
}

CulturalModelBundle load_bundle(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  if (!std::filesystem::exists(manifest_path)) {
    throw Error(ErrorKind::not_found, "no bundle manifest in " + dir.string());
  }
  const auto manifest = io::read_json(manifest_path);
  if (manifest.value("format", 0) != kManifestVersion) {
    throw Error(ErrorKind::configuration, "unsupported bundle format in " + dir.string());
  }
  CulturalModelBundle b;
  const auto code = manifest.value("culture", std::string());
  if (!code.empty()) b.culture = CultureId(code);
  b.stage = stage_from_string(manifest.at("stage").get<std::string>());
  const auto config = EncoderDecoderConfig::from_json(manifest.at("config"));
  auto model = std::make_shared<Seq2SeqTransformer>(config, 0);
  load_weights(*model, io::read_file(dir / "encoder.bin"), "encoder.");
  load_weights(*model, io::read_file(dir / "decoder.bin"), "decoder.");
  b.model = std::move(model);
  b.tokenizer = std::shared_ptr<const Tokenizer>(Tokenizer::deserialize(io::read_file(dir / "tokenizer.txt")));
  if (std::filesystem::exists(dir / "classifier.json")) {
    b.head = LogisticHead::from_json(io::read_json(dir / "classifier.json"));
  }
  for (const auto& p : manifest.value("provenance", json::array())) {
    b.provenance.push_back(ProvenanceEntry::from_json(p));
  }
  if (manifest.value("has_explainer", false)) {
    b.explainer = std::make_shared<const CulturalModelBundle>(load_bundle(dir / "explainer"));
  }
  b.validate();
  if (b.version() != manifest.value("version", std::string())) {
    throw Error(ErrorKind::configuration, "bundle contents do not match manifest version in " + dir.string());
  }
  return b;
}

BundleSummary read_bundle_summary(const std::filesystem::path& dir) {
  const auto manifest = io::read_json(dir / "manifest.json");
  BundleSummary s;
  const auto code = manifest.value("culture", std::string());
  if (!code.empty()) s.culture = CultureId(code);
  s.stage = stage_from_string(manifest.at("stage").get<std::string>());
  s.version = manifest.value("version", std::string());
  return s;
}

}  // namespace culturemod::model
