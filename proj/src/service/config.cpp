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


#include "culturemod/service/config.hpp"

#include <cstdlib>

#include "culturemod/core/error.hpp"
#include "culturemod/core/io.hpp"

namespace culturemod::service {

using nlohmann::json;

json ServiceConfig::to_json() const {
  return {{"bundle_dir", bundle_dir.string()},
          {"host", host},
          {"port", port},
          {"disagreement_threshold", disagreement_threshold},
          {"api_token", api_token.empty() ? "" : "<set>"},
          {"static_dir", static_dir.string()},
          {"annotation_store", annotation_store.string()},
          {"study_dir", study_dir.string()},
          {"summarizer", summarizer},
          {"decoding", decoding.to_json()},
          {"kendall_bootstrap_iters", kendall_bootstrap_iters},
          {"kendall_permutation_iters", kendall_permutation_iters},
          {"seed", seed}};
}

ServiceConfig ServiceConfig::from_json(const json& j) {
  ServiceConfig c;
  c.bundle_dir = j.value("bundle_dir", c.bundle_dir.string());
  c.host = j.value("host", c.host);
  c.port = j.value("port", c.port);
  c.disagreement_threshold = j.value("disagreement_threshold", c.disagreement_threshold);
  c.api_token = j.value("api_token", c.api_token);
  c.static_dir = j.value("static_dir", std::string());
  c.annotation_store = j.value("annotation_store", c.annotation_store.string());
  c.study_dir = j.value("study_dir", std::string());
  c.summarizer = j.value("summarizer", c.summarizer);
  if (j.contains("decoding")) c.decoding = model::DecodingConfig::from_json(j["decoding"]);
  c.kendall_bootstrap_iters = j.value("kendall_bootstrap_iters", c.kendall_bootstrap_iters);
  c.kendall_permutation_iters = j.value("kendall_permutation_iters", c.kendall_permutation_iters);
  c.seed = j.value("seed", c.seed);
  return c;
}

namespace {

const char* env(const char* name) {
  const char* v = std::getenv(name);
  return v && *v ? v : nullptr;
}

}  // namespace

ServiceConfig load_service_config(const std::optional<std::filesystem::path>& path) {
  ServiceConfig c;
  if (path) c = ServiceConfig::from_json(io::read_json(*path));
  if (const char* v = env("CULTUREMOD_BUNDLE_DIR")) c.bundle_dir = v;
  if (const char* v = env("CULTUREMOD_HOST")) c.host = v;
  try {
    if (const char* v = env("CULTUREMOD_PORT")) c.port = std::stoi(v);
    if (const char* v = env("CULTUREMOD_DISAGREEMENT_THRESHOLD")) c.disagreement_threshold = std::stod(v);
  } catch (const std::exception&) {
    throw Error(ErrorKind::configuration, "malformed numeric environment override");
  }
  if (const char* v = env("CULTUREMOD_API_TOKEN")) c.api_token = v;
  if (const char* v = env("CULTUREMOD_STATIC_DIR")) c.static_dir = v;
  if (const char* v = env("CULTUREMOD_ANNOTATION_STORE")) c.annotation_store = v;
  if (const char* v = env("CULTUREMOD_STUDY_DIR")) c.study_dir = v;
  if (const char* v = env("CULTUREMOD_SUMMARIZER")) c.summarizer = v;
  if (c.port < 0 || c.port > 65535) throw Error(ErrorKind::configuration, "port out of range");
  if (c.disagreement_threshold < 0.0 || c.disagreement_threshold > 1.0) {
    throw Error(ErrorKind::configuration, "disagreement_threshold must lie in [0, 1]");
  }
  c.decoding.validate();
  return c;
}

}  // namespace culturemod::service
