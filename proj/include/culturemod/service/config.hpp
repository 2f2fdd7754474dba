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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "culturemod/model/beam_search.hpp"

namespace culturemod::service {

struct ServiceConfig {
  std::filesystem::path bundle_dir = "bundles";
  std::string host = "127.0.0.1";
  int port = 8080;
  double disagreement_threshold = 0.25;
  std::string api_token;  // empty disables auth
  std::filesystem::path static_dir;  // UI bundle, optional
  std::filesystem::path annotation_store = "annotations.jsonl";
  std::filesystem::path study_dir;  // study_<CULTURE>.json sets, optional
  std::string summarizer;  // text generator backend for /v1/reason, optional
  model::DecodingConfig decoding;
  int kendall_bootstrap_iters = 10000;
  int kendall_permutation_iters = 10000;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
  static ServiceConfig from_json(const nlohmann::json& j);
};

// Reads the JSON file (if given) and applies CULTUREMOD_BUNDLE_DIR,
// CULTUREMOD_HOST, CULTUREMOD_PORT, CULTUREMOD_DISAGREEMENT_THRESHOLD,
// CULTUREMOD_API_TOKEN, CULTUREMOD_STATIC_DIR, CULTUREMOD_ANNOTATION_STORE,
// CULTUREMOD_STUDY_DIR and CULTUREMOD_SUMMARIZER on top.
ServiceConfig load_service_config(const std::optional<std::filesystem::path>& path);

}  // namespace culturemod::service
