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

#include <string>

#include "culturemod/pipeline/manifest.hpp"

namespace culturemod::pipeline {

// Plain-text experiment summary from the evaluate outputs: ROUGE heatmap,
// AUROC table with 95% intervals and Welch tests, score strata and, when
// annotation sessions are configured, the Kendall section. Throws not_found
// listing every missing artifact.
std::string render_report(const ExperimentManifest& manifest);

}  // namespace culturemod::pipeline
