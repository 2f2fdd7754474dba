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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "culturemod/pipeline/manifest.hpp"

namespace culturemod::pipeline {

struct RunOptions {
  bool force = false;  // rerun stages even when their digests match
  // Run up to and including this stage.
  std::optional<std::string> until;
};

struct RunSummary {
  std::vector<std::string> executed;
  std::vector<std::string> skipped;
};

// Runs the stages in order, each into <work_dir>/<stage>/. A stage is skipped
// when its recorded input digest matches and every recorded output still has
// its recorded digest. The manifest is rewritten after every stage, so an
// interrupted run resumes where it stopped. A failure names the stage and
// leaves earlier outputs in place. One run per work directory at a time.
RunSummary run_pipeline(ExperimentManifest& manifest, const std::filesystem::path& manifest_path,
                        const RunOptions& options = {});

// Digest over the stage's recorded outputs; empty when the stage has not run.
std::string stage_digest(const ExperimentManifest& manifest, const std::string& stage);

}  // namespace culturemod::pipeline
