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
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "culturemod/core/culture.hpp"
#include "culturemod/model/bundle.hpp"

namespace culturemod::service {

struct CultureListing {
  CultureId culture;
  std::optional<model::Stage> stage;  // empty when the directory has no manifest yet
  std::string version;
  bool loaded = false;
};

// Culture -> bundle, one sub-directory per culture code. Bundles load on
// first use and stay pinned; reload swaps the entry atomically, so callers
// holding the old pointer finish on the old version.
class BundleRegistry {
 public:
  BundleRegistry() = default;
  explicit BundleRegistry(std::filesystem::path root);

  // In-memory entry, for tests and embedded use.
  void insert(const CultureId& culture, std::shared_ptr<const model::CulturalModelBundle> bundle);

  bool contains(const CultureId& culture) const;
  // not_found for unknown cultures, unavailable when the bundle cannot load.
  std::shared_ptr<const model::CulturalModelBundle> get(const CultureId& culture);
  std::shared_ptr<const model::CulturalModelBundle> reload(const CultureId& culture);

  // Sorted by culture code.
  std::vector<CultureListing> list() const;

 private:
  std::filesystem::path dir_for(const CultureId& culture) const;
  std::vector<CultureId> on_disk() const;
  std::shared_ptr<const model::CulturalModelBundle> load(const CultureId& culture) const;

  std::optional<std::filesystem::path> root_;
  mutable std::mutex mu_;
  std::map<CultureId, std::shared_ptr<const model::CulturalModelBundle>> loaded_;
  std::map<CultureId, bool> memory_only_;
};

}  // namespace culturemod::service
