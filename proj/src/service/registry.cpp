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


#include "culturemod/service/registry.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>

#include "culturemod/core/error.hpp"

namespace culturemod::service {

BundleRegistry::BundleRegistry(std::filesystem::path root) : root_(std::move(root)) {}

void BundleRegistry::insert(const CultureId& culture,
                            std::shared_ptr<const model::CulturalModelBundle> bundle) {
  std::lock_guard lock(mu_);
  loaded_[culture] = std::move(bundle);
  memory_only_[culture] = true;
}

std::filesystem::path BundleRegistry::dir_for(const CultureId& culture) const {
  return *root_ / culture.code();
}

std::vector<CultureId> BundleRegistry::on_disk() const {
  std::vector<CultureId> out;
  if (!root_ || !std::filesystem::is_directory(*root_)) return out;
  for (const auto& entry : std::filesystem::directory_iterator(*root_)) {
    if (entry.is_directory()) out.emplace_back(entry.path().filename().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool BundleRegistry::contains(const CultureId& culture) const {
  {
    std::lock_guard lock(mu_);
    if (loaded_.contains(culture)) return true;
  }
  return root_ && !culture.empty() && culture.code().find('/') == std::string::npos &&
         culture.code() != "." && culture.code() != ".." && std::filesystem::is_directory(dir_for(culture));
}

std::shared_ptr<const model::CulturalModelBundle> BundleRegistry::load(const CultureId& culture) const {
  try {
    return std::make_shared<const model::CulturalModelBundle>(model::load_bundle(dir_for(culture)));
  } catch (const std::exception& e) {
    throw Error(ErrorKind::unavailable, "bundle for " + culture.code() + " is not loadable: " + e.what());
  }
}

std::shared_ptr<const model::CulturalModelBundle> BundleRegistry::get(const CultureId& culture) {
  if (!contains(culture)) throw Error(ErrorKind::not_found, "unknown culture " + culture.code());
  std::lock_guard lock(mu_);
  auto it = loaded_.find(culture);
  if (it != loaded_.end()) return it->second;
  auto bundle = load(culture);
  spdlog::info("loaded bundle {} version {}", culture.code(), bundle->version());
  loaded_[culture] = bundle;
  return bundle;
}

std::shared_ptr<const model::CulturalModelBundle> BundleRegistry::reload(const CultureId& culture) {
  if (!contains(culture)) throw Error(ErrorKind::not_found, "unknown culture " + culture.code());
  {
    std::lock_guard lock(mu_);
    if (memory_only_.contains(culture)) return loaded_.at(culture);
  }
  auto bundle = load(culture);  // outside the lock; requests keep using the old entry
  std::lock_guard lock(mu_);
  loaded_[culture] = bundle;
  spdlog::info("reloaded bundle {} version {}", culture.code(), bundle->version());
  return bundle;
}

std::vector<CultureListing> BundleRegistry::list() const {
  std::map<CultureId, CultureListing> rows;
  for (const auto& c : on_disk()) {
    CultureListing l;
    l.culture = c;
    const auto manifest = dir_for(c) / "manifest.json";
    if (std::filesystem::exists(manifest)) {
      try {
        const auto s = model::read_bundle_summary(dir_for(c));
        l.stage = s.stage;
        l.version = s.version;
      } catch (const std::exception& e) {
        spdlog::warn("unreadable manifest for {}: {}", c.code(), e.what());
      }
    }
    rows[c] = l;
  }
  std::lock_guard lock(mu_);
  for (const auto& [c, b] : loaded_) {
    auto& l = rows[c];
    l.culture = c;
    l.stage = b->stage;
    l.version = b->version();
    l.loaded = true;
  }
  std::vector<CultureListing> out;
  for (auto& [c, l] : rows) out.push_back(std::move(l));
  return out;
}

}  // namespace culturemod::service
