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

#include <compare>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace culturemod {

// Short region code such as "US" or "AU".
class CultureId {
 public:
  CultureId() = default;
  explicit CultureId(std::string code);

  const std::string& code() const noexcept { return code_; }
  bool empty() const noexcept { return code_.empty(); }

  auto operator<=>(const CultureId&) const = default;

 private:
  std::string code_;
};

struct CultureInfo {
  CultureId id;
  std::string display_name;
};

class CultureRegistry {
 public:
  CultureRegistry() = default;

  // The ten case-study regions.
  static CultureRegistry defaults();

  void add(const CultureId& id, std::string display_name);
  bool contains(const CultureId& id) const;
  bool contains(std::string_view code) const;
  const CultureInfo& info(const CultureId& id) const;
  std::string display_name(const CultureId& id) const;

  // Throws not_found when the code is not registered.
  void require(const CultureId& id) const;

  const std::vector<CultureInfo>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::vector<CultureInfo> entries_;
};

}  // namespace culturemod

template <>
struct std::hash<culturemod::CultureId> {
  std::size_t operator()(const culturemod::CultureId& id) const noexcept {
    return std::hash<std::string>{}(id.code());
  }
};
