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


#include "culturemod/core/culture.hpp"

#include <algorithm>

#include "culturemod/core/error.hpp"

namespace culturemod {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::configuration: return "configuration";
    case ErrorKind::empty_input: return "empty_input";
    case ErrorKind::retriable: return "retriable";
    case ErrorKind::not_found: return "not_found";
    case ErrorKind::unavailable: return "unavailable";
    case ErrorKind::conflict: return "conflict";
    case ErrorKind::io: return "io";
    case ErrorKind::diverged: return "diverged";
  }
  return "unknown";
}

CultureId::CultureId(std::string code) : code_(std::move(code)) {
  if (code_.empty()) {
    throw Error(ErrorKind::invalid_argument, "culture code must be non-empty");
  }
}

CultureRegistry CultureRegistry::defaults() {
  CultureRegistry registry;
  registry.add(CultureId("US"), "United States");
  registry.add(CultureId("UK"), "United Kingdom");
  registry.add(CultureId("CA"), "Canada");
  registry.add(CultureId("AU"), "Australia");
  registry.add(CultureId("NG"), "Nigeria");
  registry.add(CultureId("MY"), "Malaysia");
  registry.add(CultureId("ZA"), "South Africa");
  registry.add(CultureId("HK"), "Hong Kong");
  registry.add(CultureId("KE"), "Kenya");
  registry.add(CultureId("IN"), "India");
  return registry;
}

void CultureRegistry::add(const CultureId& id, std::string display_name) {
  if (id.empty()) {
    throw Error(ErrorKind::invalid_argument, "culture code must be non-empty");
  }
  if (contains(id)) {
    throw Error(ErrorKind::conflict, "culture already registered: " + id.code());
  }
  entries_.push_back({id, display_name.empty() ? id.code() : std::move(display_name)});
}

bool CultureRegistry::contains(const CultureId& id) const {
  return contains(id.code());
}

bool CultureRegistry::contains(std::string_view code) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const CultureInfo& e) { return e.id.code() == code; });
}

const CultureInfo& CultureRegistry::info(const CultureId& id) const {
  for (const auto& e : entries_) {
    if (e.id == id) return e;
  }
  throw Error(ErrorKind::not_found, "unknown culture: " + id.code());
}

std::string CultureRegistry::display_name(const CultureId& id) const {
  return info(id).display_name;
}

void CultureRegistry::require(const CultureId& id) const { (void)info(id); }

}  // namespace culturemod
