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

#include <chrono>
#include <string>
#include <string_view>

namespace culturemod {

using Timestamp = std::chrono::sys_seconds;

// Accepts "YYYY-MM-DDTHH:MM:SS" with an optional fractional part and either a
// trailing "Z" or a "+HH:MM"/"-HH:MM" offset.
Timestamp parse_iso8601(std::string_view text);
std::string format_iso8601(Timestamp ts);

}  // namespace culturemod
