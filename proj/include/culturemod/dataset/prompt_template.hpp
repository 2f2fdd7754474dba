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
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace culturemod::dataset {

enum class TemplateRole { system, violative, non_violative };

const char* to_string(TemplateRole role);
TemplateRole template_role_from_string(std::string_view name);

// The placeholders a template body may reference.
const std::set<std::string>& known_placeholders();

// Placeholders are `{name}` with name in [a-z_]; any other brace is literal.
class PromptTemplate {
 public:
  PromptTemplate(std::string template_id, TemplateRole role, std::string body);

  const std::string& id() const noexcept { return id_; }
  TemplateRole role() const noexcept { return role_; }
  const std::string& body() const noexcept { return body_; }
  const std::set<std::string>& placeholders() const noexcept { return placeholders_; }

  // Throws a configuration error when a referenced placeholder has no binding.
  std::string render(const std::map<std::string, std::string>& bindings) const;

 private:
  std::string id_;
  TemplateRole role_;
  std::string body_;
  std::set<std::string> placeholders_;
};

class TemplateSet {
 public:
  // The built-in prompts, identical to the files shipped under templates/.
  static TemplateSet defaults();
  // Reads system.txt, violative.txt and non_violative.txt from `dir`; missing
  // files are simply absent from the set.
  static TemplateSet load(const std::filesystem::path& dir);
  void save(const std::filesystem::path& dir) const;

  void set(PromptTemplate t);
  const PromptTemplate* find(TemplateRole role) const;
  // Throws a configuration error when absent.
  const PromptTemplate& require(TemplateRole role) const;

 private:
  std::map<TemplateRole, PromptTemplate> templates_;
};

}  // namespace culturemod::dataset
