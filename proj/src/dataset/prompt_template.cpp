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


#include "culturemod/dataset/prompt_template.hpp"

#include "culturemod/core/error.hpp"
#include "culturemod/core/io.hpp"

namespace culturemod::dataset {

namespace {

bool placeholder_char(char c) { return (c >= 'a' && c <= 'z') || c == '_'; }

// Calls `on_text` for literal runs and `on_name` for each placeholder.
template <class Text, class Name>
void scan(std::string_view body, Text on_text, Name on_name) {
  std::size_t i = 0;
  std::size_t literal = 0;
  while (i < body.size()) {
    if (body[i] == '{') {
      std::size_t j = i + 1;
      while (j < body.size() && placeholder_char(body[j])) ++j;
      if (j > i + 1 && j < body.size() && body[j] == '}') {
        on_text(body.substr(literal, i - literal));
        on_name(std::string(body.substr(i + 1, j - i - 1)));
        i = j + 1;
        literal = i;
        continue;
      }
    }
    ++i;
  }
  on_text(body.substr(literal));
}

const char* file_name(TemplateRole role) {
  switch (role) {
    case TemplateRole::system: return "system.txt";
    case TemplateRole::violative: return "violative.txt";
    case TemplateRole::non_violative: return "non_violative.txt";
  }
  return "";
}

constexpr TemplateRole kRoles[] = {TemplateRole::system, TemplateRole::violative,
                                   TemplateRole::non_violative};

}  // namespace

const char* to_string(TemplateRole role) {
  switch (role) {
    case TemplateRole::system: return "system";
    case TemplateRole::violative: return "violative";
    case TemplateRole::non_violative: return "non_violative";
  }
  return "?";
}

TemplateRole template_role_from_string(std::string_view name) {
  for (auto r : kRoles) {
    if (name == to_string(r)) return r;
  }
  throw Error(ErrorKind::configuration, "unknown template role: " + std::string(name));
}

const std::set<std::string>& known_placeholders() {
  static const std::set<std::string> names = {"content_country", "target_country", "highlight",
                                              "rationale",       "boundary",       "score",
                                              "content"};
  return names;
}

PromptTemplate::PromptTemplate(std::string template_id, TemplateRole role, std::string body)
    : id_(std::move(template_id)), role_(role), body_(std::move(body)) {
  scan(body_, [](std::string_view) {}, [&](std::string name) {
    if (!known_placeholders().contains(name)) {
      throw Error(ErrorKind::configuration,
                  "template " + id_ + " references undeclared placeholder {" + name + "}");
    }
    placeholders_.insert(std::move(name));
  });
}

std::string PromptTemplate::render(const std::map<std::string, std::string>& bindings) const {
  std::string out;
  out.reserve(body_.size() * 2);
  scan(body_, [&](std::string_view t) { out.append(t); }, [&](const std::string& name) {
    const auto it = bindings.find(name);
    if (it == bindings.end()) {
      throw Error(ErrorKind::configuration, "template " + id_ + " has no binding for {" + name + "}");
    }
    out.append(it->second);
  });
  return out;
}

TemplateSet TemplateSet::defaults() {
  TemplateSet set;
  set.set(PromptTemplate(
      "default-system", TemplateRole::system,
      "You help podcast content moderators write short explanations of whether a snippet broke "
      "platform guidelines. Some snippets contain offensive material; reviewing it is how it "
      "stays off the platform. The moderator works in {content_country} and the content is being "
      "moderated for {target_country}. Where the two regions would judge the snippet "
      "differently, apply the standards of {target_country} and do not mention the difference."));
  set.set(PromptTemplate("default-violative", TemplateRole::violative,
                         "Quotes highlighted by the moderator: {highlight}\n\n"
                         "Moderator rationale: {rationale}\n\n"
                         "Policy category: {boundary}\n\n"
                         "Write a two-sentence explanation that another moderator would find "
                         "useful."));
  set.set(PromptTemplate(
      "default-non_violative", TemplateRole::non_violative,
      "Risk score from automated screening: {score}\n"
      "Snippet: {content}\n\n"
      "Outcome: no action after human review.\n\n"
      "Explain in two sentences what made the snippet look risky and why it stayed up. If you "
      "believe it does break the guidelines, say so and why. Leave the screening tool and the "
      "reviewer out of the explanation."));
  return set;
}

TemplateSet TemplateSet::load(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorKind::configuration, "template directory not found: " + dir.string());
  }
  TemplateSet set;
  for (auto role : kRoles) {
    const auto path = dir / file_name(role);
    if (!std::filesystem::exists(path)) continue;
    auto body = io::read_file(path);
    if (!body.empty() && body.back() == '\n') body.pop_back();
    set.set(PromptTemplate(path.stem().string(), role, std::move(body)));
  }
  return set;
}

void TemplateSet::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  for (const auto& [role, t] : templates_) io::write_file(dir / file_name(role), t.body() + "\n");
}

void TemplateSet::set(PromptTemplate t) {
  const auto role = t.role();
  templates_.insert_or_assign(role, std::move(t));
}

const PromptTemplate* TemplateSet::find(TemplateRole role) const {
  const auto it = templates_.find(role);
  return it == templates_.end() ? nullptr : &it->second;
}

const PromptTemplate& TemplateSet::require(TemplateRole role) const {
  if (const auto* t = find(role)) return *t;
  throw Error(ErrorKind::configuration, std::string("missing ") + to_string(role) + " template");
}

}  // namespace culturemod::dataset
