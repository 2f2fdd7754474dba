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


#include "culturemod/service/annotation_store.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "culturemod/core/error.hpp"
#include "culturemod/core/io.hpp"
#include "culturemod/core/random.hpp"

namespace culturemod::service {

using nlohmann::json;

std::string MemoryAnnotationStore::append(const eval::AnnotationSession& session) {
  session.validate();
  std::unique_lock lock(mu_);
  if (!ids_.insert(session.session_id).second) {
    throw Error(ErrorKind::conflict, "session " + session.session_id + " already recorded");
  }
  sessions_.push_back(session);
  return session.session_id;
}

std::vector<eval::AnnotationSession> MemoryAnnotationStore::all() const {
  std::shared_lock lock(mu_);
  return sessions_;
}

bool MemoryAnnotationStore::contains(const std::string& session_id) const {
  std::shared_lock lock(mu_);
  return ids_.contains(session_id);
}

JsonlAnnotationStore::JsonlAnnotationStore(std::filesystem::path path) : path_(std::move(path)) {
  if (!std::filesystem::exists(path_)) return;
  for (const auto& row : io::read_jsonl(path_)) {
    cache_.append(eval::AnnotationSession::from_json(row));
  }
  spdlog::info("annotation store {}: {} sessions", path_.string(), cache_.all().size());
}

std::string JsonlAnnotationStore::append(const eval::AnnotationSession& session) {
  session.validate();
  std::lock_guard lock(write_mu_);
  if (cache_.contains(session.session_id)) {
    throw Error(ErrorKind::conflict, "session " + session.session_id + " already recorded");
  }
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  {
    std::ofstream out(path_, std::ios::app | std::ios::binary);
    out << session.to_json().dump() << '\n';
    out.flush();
    if (!out) throw Error(ErrorKind::io, "cannot append to " + path_.string());
  }
  return cache_.append(session);
}

std::vector<eval::AnnotationSession> JsonlAnnotationStore::all() const { return cache_.all(); }

bool JsonlAnnotationStore::contains(const std::string& session_id) const {
  return cache_.contains(session_id);
}

StudyCoordinator::StudyCoordinator(std::vector<eval::StudySet> sets) {
  for (auto& s : sets) {
    if (s.target_culture.empty()) throw Error(ErrorKind::configuration, "study set without target culture");
    if (!sets_.emplace(s.target_culture, std::move(s)).second) {
      throw Error(ErrorKind::configuration, "two study sets for one culture");
    }
  }
}

StudyCoordinator StudyCoordinator::load(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<eval::StudySet> sets;
  for (const auto& f : files) sets.push_back(eval::StudySet::from_json(io::read_json(f)));
  return StudyCoordinator(std::move(sets));
}

std::vector<CultureId> StudyCoordinator::cultures() const {
  std::vector<CultureId> out;
  for (const auto& [c, s] : sets_) out.push_back(c);
  return out;
}

std::string StudyCoordinator::session_id(const std::string& annotator, const CultureId& culture,
                                         const std::string& item_id) {
  std::string key = annotator;
  key += '\x1f';
  key += culture.code();
  key += '\x1f';
  key += item_id;
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(stable_hash(key)));
  return buf;
}

const eval::StudySet& StudyCoordinator::set_for(const std::optional<CultureId>& culture) const {
  if (sets_.empty()) throw Error(ErrorKind::unavailable, "no study is configured");
  if (!culture) {
    if (sets_.size() != 1) throw Error(ErrorKind::invalid_argument, "culture parameter required");
    return sets_.begin()->second;
  }
  auto it = sets_.find(*culture);
  if (it == sets_.end()) throw Error(ErrorKind::not_found, "no study for culture " + culture->code());
  return it->second;
}

std::optional<json> StudyCoordinator::next(const std::string& annotator, std::optional<CultureId> culture,
                                           const AnnotationStore& store) const {
  if (annotator.empty()) throw Error(ErrorKind::invalid_argument, "annotator is required");
  const auto& set = set_for(culture);
  for (std::size_t i = 0; i < set.questions.size(); ++i) {
    const auto& q = set.questions[i];
    const auto sid = session_id(annotator, set.target_culture, q.item_id);
    if (store.contains(sid)) continue;
    json j = q.blinded_json();
    j["session_id"] = sid;
    j["culture"] = set.target_culture.code();
    j["position"] = i + 1;
    j["total"] = set.questions.size();
    return j;
  }
  return std::nullopt;
}

eval::AnnotationSession StudyCoordinator::make_session(const json& raw) const {
  const json& body = raw.contains("session") ? raw["session"] : raw;
  if (!body.is_object()) throw Error(ErrorKind::invalid_argument, "session must be an object");
  eval::AnnotationSession s;
  std::optional<CultureId> culture;
  try {
    s.annotator_id = body.at("annotator").get<std::string>();
    s.item_id = body.at("item_id").get<std::string>();
    s.session_id = body.at("session_id").get<std::string>();
    s.ranking = body.at("ranking").get<std::vector<std::string>>();
    if (body.contains("culture")) culture = CultureId(body["culture"].get<std::string>());
  } catch (const json::exception& e) {
    throw Error(ErrorKind::invalid_argument, std::string("malformed session: ") + e.what());
  }
  const auto& set = set_for(culture);
  const eval::StudyQuestion* question = nullptr;
  for (const auto& q : set.questions) {
    if (q.item_id == s.item_id) question = &q;
  }
  if (!question) throw Error(ErrorKind::not_found, "unknown study item " + s.item_id);
  if (s.session_id != session_id(s.annotator_id, set.target_culture, s.item_id)) {
    throw Error(ErrorKind::invalid_argument, "session id does not match annotator and item");
  }
  s.annotator_culture = set.target_culture;
  s.model_assignment = question->assignment;
  s.validate();
  return s;
}

}  // namespace culturemod::service
