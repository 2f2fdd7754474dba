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
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "culturemod/eval/study.hpp"

namespace culturemod::service {

// Append-only session storage. Writes are serialized; reads may run
// concurrently with each other.
class AnnotationStore {
 public:
  virtual ~AnnotationStore() = default;
  // Returns the stored id (the session id). Duplicate ids are a conflict.
  virtual std::string append(const eval::AnnotationSession& session) = 0;
  virtual std::vector<eval::AnnotationSession> all() const = 0;
  virtual bool contains(const std::string& session_id) const = 0;
};

class MemoryAnnotationStore final : public AnnotationStore {
 public:
  std::string append(const eval::AnnotationSession& session) override;
  std::vector<eval::AnnotationSession> all() const override;
  bool contains(const std::string& session_id) const override;

 private:
  mutable std::shared_mutex mu_;
  std::vector<eval::AnnotationSession> sessions_;
  std::set<std::string> ids_;
};

// One JSON object per line; existing lines are read back on open.
class JsonlAnnotationStore final : public AnnotationStore {
 public:
  explicit JsonlAnnotationStore(std::filesystem::path path);
  std::string append(const eval::AnnotationSession& session) override;
  std::vector<eval::AnnotationSession> all() const override;
  bool contains(const std::string& session_id) const override;

 private:
  std::filesystem::path path_;
  MemoryAnnotationStore cache_;
  std::mutex write_mu_;
};

// Hands out study items to annotators and turns their rankings into sessions.
// The slot -> culture mapping stays here and in the store.
class StudyCoordinator {
 public:
  StudyCoordinator() = default;
  explicit StudyCoordinator(std::vector<eval::StudySet> sets);
  // Reads every *.json StudySet in `dir`.
  static StudyCoordinator load(const std::filesystem::path& dir);

  bool empty() const { return sets_.empty(); }
  std::vector<CultureId> cultures() const;

  static std::string session_id(const std::string& annotator, const CultureId& culture,
                                const std::string& item_id);

  // Next unranked item for the annotator: blinded question plus session id,
  // or nullopt when the annotator has finished. `culture` may be omitted when
  // only one study set exists.
  std::optional<nlohmann::json> next(const std::string& annotator, std::optional<CultureId> culture,
                                     const AnnotationStore& store) const;

  // Body: {session_id, annotator, culture, item_id, ranking}; optionally
  // wrapped as {"session": {...}}.
  eval::AnnotationSession make_session(const nlohmann::json& body) const;

 private:
  const eval::StudySet& set_for(const std::optional<CultureId>& culture) const;
  std::map<CultureId, eval::StudySet> sets_;
};

}  // namespace culturemod::service
