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

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace culturemod::model {

namespace special {
inline constexpr int pad = 0;
inline constexpr int unk = 1;
inline constexpr int cls = 2;
inline constexpr int sep = 3;
inline constexpr int bos = 4;
inline constexpr int eos = 5;
inline constexpr int count = 6;
}  // namespace special

// Lowercases and splits into alphanumeric words and single punctuation marks.
std::vector<std::string> pre_tokenize(std::string_view text);

// Joins surface words with spaces, attaching punctuation to the left.
std::string join_words(const std::vector<std::string>& words);

class Tokenizer {
 public:
  virtual ~Tokenizer() = default;

  virtual std::string id() const = 0;
  virtual int vocab_size() const = 0;
  // Content ids only; callers add [CLS]/[SEP]/[BOS]/[EOS].
  virtual std::vector<int> encode(std::string_view text) const = 0;
  // Special ids are skipped.
  virtual std::string decode(std::span<const int> ids) const = 0;
  virtual const std::string& token(int id) const = 0;
  virtual std::string serialize() const = 0;

  static std::unique_ptr<Tokenizer> deserialize(std::string_view data);
};

// Whole-word vocabulary; the fallback for small fixtures.
class WordTokenizer final : public Tokenizer {
 public:
  static WordTokenizer train(const std::vector<std::string>& corpus, int max_vocab,
                             int min_count = 1);
  explicit WordTokenizer(std::vector<std::string> tokens);

  std::string id() const override { return "word"; }
  int vocab_size() const override { return static_cast<int>(tokens_.size()); }
  std::vector<int> encode(std::string_view text) const override;
  std::string decode(std::span<const int> ids) const override;
  const std::string& token(int id) const override { return tokens_.at(static_cast<std::size_t>(id)); }
  std::string serialize() const override;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

// Byte-pair subword vocabulary learned from a corpus; word-final symbols carry
// a "</w>" suffix.
class BpeTokenizer final : public Tokenizer {
 public:
  static BpeTokenizer train(const std::vector<std::string>& corpus, int target_vocab);
  BpeTokenizer(std::vector<std::string> tokens,
               std::vector<std::pair<std::string, std::string>> merges);

  std::string id() const override { return "bpe"; }
  int vocab_size() const override { return static_cast<int>(tokens_.size()); }
  std::vector<int> encode(std::string_view text) const override;
  std::string decode(std::span<const int> ids) const override;
  const std::string& token(int id) const override { return tokens_.at(static_cast<std::size_t>(id)); }
  std::string serialize() const override;

  std::vector<std::string> segment(const std::string& word) const;

 private:
  std::vector<std::string> tokens_;
  std::vector<std::pair<std::string, std::string>> merges_;
  std::unordered_map<std::string, int> index_;
  std::map<std::pair<std::string, std::string>, int> merge_rank_;
};

std::unique_ptr<Tokenizer> train_tokenizer(std::string_view kind,
                                           const std::vector<std::string>& corpus,
                                           int vocab_budget);

}  // namespace culturemod::model
