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


#include "culturemod/model/tokenizer.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "culturemod/core/error.hpp"

namespace culturemod::model {

namespace {

constexpr std::string_view kMagic = "culturemod-tokenizer 1";
constexpr std::string_view kEndOfWord = "</w>";

const std::vector<std::string>& special_tokens() {
  static const std::vector<std::string> tokens = {"[PAD]", "[UNK]", "[CLS]",
                                                  "[SEP]", "[BOS]", "[EOS]"};
  return tokens;
}

bool is_punct_word(const std::string& w) {
  return w.size() == 1 && !std::isalnum(static_cast<unsigned char>(w[0]));
}

std::vector<std::string> read_lines(std::string_view data) {
  std::vector<std::string> lines;
  std::string cur;
  std::istringstream in{std::string(data)};
  while (std::getline(in, cur)) lines.push_back(cur);
  return lines;
}

}  // namespace

std::vector<std::string> pre_tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
      continue;
    }
    if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
    if (!std::isspace(c) && c < 0x80) out.emplace_back(1, static_cast<char>(c));
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string join_words(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty() && !is_punct_word(w)) out.push_back(' ');
    out += w;
  }
  return out;
}

// ---------------------------------------------------------------- word

WordTokenizer WordTokenizer::train(const std::vector<std::string>& corpus, int max_vocab,
                                   int min_count) {
  std::unordered_map<std::string, int> counts;
  for (const auto& doc : corpus)
    for (auto& w : pre_tokenize(doc)) ++counts[w];
  std::vector<std::pair<std::string, int>> sorted(counts.begin(), counts.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::vector<std::string> tokens = special_tokens();
  for (const auto& [w, c] : sorted) {
    if (static_cast<int>(tokens.size()) >= max_vocab) break;
    if (c >= min_count) tokens.push_back(w);
  }
  return WordTokenizer(std::move(tokens));
}

WordTokenizer::WordTokenizer(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (static_cast<int>(tokens_.size()) < special::count) {
    throw Error(ErrorKind::configuration, "tokenizer vocabulary lacks special tokens");
  }
  for (std::size_t i = 0; i < tokens_.size(); ++i) index_.emplace(tokens_[i], static_cast<int>(i));
}

std::vector<int> WordTokenizer::encode(std::string_view text) const {
  std::vector<int> ids;
  for (const auto& w : pre_tokenize(text)) {
    const auto it = index_.find(w);
    ids.push_back(it == index_.end() ? special::unk : it->second);
  }
  return ids;
}

std::string WordTokenizer::decode(std::span<const int> ids) const {
  std::vector<std::string> words;
  for (int id : ids) {
    if (id < special::count || id >= vocab_size()) continue;
    words.push_back(tokens_[static_cast<std::size_t>(id)]);
  }
  return join_words(words);
}

std::string WordTokenizer::serialize() const {
  std::string out(kMagic);
  out += " word\n";
  for (const auto& t : tokens_) out += t + "\n";
  return out;
}

// ---------------------------------------------------------------- bpe

namespace {

using Symbols = std::vector<std::string>;

Symbols initial_symbols(const std::string& word) {
  Symbols s;
  for (std::size_t i = 0; i < word.size(); ++i) s.emplace_back(1, word[i]);
  if (!s.empty()) s.back() += kEndOfWord;
  return s;
}

}  // namespace

BpeTokenizer BpeTokenizer::train(const std::vector<std::string>& corpus, int target_vocab) {
  std::map<std::string, int> word_counts;
  for (const auto& doc : corpus)
    for (auto& w : pre_tokenize(doc)) ++word_counts[w];

  std::vector<std::pair<Symbols, int>> words;
  std::vector<std::string> tokens = special_tokens();
  std::unordered_map<std::string, int> seen;
  for (const auto& t : tokens) seen.emplace(t, 0);
  for (const auto& [w, c] : word_counts) {
    auto sym = initial_symbols(w);
    for (const auto& s : sym)
      if (seen.emplace(s, 0).second) tokens.push_back(s);
    words.emplace_back(std::move(sym), c);
  }
  std::sort(tokens.begin() + special::count, tokens.end());

  std::vector<std::pair<std::string, std::string>> merges;
  while (static_cast<int>(tokens.size()) < target_vocab) {
    std::map<std::pair<std::string, std::string>, long> pair_counts;
    for (const auto& [sym, c] : words)
      for (std::size_t i = 0; i + 1 < sym.size(); ++i) pair_counts[{sym[i], sym[i + 1]}] += c;
    if (pair_counts.empty()) break;
    // std::map iteration is lexicographic, so `>` keeps the smallest pair on ties.
    auto best = pair_counts.begin();
    for (auto it = pair_counts.begin(); it != pair_counts.end(); ++it)
      if (it->second > best->second) best = it;
    if (best->second < 2) break;
    const auto [left, right] = best->first;
    const std::string merged = left + right;
    merges.emplace_back(left, right);
    if (seen.emplace(merged, 0).second) tokens.push_back(merged);
    for (auto& [sym, c] : words) {
      Symbols next;
      for (std::size_t i = 0; i < sym.size(); ++i) {
        if (i + 1 < sym.size() && sym[i] == left && sym[i + 1] == right) {
          next.push_back(merged);
          ++i;
        } else {
          next.push_back(sym[i]);
        }
      }
      sym = std::move(next);
    }
  }
  return BpeTokenizer(std::move(tokens), std::move(merges));
}

BpeTokenizer::BpeTokenizer(std::vector<std::string> tokens,
                           std::vector<std::pair<std::string, std::string>> merges)
    : tokens_(std::move(tokens)), merges_(std::move(merges)) {
  if (static_cast<int>(tokens_.size()) < special::count) {
    throw Error(ErrorKind::configuration, "tokenizer vocabulary lacks special tokens");
  }
  for (std::size_t i = 0; i < tokens_.size(); ++i) index_.emplace(tokens_[i], static_cast<int>(i));
  for (std::size_t i = 0; i < merges_.size(); ++i) merge_rank_.emplace(merges_[i], static_cast<int>(i));
}

std::vector<std::string> BpeTokenizer::segment(const std::string& word) const {
  auto sym = initial_symbols(word);
  while (sym.size() > 1) {
    int best_rank = -1;
    std::size_t best_pos = 0;
    for (std::size_t i = 0; i + 1 < sym.size(); ++i) {
      const auto it = merge_rank_.find({sym[i], sym[i + 1]});
      if (it != merge_rank_.end() && (best_rank < 0 || it->second < best_rank)) {
        best_rank = it->second;
        best_pos = i;
      }
    }
    if (best_rank < 0) break;
    sym[best_pos] += sym[best_pos + 1];
    sym.erase(sym.begin() + static_cast<long>(best_pos) + 1);
  }
  return sym;
}

std::vector<int> BpeTokenizer::encode(std::string_view text) const {
  std::vector<int> ids;
  for (const auto& w : pre_tokenize(text)) {
    for (const auto& s : segment(w)) {
      const auto it = index_.find(s);
      ids.push_back(it == index_.end() ? special::unk : it->second);
    }
  }
  return ids;
}

std::string BpeTokenizer::decode(std::span<const int> ids) const {
  std::vector<std::string> words;
  std::string cur;
  for (int id : ids) {
    if (id < special::count || id >= vocab_size()) continue;
    const auto& t = tokens_[static_cast<std::size_t>(id)];
    if (t.size() >= kEndOfWord.size() &&
        t.compare(t.size() - kEndOfWord.size(), kEndOfWord.size(), kEndOfWord) == 0) {
      cur += t.substr(0, t.size() - kEndOfWord.size());
      words.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += t;
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return join_words(words);
}

std::string BpeTokenizer::serialize() const {
  std::string out(kMagic);
  out += " bpe\n";
  out += "vocab " + std::to_string(tokens_.size()) + "\n";
  for (const auto& t : tokens_) out += t + "\n";
  out += "merges " + std::to_string(merges_.size()) + "\n";
  for (const auto& [a, b] : merges_) out += a + " " + b + "\n";
  return out;
}

// ---------------------------------------------------------------- factory

std::unique_ptr<Tokenizer> Tokenizer::deserialize(std::string_view data) {
  const auto lines = read_lines(data);
  if (lines.empty() || lines[0].rfind(kMagic, 0) != 0) {
    throw Error(ErrorKind::configuration, "not a tokenizer file");
  }
  const std::string kind = lines[0].substr(kMagic.size() + 1);
  if (kind == "word") {
    return std::make_unique<WordTokenizer>(std::vector<std::string>(lines.begin() + 1, lines.end()));
  }
  if (kind == "bpe") {
    std::size_t pos = 1;
    const auto count_of = [&](std::string_view key) {
      if (pos >= lines.size() || lines[pos].rfind(key, 0) != 0) {
        throw Error(ErrorKind::configuration, "corrupt bpe tokenizer");
      }
      return static_cast<std::size_t>(std::stoul(lines[pos++].substr(key.size() + 1)));
    };
    const auto nv = count_of("vocab");
    std::vector<std::string> tokens(lines.begin() + static_cast<long>(pos),
                                    lines.begin() + static_cast<long>(pos + nv));
    pos += nv;
    const auto nm = count_of("merges");
    std::vector<std::pair<std::string, std::string>> merges;
    for (std::size_t i = 0; i < nm; ++i, ++pos) {
      const auto& l = lines.at(pos);
      const auto sp = l.find(' ');
      merges.emplace_back(l.substr(0, sp), l.substr(sp + 1));
    }
    return std::make_unique<BpeTokenizer>(std::move(tokens), std::move(merges));
  }
  throw Error(ErrorKind::configuration, "unknown tokenizer kind: " + kind);
}

std::unique_ptr<Tokenizer> train_tokenizer(std::string_view kind,
                                           const std::vector<std::string>& corpus,
                                           int vocab_budget) {
  if (kind == "word") return std::make_unique<WordTokenizer>(WordTokenizer::train(corpus, vocab_budget));
  if (kind == "bpe") return std::make_unique<BpeTokenizer>(BpeTokenizer::train(corpus, vocab_budget));
  throw Error(ErrorKind::configuration, "unknown tokenizer kind: " + std::string(kind));
}

}  // namespace culturemod::model
