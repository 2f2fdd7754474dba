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

#include <functional>
#include <span>
#include <vector>

#include <json.hpp>

namespace culturemod::model {

struct DecodingConfig {
  int beam_width = 4;
  // Finished hypotheses are ranked by log-prob / length^length_penalty.
  double length_penalty = 1.0;
  // Logits of already generated tokens are divided (if positive) or
  // multiplied (if negative) by this factor before the softmax.
  double repetition_penalty = 1.2;
  int max_output_tokens = 32;

  void validate() const;
  nlohmann::json to_json() const;
  static DecodingConfig from_json(const nlohmann::json& j);
};

// Next-token logits given the decoder prefix (which starts with [BOS]).
using NextLogitsFn = std::function<std::vector<float>(std::span<const int> prefix)>;

struct DecodeResult {
  std::vector<int> tokens;  // generated tokens, without [BOS]/[EOS]
  double log_prob = 0.0;
  double score = 0.0;  // length-normalized
  bool finished = false;  // ended with [EOS]
};

void apply_repetition_penalty(std::vector<float>& logits, std::span<const int> generated,
                              double penalty);
std::vector<double> log_softmax(std::span<const float> logits);
double length_normalized(double log_prob, int length, double length_penalty);

// Repetition-penalized argmax decoding.
DecodeResult greedy_decode(const NextLogitsFn& next, int bos, int eos, const DecodingConfig& cfg);

// Each step keeps the `beam_width` best (beam, token) expansions by cumulative
// log-prob; expansions ending in [EOS] retire to the finished pool. With
// beam_width 1 this is exactly greedy decoding; with a width covering every
// expansion it is exhaustive search.
DecodeResult beam_search(const NextLogitsFn& next, int bos, int eos, const DecodingConfig& cfg);

}  // namespace culturemod::model
