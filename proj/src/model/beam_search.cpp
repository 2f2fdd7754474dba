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


#include "culturemod/model/beam_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "culturemod/core/error.hpp"

namespace culturemod::model {

void DecodingConfig::validate() const {
  if (beam_width < 1) throw Error(ErrorKind::configuration, "beam_width must be >= 1");
  if (max_output_tokens < 1) throw Error(ErrorKind::configuration, "max_output_tokens must be >= 1");
  if (repetition_penalty <= 0.0) throw Error(ErrorKind::configuration, "repetition_penalty must be positive");
}

nlohmann::json DecodingConfig::to_json() const {
  return {{"beam_width", beam_width},
          {"length_penalty", length_penalty},
          {"repetition_penalty", repetition_penalty},
          {"max_output_tokens", max_output_tokens}};
}

DecodingConfig DecodingConfig::from_json(const nlohmann::json& j) {
  DecodingConfig c;
  c.beam_width = j.value("beam_width", c.beam_width);
  c.length_penalty = j.value("length_penalty", c.length_penalty);
  c.repetition_penalty = j.value("repetition_penalty", c.repetition_penalty);
  c.max_output_tokens = j.value("max_output_tokens", c.max_output_tokens);
  c.validate();
  return c;
}

void apply_repetition_penalty(std::vector<float>& logits, std::span<const int> generated,
                              double penalty) {
  if (penalty == 1.0) return;
  std::vector<bool> seen(logits.size(), false);
  for (int t : generated) {
    const auto i = static_cast<std::size_t>(t);
    if (i >= logits.size() || seen[i]) continue;
    seen[i] = true;
    logits[i] = logits[i] > 0.0f ? static_cast<float>(logits[i] / penalty)
                                 : static_cast<float>(logits[i] * penalty);
  }
}

std::vector<double> log_softmax(std::span<const float> logits) {
  double mx = -std::numeric_limits<double>::infinity();
  for (float v : logits) mx = std::max(mx, static_cast<double>(v));
  double sum = 0.0;
  for (float v : logits) sum += std::exp(v - mx);
  const double lse = mx + std::log(sum);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
  return out;
}

double length_normalized(double log_prob, int length, double length_penalty) {
  if (length_penalty == 0.0) return log_prob;
  return log_prob / std::pow(static_cast<double>(std::max(length, 1)), length_penalty);
}

namespace {

struct Beam {
  std::vector<int> prefix;  // starts with bos
  double log_prob = 0.0;
};

std::vector<double> step_log_probs(const NextLogitsFn& next, const std::vector<int>& prefix,
                                   double repetition_penalty) {
  auto logits = next(prefix);
  apply_repetition_penalty(logits, std::span<const int>(prefix).subspan(1), repetition_penalty);
  return log_softmax(logits);
}

DecodeResult finish(const Beam& b, bool ended, double length_penalty) {
  DecodeResult r;
  r.tokens.assign(b.prefix.begin() + 1, b.prefix.end());
  r.finished = ended;
  r.log_prob = b.log_prob;
  const int length = static_cast<int>(r.tokens.size()) + (ended ? 1 : 0);
  r.score = length_normalized(b.log_prob, length, length_penalty);
  return r;
}

}  // namespace

DecodeResult greedy_decode(const NextLogitsFn& next, int bos, int eos, const DecodingConfig& cfg) {
  cfg.validate();
  Beam b{{bos}, 0.0};
  for (int step = 0; step < cfg.max_output_tokens; ++step) {
    const auto lp = step_log_probs(next, b.prefix, cfg.repetition_penalty);
    const auto best = static_cast<int>(std::max_element(lp.begin(), lp.end()) - lp.begin());
    b.log_prob += lp[static_cast<std::size_t>(best)];
    if (best == eos) return finish(b, true, cfg.length_penalty);
    b.prefix.push_back(best);
  }
  return finish(b, false, cfg.length_penalty);
}

DecodeResult beam_search(const NextLogitsFn& next, int bos, int eos, const DecodingConfig& cfg) {
  cfg.validate();
  struct Candidate {
    double log_prob;
    std::size_t beam;
    int token;
  };
  std::vector<Beam> live{{{bos}, 0.0}};
  std::vector<DecodeResult> finished;
  for (int step = 0; step < cfg.max_output_tokens && !live.empty(); ++step) {
    std::vector<Candidate> cands;
    for (std::size_t bi = 0; bi < live.size(); ++bi) {
      const auto lp = step_log_probs(next, live[bi].prefix, cfg.repetition_penalty);
      for (std::size_t t = 0; t < lp.size(); ++t) {
        cands.push_back({live[bi].log_prob + lp[t], bi, static_cast<int>(t)});
      }
    }
    const std::size_t keep = std::min(cands.size(), static_cast<std::size_t>(cfg.beam_width));
    // Ties resolve to the lower (beam, token) pair, matching greedy argmax.
    std::partial_sort(cands.begin(), cands.begin() + static_cast<long>(keep), cands.end(),
                      [](const Candidate& a, const Candidate& b) {
                        if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
                        if (a.beam != b.beam) return a.beam < b.beam;
                        return a.token < b.token;
                      });
    const bool last_step = step + 1 == cfg.max_output_tokens;
    std::vector<Beam> next_live;
    for (std::size_t i = 0; i < keep; ++i) {
      const auto& c = cands[i];
      Beam b{live[c.beam].prefix, c.log_prob};
      if (c.token == eos) {
        finished.push_back(finish(b, true, cfg.length_penalty));
        continue;
      }
      b.prefix.push_back(c.token);
      if (last_step) {
        finished.push_back(finish(b, false, cfg.length_penalty));
      } else {
        next_live.push_back(std::move(b));
      }
    }
    live = std::move(next_live);
  }
  const auto best = std::max_element(finished.begin(), finished.end(),
                                     [](const DecodeResult& a, const DecodeResult& b) {
                                       return a.score < b.score;
                                     });
  return *best;
}

}  // namespace culturemod::model
