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


#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <vector>

#include "culturemod/core/error.hpp"
#include "culturemod/model/transformer.hpp"

using namespace culturemod;
using namespace culturemod::model;

namespace {

EncoderDecoderConfig tiny() {
  EncoderDecoderConfig c;
  c.vocab_size = 13;
  c.hidden_dim = 16;
  c.num_layers = 2;
  c.num_heads = 2;
  c.ffn_dim = 24;
  c.max_sequence_length = 12;
  return c;
}

std::size_t closed_form_count(const EncoderDecoderConfig& c) {
  const std::size_t v = c.vocab_size, h = c.hidden_dim, f = c.ffn_dim, p = c.max_sequence_length,
                    l = c.num_layers;
  const std::size_t embed = v * h + p * h + 2 * h;
  const std::size_t attn = 4 * (h * h + h);
  const std::size_t norm = 2 * h;
  const std::size_t ffn = h * f + f + f * h + h;
  const std::size_t enc_layer = attn + norm + ffn + norm;
  const std::size_t dec_layer = 2 * attn + 3 * norm + ffn;
  return 2 * embed + l * (enc_layer + dec_layer) + h * v + v;
}

}  // namespace

TEST_CASE("parameter count matches the closed form") {
  for (auto c : {tiny(), [] {
         EncoderDecoderConfig d;
         d.vocab_size = 4000;
         return d;
       }()}) {
    Seq2SeqTransformer m(c, 1);
    CHECK(m.parameter_count() == closed_form_count(c));
  }
}

TEST_CASE("config validation") {
  auto c = tiny();
  c.num_heads = 3;
  CHECK_THROWS_AS(c.validate(), Error);
  c = tiny();
  c.max_sequence_length = 7;
  CHECK_THROWS_AS(c.validate(), Error);
  c = tiny();
  CHECK(EncoderDecoderConfig::from_json(c.to_json()) == c);
}

TEST_CASE("random init is deterministic per seed") {
  Seq2SeqTransformer a(tiny(), 42), b(tiny(), 42), c(tiny(), 43);
  bool all_equal = true, any_diff = false;
  for (std::size_t i = 0; i < a.params().size(); ++i) {
    all_equal = all_equal && a.params()[i].value == b.params()[i].value;
    any_diff = any_diff || a.params()[i].value != c.params()[i].value;
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("incremental decoding agrees with the teacher-forced loss") {
  Seq2SeqTransformer m(tiny(), 5);
  const std::vector<int> src = {2, 7, 8, 9, 3};
  const std::vector<int> in = {4, 10, 11, 6};
  const std::vector<int> out = {10, 11, 6, 5};
  const auto enc = m.encode_source(src);
  double nll = 0.0;
  for (std::size_t t = 0; t < in.size(); ++t) {
    const auto logits = m.next_token_logits(enc, std::span<const int>(in.data(), t + 1));
    double mx = -1e30;
    for (float z : logits) mx = std::max(mx, static_cast<double>(z));
    double s = 0.0;
    for (float z : logits) s += std::exp(z - mx);
    nll -= logits[out[t]] - mx - std::log(s);
  }
  CHECK(m.loss(src, in, out) == doctest::Approx(nll).epsilon(1e-4));
  const auto full = m.encode(src);
  CHECK(full.data == enc.memory.data);
}

TEST_CASE("analytic gradients match central differences") {
  Seq2SeqTransformer m(tiny(), 9);
  const std::vector<int> src = {2, 7, 8, 12, 9, 3};
  const std::vector<int> in = {4, 10, 11, 7};
  const std::vector<int> out = {10, 11, 7, 5};
  m.zero_grad();
  m.accumulate_gradients(src, in, out, 1.0f);
  int checked = 0, bad = 0;
  for (auto& p : m.params()) {
    // A few coordinates per tensor, spread across the buffer.
    const std::size_t step = std::max<std::size_t>(1, p.size() / 3);
    for (std::size_t i = 0; i < p.size(); i += step) {
      const float orig = p.value[i];
      const float h = 1e-2f;
      p.value[i] = orig + h;
      const double up = m.loss(src, in, out);
      p.value[i] = orig - h;
      const double down = m.loss(src, in, out);
      p.value[i] = orig;
      const double numeric = (up - down) / (2.0 * h);
      const double analytic = p.grad[i];
      ++checked;
      if (std::abs(numeric - analytic) > 2e-3 + 2e-2 * std::abs(numeric)) {
        ++bad;
        MESSAGE(p.name << "[" << i << "] analytic=" << analytic << " numeric=" << numeric);
      }
    }
  }
  CHECK(checked > 100);
  CHECK(bad == 0);
}

TEST_CASE("gradients are independent of accumulation order") {
  Seq2SeqTransformer m(tiny(), 3);
  const std::vector<int> src = {2, 7, 3}, in = {4, 8}, out = {8, 5};
  m.zero_grad();
  m.accumulate_gradients(src, in, out, 0.5f);
  m.accumulate_gradients(src, in, out, 0.5f);
  const auto twice = m.params()[0].grad;
  m.zero_grad();
  m.accumulate_gradients(src, in, out, 1.0f);
  for (std::size_t i = 0; i < twice.size(); ++i) {
    CHECK(twice[i] == doctest::Approx(m.params()[0].grad[i]).epsilon(1e-5));
  }
}
