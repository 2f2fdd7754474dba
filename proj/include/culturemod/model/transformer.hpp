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

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace culturemod::model {

struct EncoderDecoderConfig {
  int vocab_size = 0;
  int hidden_dim = 128;
  int num_layers = 2;
  int num_heads = 4;
  int ffn_dim = 512;
  int max_sequence_length = 64;
  std::string tokenizer_id = "word";

  void validate() const;
  nlohmann::json to_json() const;
  static EncoderDecoderConfig from_json(const nlohmann::json& j);
  bool operator==(const EncoderDecoderConfig&) const = default;
};

// Row-major dense matrix.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<float> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0f) {}

  float* row(int i) { return data.data() + static_cast<std::size_t>(i) * cols; }
  const float* row(int i) const { return data.data() + static_cast<std::size_t>(i) * cols; }
  std::span<float> span() { return data; }
  std::span<const float> span() const { return data; }
};

struct Param {
  std::string name;
  int rows = 0;
  int cols = 0;
  std::vector<float> value;
  std::vector<float> grad;

  std::size_t size() const noexcept { return value.size(); }
  // Weight matrices get weight decay; biases, gains and embeddings do not.
  bool decays() const noexcept;
};

// Encoder output plus the per-layer cross-attention keys and values, so
// autoregressive decoding projects the source once.
struct EncodedSource {
  Matrix memory;
  std::vector<Matrix> cross_k;
  std::vector<Matrix> cross_v;
};

// Post-LayerNorm BERT-style encoder and decoder with learned positions, GELU
// feed-forward blocks and an untied output projection. Parameter names are
// prefixed "encoder." or "decoder." so the halves can be stored separately.
class Seq2SeqTransformer {
 public:
  Seq2SeqTransformer(const EncoderDecoderConfig& config, std::uint64_t seed);

  const EncoderDecoderConfig& config() const noexcept { return config_; }
  std::vector<Param>& params() noexcept { return params_; }
  const std::vector<Param>& params() const noexcept { return params_; }
  const Param& param(std::string_view name) const;
  std::size_t parameter_count() const;

  // [input_length × hidden_dim] final encoder states for an already framed
  // id sequence ([CLS] ... [SEP]).
  Matrix encode(std::span<const int> src) const;
  EncodedSource encode_source(std::span<const int> src) const;

  // Logits for the token after `prefix` (prefix starts with [BOS]).
  std::vector<float> next_token_logits(const EncodedSource& source,
                                       std::span<const int> prefix) const;

  // Teacher-forced cross-entropy summed over target positions. Gradients are
  // accumulated into Param::grad scaled by `grad_scale`.
  double accumulate_gradients(std::span<const int> src, std::span<const int> tgt_in,
                              std::span<const int> tgt_out, float grad_scale);
  double loss(std::span<const int> src, std::span<const int> tgt_in,
              std::span<const int> tgt_out) const;

  void zero_grad();

 private:
  struct LinearIdx { int w, b; };
  struct NormIdx { int g, b; };
  struct AttnIdx { LinearIdx q, k, v, o; };
  struct FfnIdx { LinearIdx in, out; };
  struct EncLayerIdx { AttnIdx attn; NormIdx ln1; FfnIdx ffn; NormIdx ln2; };
  struct DecLayerIdx { AttnIdx self; NormIdx ln1; AttnIdx cross; NormIdx ln2; FfnIdx ffn; NormIdx ln3; };
  struct EmbedIdx { int token, position; NormIdx ln; };

  friend struct TransformerPass;

  int add_param(std::string name, int rows, int cols);
  LinearIdx add_linear(const std::string& prefix, int in, int out);
  NormIdx add_norm(const std::string& prefix, int dim);
  AttnIdx add_attention(const std::string& prefix);
  void initialize(std::uint64_t seed);

  EncoderDecoderConfig config_;
  std::vector<Param> params_;
  EmbedIdx enc_embed_{};
  EmbedIdx dec_embed_{};
  std::vector<EncLayerIdx> enc_layers_;
  std::vector<DecLayerIdx> dec_layers_;
  LinearIdx lm_head_{};
};

}  // namespace culturemod::model
