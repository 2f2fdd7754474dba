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


#include "culturemod/model/transformer.hpp"

#include <algorithm>
#include <cmath>

#include "culturemod/core/error.hpp"
#include "culturemod/core/random.hpp"
#include "culturemod/kernels/kernels.hpp"

namespace culturemod::model {

namespace kn = kernels;
using nlohmann::json;

namespace {
constexpr float kNormEps = 1e-5f;
constexpr float kInitStd = 0.02f;
}  // namespace

void EncoderDecoderConfig::validate() const {
  if (vocab_size <= 0) throw Error(ErrorKind::configuration, "vocab_size must be positive");
  if (hidden_dim <= 0 || num_heads <= 0 || hidden_dim % num_heads != 0) {
    throw Error(ErrorKind::configuration, "hidden_dim must be divisible by num_heads");
  }
  if (num_layers <= 0) throw Error(ErrorKind::configuration, "num_layers must be positive");
  if (ffn_dim <= 0) throw Error(ErrorKind::configuration, "ffn_dim must be positive");
  if (max_sequence_length < 8) {
    throw Error(ErrorKind::configuration, "max_sequence_length must be at least 8");
  }
}

json EncoderDecoderConfig::to_json() const {
  return {{"vocab_size", vocab_size},   {"hidden_dim", hidden_dim},
          {"num_layers", num_layers},   {"num_heads", num_heads},
          {"ffn_dim", ffn_dim},         {"max_sequence_length", max_sequence_length},
          {"tokenizer_id", tokenizer_id}};
}

EncoderDecoderConfig EncoderDecoderConfig::from_json(const json& j) {
  EncoderDecoderConfig c;
  c.vocab_size = j.value("vocab_size", c.vocab_size);
  c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
  c.num_layers = j.value("num_layers", c.num_layers);
  c.num_heads = j.value("num_heads", c.num_heads);
  c.ffn_dim = j.value("ffn_dim", 4 * c.hidden_dim);
  c.max_sequence_length = j.value("max_sequence_length", c.max_sequence_length);
  c.tokenizer_id = j.value("tokenizer_id", c.tokenizer_id);
  return c;
}

bool Param::decays() const noexcept {
  return rows > 1 && cols > 1 && name.find(".embed.") == std::string::npos;
}

// ---------------------------------------------------------------- construction

Seq2SeqTransformer::Seq2SeqTransformer(const EncoderDecoderConfig& config, std::uint64_t seed)
    : config_(config) {
  config_.validate();
  const int h = config_.hidden_dim;
  const auto add_embed = [&](const std::string& prefix) {
    EmbedIdx e{};
    e.token = add_param(prefix + ".embed.token", config_.vocab_size, h);
    e.position = add_param(prefix + ".embed.position", config_.max_sequence_length, h);
    e.ln = add_norm(prefix + ".embed.norm", h);
    return e;
  };
  enc_embed_ = add_embed("encoder");
  for (int l = 0; l < config_.num_layers; ++l) {
    const std::string p = "encoder.layer" + std::to_string(l);
    EncLayerIdx layer{};
    layer.attn = add_attention(p + ".attn");
    layer.ln1 = add_norm(p + ".attn_norm", h);
    layer.ffn = {add_linear(p + ".ffn.in", h, config_.ffn_dim),
                 add_linear(p + ".ffn.out", config_.ffn_dim, h)};
    layer.ln2 = add_norm(p + ".ffn_norm", h);
    enc_layers_.push_back(layer);
  }
  dec_embed_ = add_embed("decoder");
  for (int l = 0; l < config_.num_layers; ++l) {
    const std::string p = "decoder.layer" + std::to_string(l);
    DecLayerIdx layer{};
    layer.self = add_attention(p + ".self_attn");
    layer.ln1 = add_norm(p + ".self_attn_norm", h);
    layer.cross = add_attention(p + ".cross_attn");
    layer.ln2 = add_norm(p + ".cross_attn_norm", h);
    layer.ffn = {add_linear(p + ".ffn.in", h, config_.ffn_dim),
                 add_linear(p + ".ffn.out", config_.ffn_dim, h)};
    layer.ln3 = add_norm(p + ".ffn_norm", h);
    dec_layers_.push_back(layer);
  }
  lm_head_ = add_linear("decoder.lm_head", h, config_.vocab_size);
  initialize(seed);
}

int Seq2SeqTransformer::add_param(std::string name, int rows, int cols) {
  Param p;
  p.name = std::move(name);
  p.rows = rows;
  p.cols = cols;
  p.value.assign(static_cast<std::size_t>(rows) * cols, 0.0f);
  p.grad.assign(p.value.size(), 0.0f);
  params_.push_back(std::move(p));
  return static_cast<int>(params_.size()) - 1;
}

Seq2SeqTransformer::LinearIdx Seq2SeqTransformer::add_linear(const std::string& prefix, int in,
                                                             int out) {
  return {add_param(prefix + ".weight", in, out), add_param(prefix + ".bias", 1, out)};
}

Seq2SeqTransformer::NormIdx Seq2SeqTransformer::add_norm(const std::string& prefix, int dim) {
  return {add_param(prefix + ".gamma", 1, dim), add_param(prefix + ".beta", 1, dim)};
}

Seq2SeqTransformer::AttnIdx Seq2SeqTransformer::add_attention(const std::string& prefix) {
  const int h = config_.hidden_dim;
  return {add_linear(prefix + ".q", h, h), add_linear(prefix + ".k", h, h),
          add_linear(prefix + ".v", h, h), add_linear(prefix + ".o", h, h)};
}

void Seq2SeqTransformer::initialize(std::uint64_t seed) {
  Rng rng = make_rng(seed, 0x1417);
  for (auto& p : params_) {
    const bool gain = p.name.ends_with(".gamma");
    const bool zero = p.name.ends_with(".bias") || p.name.ends_with(".beta");
    if (gain) {
      std::fill(p.value.begin(), p.value.end(), 1.0f);
      continue;
    }
    if (zero) continue;
    // Box-Muller keeps initial weights independent of the standard library.
    for (std::size_t i = 0; i < p.value.size(); i += 2) {
      const double u1 = 1.0 - uniform_unit(rng);
      const double u2 = uniform_unit(rng);
      const double r = std::sqrt(-2.0 * std::log(u1));
      p.value[i] = static_cast<float>(kInitStd * r * std::cos(2.0 * M_PI * u2));
      if (i + 1 < p.value.size()) {
        p.value[i + 1] = static_cast<float>(kInitStd * r * std::sin(2.0 * M_PI * u2));
      }
    }
  }
}

const Param& Seq2SeqTransformer::param(std::string_view name) const {
  for (const auto& p : params_)
    if (p.name == name) return p;
  throw Error(ErrorKind::not_found, "no parameter named " + std::string(name));
}

std::size_t Seq2SeqTransformer::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.size();
  return n;
}

void Seq2SeqTransformer::zero_grad() {
  for (auto& p : params_) std::fill(p.grad.begin(), p.grad.end(), 0.0f);
}

// ---------------------------------------------------------------- passes

namespace {

struct NormCache {
  Matrix xhat;
  std::vector<float> rstd;
};

struct AttnCache {
  Matrix q, k, v, ctx;
  std::vector<float> probs;
};

struct EncLayerCache {
  Matrix x;
  AttnCache attn;
  NormCache ln1;
  Matrix x1, h, g;
  NormCache ln2;
};

struct DecLayerCache {
  Matrix y;
  AttnCache self;
  NormCache ln1;
  Matrix y1;
  AttnCache cross;
  NormCache ln2;
  Matrix y2, h, g;
  NormCache ln3;
};

void add_in_place(Matrix& a, const Matrix& b) {
  for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] += b.data[i];
}

}  // namespace

struct TransformerPass {
  using M = Seq2SeqTransformer;
  const M& model;
  M* grads = nullptr;

  const Param& P(int i) const { return model.params_[static_cast<std::size_t>(i)]; }
  std::vector<float>& G(int i) { return grads->params_[static_cast<std::size_t>(i)].grad; }
  int hidden() const { return model.config_.hidden_dim; }
  int heads() const { return model.config_.num_heads; }

  Matrix linear(const M::LinearIdx& l, const Matrix& x) const {
    const Param& w = P(l.w);
    Matrix y(x.rows, w.cols);
    kn::matmul(x.span(), w.value, y.span(), x.rows, w.rows, w.cols);
    kn::add_row_bias(y.span(), P(l.b).value, y.rows, y.cols);
    return y;
  }

  // dx (+)= dy·Wᵀ when dx is given; parameter grads are always accumulated.
  void linear_back(const M::LinearIdx& l, const Matrix& x, const Matrix& dy, Matrix* dx,
                   bool accumulate_dx) {
    const Param& w = P(l.w);
    kn::matmul_tn(x.span(), dy.span(), G(l.w), w.rows, x.rows, w.cols, true);
    kn::column_sums(dy.span(), dy.rows, dy.cols, G(l.b), true);
    if (dx) {
      if (!accumulate_dx) *dx = Matrix(dy.rows, w.rows);
      kn::matmul_nt(dy.span(), w.value, dx->span(), dy.rows, w.cols, w.rows, accumulate_dx);
    }
  }

  Matrix norm(const M::NormIdx& n, const Matrix& x, NormCache& c) const {
    Matrix y(x.rows, x.cols);
    c.xhat = Matrix(x.rows, x.cols);
    c.rstd.assign(static_cast<std::size_t>(x.rows), 0.0f);
    kn::layer_norm_forward(x.span(), P(n.g).value, P(n.b).value, x.rows, x.cols, kNormEps,
                           y.span(), c.xhat.span(), c.rstd);
    return y;
  }

  Matrix norm_back(const M::NormIdx& n, const NormCache& c, const Matrix& dy) {
    Matrix dx(dy.rows, dy.cols);
    kn::layer_norm_backward(dy.span(), c.xhat.span(), c.rstd, P(n.g).value, dy.rows, dy.cols,
                            dx.span(), G(n.g), G(n.b));
    return dx;
  }

  Matrix embed(const M::EmbedIdx& e, std::span<const int> ids, NormCache& c) const {
    const int h = hidden();
    const int len = static_cast<int>(ids.size());
    if (len > model.config_.max_sequence_length) {
      throw Error(ErrorKind::invalid_argument, "sequence longer than max_sequence_length");
    }
    Matrix x(len, h);
    const Param& tok = P(e.token);
    const Param& pos = P(e.position);
    for (int i = 0; i < len; ++i) {
      const int id = ids[static_cast<std::size_t>(i)];
      if (id < 0 || id >= tok.rows) throw Error(ErrorKind::invalid_argument, "token id out of range");
      const float* t = tok.value.data() + static_cast<std::size_t>(id) * h;
      const float* p = pos.value.data() + static_cast<std::size_t>(i) * h;
      float* out = x.row(i);
      for (int j = 0; j < h; ++j) out[j] = t[j] + p[j];
    }
    return norm(e.ln, x, c);
  }

  void embed_back(const M::EmbedIdx& e, std::span<const int> ids, const NormCache& c,
                  const Matrix& dy) {
    const Matrix dx = norm_back(e.ln, c, dy);
    const int h = hidden();
    auto& tok = G(e.token);
    auto& pos = G(e.position);
    for (int i = 0; i < dx.rows; ++i) {
      const auto id = static_cast<std::size_t>(ids[static_cast<std::size_t>(i)]);
      const float* g = dx.row(i);
      for (int j = 0; j < h; ++j) {
        tok[id * h + j] += g[j];
        pos[static_cast<std::size_t>(i) * h + j] += g[j];
      }
    }
  }

  // Attention given projected keys/values; returns the output projection.
  Matrix attend(const M::AttnIdx& a, const Matrix& xq, Matrix keys, Matrix values, bool causal,
                AttnCache& c) const {
    c.q = linear(a.q, xq);
    c.k = std::move(keys);
    c.v = std::move(values);
    c.ctx = Matrix(xq.rows, hidden());
    c.probs.assign(static_cast<std::size_t>(heads()) * xq.rows * c.k.rows, 0.0f);
    kn::attention_forward(c.q.span(), c.k.span(), c.v.span(), xq.rows, c.k.rows, hidden(),
                          heads(), causal, c.probs, c.ctx.span());
    return linear(a.o, c.ctx);
  }

  // Accumulates into dxq and dxkv (which may alias for self-attention).
  void attend_back(const M::AttnIdx& a, const Matrix& xq, const Matrix& xkv, const AttnCache& c,
                   const Matrix& dout, Matrix& dxq, Matrix& dxkv) {
    Matrix dctx;
    linear_back(a.o, c.ctx, dout, &dctx, false);
    Matrix dq(c.q.rows, c.q.cols), dk(c.k.rows, c.k.cols), dv(c.v.rows, c.v.cols);
    std::vector<float> scratch(c.probs.size());
    kn::attention_backward(c.q.span(), c.k.span(), c.v.span(), c.probs, dctx.span(), c.q.rows,
                           c.k.rows, hidden(), heads(), dq.span(), dk.span(), dv.span(), scratch);
    linear_back(a.q, xq, dq, &dxq, true);
    linear_back(a.k, xkv, dk, &dxkv, true);
    linear_back(a.v, xkv, dv, &dxkv, true);
  }

  Matrix feed_forward(const M::FfnIdx& f, const Matrix& x, Matrix& h, Matrix& g) const {
    h = linear(f.in, x);
    g = Matrix(h.rows, h.cols);
    kn::gelu_forward(h.span(), g.span());
    return linear(f.out, g);
  }

  void feed_forward_back(const M::FfnIdx& f, const Matrix& x, const Matrix& h, const Matrix& g,
                         const Matrix& dout, Matrix& dx) {
    Matrix dg;
    linear_back(f.out, g, dout, &dg, false);
    Matrix dh(h.rows, h.cols);
    kn::gelu_backward(h.span(), dg.span(), dh.span());
    linear_back(f.in, x, dh, &dx, true);
  }

  // ---- encoder

  Matrix encoder(std::span<const int> src, NormCache& emb, std::vector<EncLayerCache>& layers) const {
    Matrix x = embed(model.enc_embed_, src, emb);
    layers.resize(model.enc_layers_.size());
    for (std::size_t l = 0; l < model.enc_layers_.size(); ++l) {
      const auto& L = model.enc_layers_[l];
      auto& c = layers[l];
      c.x = std::move(x);
      Matrix r1 = attend(L.attn, c.x, linear(L.attn.k, c.x), linear(L.attn.v, c.x), false, c.attn);
      add_in_place(r1, c.x);
      c.x1 = norm(L.ln1, r1, c.ln1);
      Matrix r2 = feed_forward(L.ffn, c.x1, c.h, c.g);
      add_in_place(r2, c.x1);
      x = norm(L.ln2, r2, c.ln2);
    }
    return x;
  }

  void encoder_back(std::span<const int> src, const NormCache& emb,
                    const std::vector<EncLayerCache>& layers, Matrix dx) {
    for (std::size_t l = layers.size(); l-- > 0;) {
      const auto& L = model.enc_layers_[l];
      const auto& c = layers[l];
      Matrix dr2 = norm_back(L.ln2, c.ln2, dx);
      Matrix dx1 = dr2;
      feed_forward_back(L.ffn, c.x1, c.h, c.g, dr2, dx1);
      Matrix dr1 = norm_back(L.ln1, c.ln1, dx1);
      Matrix dxin = dr1;
      attend_back(L.attn, c.x, c.x, c.attn, dr1, dxin, dxin);
      dx = std::move(dxin);
    }
    embed_back(model.enc_embed_, src, emb, dx);
  }

  // ---- decoder

  Matrix decoder(const EncodedSource& source, std::span<const int> tgt, NormCache& emb,
                 std::vector<DecLayerCache>& layers) const {
    Matrix y = embed(model.dec_embed_, tgt, emb);
    layers.resize(model.dec_layers_.size());
    for (std::size_t l = 0; l < model.dec_layers_.size(); ++l) {
      const auto& L = model.dec_layers_[l];
      auto& c = layers[l];
      c.y = std::move(y);
      Matrix r1 = attend(L.self, c.y, linear(L.self.k, c.y), linear(L.self.v, c.y), true, c.self);
      add_in_place(r1, c.y);
      c.y1 = norm(L.ln1, r1, c.ln1);
      Matrix r2 = attend(L.cross, c.y1, source.cross_k[l], source.cross_v[l], false, c.cross);
      add_in_place(r2, c.y1);
      c.y2 = norm(L.ln2, r2, c.ln2);
      Matrix r3 = feed_forward(L.ffn, c.y2, c.h, c.g);
      add_in_place(r3, c.y2);
      y = norm(L.ln3, r3, c.ln3);
    }
    return y;
  }

  // Returns d(memory).
  Matrix decoder_back(std::span<const int> tgt, const Matrix& memory, const NormCache& emb,
                      const std::vector<DecLayerCache>& layers, Matrix dy) {
    Matrix dmem(memory.rows, memory.cols);
    for (std::size_t l = layers.size(); l-- > 0;) {
      const auto& L = model.dec_layers_[l];
      const auto& c = layers[l];
      Matrix dr3 = norm_back(L.ln3, c.ln3, dy);
      Matrix dy2 = dr3;
      feed_forward_back(L.ffn, c.y2, c.h, c.g, dr3, dy2);
      Matrix dr2 = norm_back(L.ln2, c.ln2, dy2);
      Matrix dy1 = dr2;
      attend_back(L.cross, c.y1, memory, c.cross, dr2, dy1, dmem);
      Matrix dr1 = norm_back(L.ln1, c.ln1, dy1);
      Matrix dyin = dr1;
      attend_back(L.self, c.y, c.y, c.self, dr1, dyin, dyin);
      dy = std::move(dyin);
    }
    embed_back(model.dec_embed_, tgt, emb, dy);
    return dmem;
  }

  EncodedSource project_source(Matrix memory) const {
    EncodedSource s;
    for (const auto& L : model.dec_layers_) {
      s.cross_k.push_back(linear(L.cross.k, memory));
      s.cross_v.push_back(linear(L.cross.v, memory));
    }
    s.memory = std::move(memory);
    return s;
  }

  // Cross-entropy over rows of logits; overwrites logits with d(loss)/d(logits)·scale.
  static double cross_entropy(Matrix& logits, std::span<const int> targets, float scale) {
    kn::softmax_rows(logits.span(), logits.rows, logits.cols);
    double loss = 0.0;
    for (int i = 0; i < logits.rows; ++i) {
      float* row = logits.row(i);
      const int t = targets[static_cast<std::size_t>(i)];
      loss -= std::log(std::max(static_cast<double>(row[t]), 1e-30));
      row[t] -= 1.0f;
      for (int j = 0; j < logits.cols; ++j) row[j] *= scale;
    }
    return loss;
  }
};

Matrix Seq2SeqTransformer::encode(std::span<const int> src) const {
  if (src.empty()) throw Error(ErrorKind::invalid_argument, "empty source sequence");
  TransformerPass pass{*this};
  NormCache emb;
  std::vector<EncLayerCache> layers;
  return pass.encoder(src, emb, layers);
}

EncodedSource Seq2SeqTransformer::encode_source(std::span<const int> src) const {
  TransformerPass pass{*this};
  return pass.project_source(encode(src));
}

std::vector<float> Seq2SeqTransformer::next_token_logits(const EncodedSource& source,
                                                         std::span<const int> prefix) const {
  if (prefix.empty()) throw Error(ErrorKind::invalid_argument, "decoder prefix must start with [BOS]");
  TransformerPass pass{*this};
  NormCache emb;
  std::vector<DecLayerCache> layers;
  const Matrix y = pass.decoder(source, prefix, emb, layers);
  const Param& w = params_[static_cast<std::size_t>(lm_head_.w)];
  const Param& b = params_[static_cast<std::size_t>(lm_head_.b)];
  std::vector<float> logits(b.value);
  kn::matmul(std::span<const float>(y.row(y.rows - 1), static_cast<std::size_t>(y.cols)), w.value,
             logits, 1, w.rows, w.cols, true);
  return logits;
}

double Seq2SeqTransformer::accumulate_gradients(std::span<const int> src,
                                                std::span<const int> tgt_in,
                                                std::span<const int> tgt_out, float grad_scale) {
  if (tgt_in.size() != tgt_out.size() || tgt_in.empty()) {
    throw Error(ErrorKind::invalid_argument, "decoder input/target length mismatch");
  }
  TransformerPass pass{*this, this};
  NormCache enc_emb, dec_emb;
  std::vector<EncLayerCache> enc_layers;
  std::vector<DecLayerCache> dec_layers;
  const EncodedSource source = pass.project_source(pass.encoder(src, enc_emb, enc_layers));
  const Matrix y = pass.decoder(source, tgt_in, dec_emb, dec_layers);
  Matrix dlogits = pass.linear(lm_head_, y);
  const double loss = TransformerPass::cross_entropy(dlogits, tgt_out, grad_scale);

  Matrix dy;
  pass.linear_back(lm_head_, y, dlogits, &dy, false);
  Matrix dmem = pass.decoder_back(tgt_in, source.memory, dec_emb, dec_layers, std::move(dy));
  pass.encoder_back(src, enc_emb, enc_layers, std::move(dmem));
  return loss;
}

double Seq2SeqTransformer::loss(std::span<const int> src, std::span<const int> tgt_in,
                                std::span<const int> tgt_out) const {
  TransformerPass pass{*this};
  NormCache enc_emb, dec_emb;
  std::vector<EncLayerCache> enc_layers;
  std::vector<DecLayerCache> dec_layers;
  const EncodedSource source = pass.project_source(pass.encoder(src, enc_emb, enc_layers));
  const Matrix y = pass.decoder(source, tgt_in, dec_emb, dec_layers);
  Matrix logits = pass.linear(lm_head_, y);
  return TransformerPass::cross_entropy(logits, tgt_out, 1.0f);
}

}  // namespace culturemod::model
