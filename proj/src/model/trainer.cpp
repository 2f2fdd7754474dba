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


#include "culturemod/model/trainer.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "culturemod/core/error.hpp"
#include "culturemod/core/random.hpp"

namespace culturemod::model {

void TrainingSchedule::validate() const {
  if (total_steps < 0) throw Error(ErrorKind::configuration, "total_steps must be non-negative");
  if (!(warmup_fraction > 0.0 && warmup_fraction < 1.0)) {
    throw Error(ErrorKind::configuration, "warmup_fraction must lie in (0, 1)");
  }
  if (decay != "cosine") throw Error(ErrorKind::configuration, "unsupported decay: " + decay);
  if (batch_size < 1) throw Error(ErrorKind::configuration, "batch_size must be >= 1");
  if (learning_rate < 0.0 || weight_decay < 0.0) {
    throw Error(ErrorKind::configuration, "learning_rate and weight_decay must be non-negative");
  }
}

nlohmann::json TrainingSchedule::to_json() const {
  return {{"total_steps", total_steps},   {"learning_rate", learning_rate},
          {"warmup_fraction", warmup_fraction}, {"decay", decay},
          {"weight_decay", weight_decay}, {"batch_size", batch_size},
          {"seed", seed},                 {"max_grad_norm", max_grad_norm}};
}

TrainingSchedule TrainingSchedule::from_json(const nlohmann::json& j) {
  TrainingSchedule s;
  s.total_steps = j.value("total_steps", s.total_steps);
  s.learning_rate = j.value("learning_rate", s.learning_rate);
  s.warmup_fraction = j.value("warmup_fraction", s.warmup_fraction);
  s.decay = j.value("decay", s.decay);
  s.weight_decay = j.value("weight_decay", s.weight_decay);
  s.batch_size = j.value("batch_size", s.batch_size);
  s.seed = j.value("seed", s.seed);
  s.max_grad_norm = j.value("max_grad_norm", s.max_grad_norm);
  s.validate();
  return s;
}

double learning_rate_at(const TrainingSchedule& s, int step) {
  if (s.total_steps <= 0) return 0.0;
  const int warmup = std::max(1, static_cast<int>(std::lround(s.warmup_fraction * s.total_steps)));
  if (step <= 0) return 0.0;
  if (step < warmup) return s.learning_rate * step / warmup;
  if (step >= s.total_steps) return 0.0;
  const double progress =
      static_cast<double>(step - warmup) / std::max(1, s.total_steps - warmup);
  return s.learning_rate * 0.5 * (1.0 + std::cos(M_PI * progress));
}

nlohmann::json TrainingLog::to_json() const {
  nlohmann::json curve_json = nlohmann::json::array();
  for (const auto& r : curve) curve_json.push_back({r.step, r.learning_rate, r.loss});
  return {{"final_loss", final_loss}, {"curve", std::move(curve_json)}};
}

AdamW::AdamW(double beta1, double beta2, double eps) : beta1_(beta1), beta2_(beta2), eps_(eps) {}

void AdamW::step(std::vector<Param>& params, double lr, double weight_decay) {
  if (m_.empty()) {
    for (const auto& p : params) {
      m_.emplace_back(p.size(), 0.0f);
      v_.emplace_back(p.size(), 0.0f);
    }
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  const float b1 = static_cast<float>(beta1_);
  const float b2 = static_cast<float>(beta2_);
  const float step_size = static_cast<float>(lr / bc1);
  const float inv_bc2 = static_cast<float>(1.0 / bc2);
  const float eps = static_cast<float>(eps_);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& p = params[k];
    auto& m = m_[k];
    auto& v = v_[k];
    const float decay = p.decays() ? static_cast<float>(1.0 - lr * weight_decay) : 1.0f;
    const long n = static_cast<long>(p.size());
#pragma omp parallel for schedule(static) if (n > (1L << 16))
    for (long i = 0; i < n; ++i) {
      const float g = p.grad[i];
      m[i] = b1 * m[i] + (1.0f - b1) * g;
      v[i] = b2 * v[i] + (1.0f - b2) * g * g;
      p.value[i] = p.value[i] * decay - step_size * m[i] / (std::sqrt(v[i] * inv_bc2) + eps);
    }
  }
}

double clip_grad_norm(std::vector<Param>& params, double max_norm) {
  double sq = 0.0;
  for (const auto& p : params)
    for (float g : p.grad) sq += static_cast<double>(g) * g;
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const float scale = static_cast<float>(max_norm / (norm + 1e-12));
    for (auto& p : params)
      for (auto& g : p.grad) g *= scale;
  }
  return norm;
}

TrainingLog train_seq2seq(Seq2SeqTransformer& model, const std::vector<Seq2SeqExample>& data,
                          const TrainingSchedule& schedule, const StepCallback& on_step) {
  schedule.validate();
  TrainingLog log;
  log.curve.push_back({0, learning_rate_at(schedule, 0), 0.0});
  if (schedule.total_steps == 0) return log;
  if (data.empty()) throw Error(ErrorKind::empty_input, "no training examples");

  AdamW optimizer;
  std::vector<std::size_t> order(data.size());
  std::size_t cursor = order.size();
  std::uint64_t epoch = 0;
  Rng rng = make_rng(schedule.seed, 0x7a11);

  for (int step = 1; step <= schedule.total_steps; ++step) {
    std::vector<std::size_t> batch;
    while (static_cast<int>(batch.size()) < schedule.batch_size) {
      if (cursor == order.size()) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        shuffle(order.begin(), order.end(), rng);
        cursor = 0;
        ++epoch;
      }
      batch.push_back(order[cursor++]);
      if (batch.size() == data.size()) break;
    }
    std::size_t tokens = 0;
    for (auto i : batch) tokens += data[i].target.size();
    const float scale = 1.0f / static_cast<float>(tokens);

    model.zero_grad();
    double loss_sum = 0.0;
    for (auto i : batch) {
      const auto& ex = data[i];
      loss_sum += model.accumulate_gradients(ex.source, ex.decoder_in, ex.target, scale);
    }
    const double loss = loss_sum / static_cast<double>(tokens);
    const double lr = learning_rate_at(schedule, step);
    if (!std::isfinite(loss)) {
      std::ostringstream msg;
      msg << "training diverged at step " << step << " (loss=" << loss << ", lr=" << lr << ")";
      throw Error(ErrorKind::diverged, msg.str());
    }
    clip_grad_norm(model.params(), schedule.max_grad_norm);
    optimizer.step(model.params(), lr, schedule.weight_decay);
    StepRecord rec{step, lr, loss};
    log.curve.push_back(rec);
    log.final_loss = loss;
    if (on_step) on_step(rec);
  }
  return log;
}

}  // namespace culturemod::model
