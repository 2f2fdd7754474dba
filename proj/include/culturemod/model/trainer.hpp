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
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "culturemod/model/transformer.hpp"

namespace culturemod::model {

struct TrainingSchedule {
  int total_steps = 2000;
  double learning_rate = 2e-5;
  double warmup_fraction = 0.02;
  std::string decay = "cosine";
  double weight_decay = 0.01;
  int batch_size = 8;
  std::uint64_t seed = 0;
  double max_grad_norm = 1.0;

  void validate() const;
  nlohmann::json to_json() const;
  static TrainingSchedule from_json(const nlohmann::json& j);
};

// Linear ramp from 0 over the warmup steps, then cosine decay to 0 at
// total_steps.
double learning_rate_at(const TrainingSchedule& schedule, int step);

struct Seq2SeqExample {
  std::vector<int> source;      // [CLS] ... [SEP]
  std::vector<int> decoder_in;  // [BOS] y1 ... yn
  std::vector<int> target;      // y1 ... yn [EOS]
};

struct StepRecord {
  int step = 0;
  double learning_rate = 0.0;
  double loss = 0.0;  // mean token cross-entropy of the step's batch
};

struct TrainingLog {
  std::vector<StepRecord> curve;
  double final_loss = 0.0;

  nlohmann::json to_json() const;
};

class AdamW {
 public:
  AdamW(double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  void step(std::vector<Param>& params, double lr, double weight_decay);

 private:
  double beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<std::vector<float>> m_, v_;
};

// Global L2 norm of all gradients; rescales them in place when above max_norm.
double clip_grad_norm(std::vector<Param>& params, double max_norm);

using StepCallback = std::function<void(const StepRecord&)>;

// Mini-batched teacher-forced training. Batches are drawn from a seeded
// per-epoch shuffle. Throws ErrorKind::diverged on a non-finite loss.
TrainingLog train_seq2seq(Seq2SeqTransformer& model, const std::vector<Seq2SeqExample>& data,
                          const TrainingSchedule& schedule, const StepCallback& on_step = {});

}  // namespace culturemod::model
