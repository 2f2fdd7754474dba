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


// Parallel kernels versus the serial reference at transformer-sized shapes.
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "culturemod/kernels/kernels.hpp"

namespace k = culturemod::kernels;

namespace {

std::vector<float> random_vec(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<float> d(0.0F, 1.0F);
  std::vector<float> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

template <auto Fn>
void BM_matmul(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const int kk = static_cast<int>(state.range(1));
  const int n = static_cast<int>(state.range(2));
  const auto a = random_vec(static_cast<std::size_t>(m) * kk, 1);
  const auto b = random_vec(static_cast<std::size_t>(kk) * n, 2);
  std::vector<float> c(static_cast<std::size_t>(m) * n);
  for (auto _ : state) {
    Fn(a, b, c, m, kk, n, false);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * 2LL * m * kk * n);
}

template <auto Fn>
void BM_softmax(benchmark::State& state) {
  const int rows = static_cast<int>(state.range(0));
  const int cols = static_cast<int>(state.range(1));
  const auto src = random_vec(static_cast<std::size_t>(rows) * cols, 3);
  std::vector<float> x = src;
  for (auto _ : state) {
    x = src;
    Fn(x, rows, cols);
    benchmark::DoNotOptimize(x.data());
  }
}

template <auto Fn>
void BM_layer_norm(benchmark::State& state) {
  const int rows = static_cast<int>(state.range(0));
  const int cols = static_cast<int>(state.range(1));
  const auto x = random_vec(static_cast<std::size_t>(rows) * cols, 4);
  const std::vector<float> gamma(cols, 1.0F), beta(cols, 0.0F);
  std::vector<float> y(x.size()), xhat(x.size()), rstd(rows);
  for (auto _ : state) {
    Fn(x, gamma, beta, rows, cols, 1e-5F, y, xhat, rstd);
    benchmark::DoNotOptimize(y.data());
  }
}

template <auto Fn>
void BM_attention(benchmark::State& state) {
  const int len = static_cast<int>(state.range(0));
  const int d = 128;
  const int heads = 4;
  const auto q = random_vec(static_cast<std::size_t>(len) * d, 5);
  const auto kv = random_vec(static_cast<std::size_t>(len) * d, 6);
  std::vector<float> probs(static_cast<std::size_t>(heads) * len * len), ctx(q.size());
  for (auto _ : state) {
    Fn(q, kv, kv, len, len, d, heads, true, probs, ctx);
    benchmark::DoNotOptimize(ctx.data());
  }
}

}  // namespace

BENCHMARK_TEMPLATE(BM_matmul, k::matmul)->Args({512, 128, 512})->Args({512, 128, 4000});
BENCHMARK_TEMPLATE(BM_matmul, k::reference::matmul)->Args({512, 128, 512})->Args({512, 128, 4000});
BENCHMARK_TEMPLATE(BM_matmul, k::matmul_nt)->Args({512, 128, 512});
BENCHMARK_TEMPLATE(BM_matmul, k::reference::matmul_nt)->Args({512, 128, 512});
BENCHMARK_TEMPLATE(BM_matmul, k::matmul_tn)->Args({128, 512, 512});
BENCHMARK_TEMPLATE(BM_matmul, k::reference::matmul_tn)->Args({128, 512, 512});
BENCHMARK_TEMPLATE(BM_softmax, k::softmax_rows)->Args({2048, 64});
BENCHMARK_TEMPLATE(BM_softmax, k::reference::softmax_rows)->Args({2048, 64});
BENCHMARK_TEMPLATE(BM_layer_norm, k::layer_norm_forward)->Args({512, 128});
BENCHMARK_TEMPLATE(BM_layer_norm, k::reference::layer_norm_forward)->Args({512, 128});
BENCHMARK_TEMPLATE(BM_attention, k::attention_forward)->Arg(64);
BENCHMARK_TEMPLATE(BM_attention, k::reference::attention_forward)->Arg(64);

BENCHMARK_MAIN();
