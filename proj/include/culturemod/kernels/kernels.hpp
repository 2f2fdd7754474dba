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

// Dense float kernels behind the transformer. Every kernel parallelizes over
// independent output rows or columns with OpenMP, so each output element is
// produced by exactly one thread in a fixed order and results do not depend
// on the thread count. `kernels::reference` holds serial textbook versions
// with identical signatures for tests and benchmarks.

#include <span>

namespace culturemod::kernels {

// c(m×n) = a(m×k) · b(k×n), or += when `accumulate`.
void matmul(std::span<const float> a, std::span<const float> b, std::span<float> c, int m,
            int k, int n, bool accumulate = false);

// c(m×n) = a(m×k) · bᵀ with b stored (n×k).
void matmul_nt(std::span<const float> a, std::span<const float> b, std::span<float> c, int m,
               int k, int n, bool accumulate = false);

// c(m×n) = aᵀ · b with a stored (k×m), b stored (k×n).
void matmul_tn(std::span<const float> a, std::span<const float> b, std::span<float> c, int m,
               int k, int n, bool accumulate = false);

void add_row_bias(std::span<float> x, std::span<const float> bias, int rows, int cols);

// out[j] (+)= Σ_i x[i][j]
void column_sums(std::span<const float> x, int rows, int cols, std::span<float> out,
                 bool accumulate = true);

void softmax_rows(std::span<float> x, int rows, int cols);

// y = γ ⊙ x̂ + β per row; stores x̂ and 1/σ for the backward pass.
void layer_norm_forward(std::span<const float> x, std::span<const float> gamma,
                        std::span<const float> beta, int rows, int cols, float eps,
                        std::span<float> y, std::span<float> xhat, std::span<float> rstd);

// dx = ∂L/∂x given dy; dgamma/dbeta are accumulated.
void layer_norm_backward(std::span<const float> dy, std::span<const float> xhat,
                         std::span<const float> rstd, std::span<const float> gamma, int rows,
                         int cols, std::span<float> dx, std::span<float> dgamma,
                         std::span<float> dbeta);

// Exact (erf) GELU.
void gelu_forward(std::span<const float> x, std::span<float> y);
void gelu_backward(std::span<const float> x, std::span<const float> dy, std::span<float> dx);

// Multi-head scaled dot-product attention over row-major q(lq×d), k/v(lk×d);
// heads split d into equal column blocks. probs is (heads×lq×lk).
void attention_forward(std::span<const float> q, std::span<const float> k,
                       std::span<const float> v, int lq, int lk, int d, int heads, bool causal,
                       std::span<float> probs, std::span<float> ctx);

// Overwrites dq, dk, dv. `scratch` must hold heads×lq×lk floats.
void attention_backward(std::span<const float> q, std::span<const float> k,
                        std::span<const float> v, std::span<const float> probs,
                        std::span<const float> dctx, int lq, int lk, int d, int heads,
                        std::span<float> dq, std::span<float> dk, std::span<float> dv,
                        std::span<float> scratch);

}  // namespace culturemod::kernels

namespace culturemod::kernels::reference {

void matmul(std::span<const float> a, std::span<const float> b, std::span<float> c, int m,
            int k, int n, bool accumulate = false);
void matmul_nt(std::span<const float> a, std::span<const float> b, std::span<float> c, int m,
               int k, int n, bool accumulate = false);
void matmul_tn(std::span<const float> a, std::span<const float> b, std::span<float> c, int m,
               int k, int n, bool accumulate = false);
void softmax_rows(std::span<float> x, int rows, int cols);
void layer_norm_forward(std::span<const float> x, std::span<const float> gamma,
                        std::span<const float> beta, int rows, int cols, float eps,
                        std::span<float> y, std::span<float> xhat, std::span<float> rstd);
void layer_norm_backward(std::span<const float> dy, std::span<const float> xhat,
                         std::span<const float> rstd, std::span<const float> gamma, int rows,
                         int cols, std::span<float> dx, std::span<float> dgamma,
                         std::span<float> dbeta);
void gelu_forward(std::span<const float> x, std::span<float> y);
void attention_forward(std::span<const float> q, std::span<const float> k,
                       std::span<const float> v, int lq, int lk, int d, int heads, bool causal,
                       std::span<float> probs, std::span<float> ctx);
void attention_backward(std::span<const float> q, std::span<const float> k,
                        std::span<const float> v, std::span<const float> probs,
                        std::span<const float> dctx, int lq, int lk, int d, int heads,
                        std::span<float> dq, std::span<float> dk, std::span<float> dv,
                        std::span<float> scratch);

}  // namespace culturemod::kernels::reference
