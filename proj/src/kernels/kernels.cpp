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


#include "culturemod/kernels/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace culturemod::kernels {

namespace {
// Below this many multiply-adds a parallel region costs more than it saves.
constexpr long kParallelWork = 1L << 15;
constexpr float kInvSqrt2 = 0.70710678118654752440f;
constexpr float kInvSqrt2Pi = 0.39894228040143267794f;
}  // namespace

void matmul(std::span<const float> a, std::span<const float> b, std::span<float> c, int m,
            int k, int n, bool accumulate) {
  const float* A = a.data();
  const float* B = b.data();
  float* C = c.data();
#pragma omp parallel for schedule(static) if (static_cast<long>(m) * k * n > kParallelWork)
  for (int i = 0; i < m; ++i) {
    float* crow = C + static_cast<long>(i) * n;
    if (!accumulate) std::fill(crow, crow + n, 0.0f);
    const float* arow = A + static_cast<long>(i) * k;
    for (int p = 0; p < k; ++p) {
      const float aip = arow[p];
      const float* brow = B + static_cast<long>(p) * n;
#pragma omp simd
      for (int j = 0; j < n; ++j) crow[j] += aip * brow[j];
    }
  }
}

void matmul_nt(std::span<const float> a, std::span<const float> b, std::span<float> c, int m,
               int k, int n, bool accumulate) {
  const float* A = a.data();
  const float* B = b.data();
  float* C = c.data();
#pragma omp parallel for schedule(static) if (static_cast<long>(m) * k * n > kParallelWork)
  for (int i = 0; i < m; ++i) {
    const float* arow = A + static_cast<long>(i) * k;
    float* crow = C + static_cast<long>(i) * n;
    for (int j = 0; j < n; ++j) {
      const float* brow = B + static_cast<long>(j) * k;
      float sum = 0.0f;
#pragma omp simd reduction(+ : sum)
      for (int p = 0; p < k; ++p) sum += arow[p] * brow[p];
      crow[j] = accumulate ? crow[j] + sum : sum;
    }
  }
}

void matmul_tn(std::span<const float> a, std::span<const float> b, std::span<float> c, int m,
               int k, int n, bool accumulate) {
  const float* A = a.data();
  const float* B = b.data();
  float* C = c.data();
#pragma omp parallel for schedule(static) if (static_cast<long>(m) * k * n > kParallelWork)
  for (int i = 0; i < m; ++i) {
    float* crow = C + static_cast<long>(i) * n;
    if (!accumulate) std::fill(crow, crow + n, 0.0f);
    for (int p = 0; p < k; ++p) {
      const float api = A[static_cast<long>(p) * m + i];
      const float* brow = B + static_cast<long>(p) * n;
#pragma omp simd
      for (int j = 0; j < n; ++j) crow[j] += api * brow[j];
    }
  }
}

void add_row_bias(std::span<float> x, std::span<const float> bias, int rows, int cols) {
  float* X = x.data();
  const float* bv = bias.data();
  for (int i = 0; i < rows; ++i) {
    float* row = X + static_cast<long>(i) * cols;
#pragma omp simd
    for (int j = 0; j < cols; ++j) row[j] += bv[j];
  }
}

void column_sums(std::span<const float> x, int rows, int cols, std::span<float> out,
                 bool accumulate) {
  const float* X = x.data();
  float* O = out.data();
  if (!accumulate) std::fill(O, O + cols, 0.0f);
  for (int i = 0; i < rows; ++i) {
    const float* row = X + static_cast<long>(i) * cols;
#pragma omp simd
    for (int j = 0; j < cols; ++j) O[j] += row[j];
  }
}

void softmax_rows(std::span<float> x, int rows, int cols) {
  float* X = x.data();
#pragma omp parallel for schedule(static) if (static_cast<long>(rows) * cols > kParallelWork)
  for (int i = 0; i < rows; ++i) {
    float* row = X + static_cast<long>(i) * cols;
    const float mx = *std::max_element(row, row + cols);
    float sum = 0.0f;
    for (int j = 0; j < cols; ++j) {
      row[j] = std::exp(row[j] - mx);
      sum += row[j];
    }
    const float inv = 1.0f / sum;
    for (int j = 0; j < cols; ++j) row[j] *= inv;
  }
}

void layer_norm_forward(std::span<const float> x, std::span<const float> gamma,
                        std::span<const float> beta, int rows, int cols, float eps,
                        std::span<float> y, std::span<float> xhat, std::span<float> rstd) {
  const float* X = x.data();
  float* Y = y.data();
  float* XH = xhat.data();
#pragma omp parallel for schedule(static) if (static_cast<long>(rows) * cols > kParallelWork)
  for (int i = 0; i < rows; ++i) {
    const float* row = X + static_cast<long>(i) * cols;
    float mean = 0.0f;
    for (int j = 0; j < cols; ++j) mean += row[j];
    mean /= static_cast<float>(cols);
    float var = 0.0f;
    for (int j = 0; j < cols; ++j) {
      const float d = row[j] - mean;
      var += d * d;
    }
    var /= static_cast<float>(cols);
    const float rs = 1.0f / std::sqrt(var + eps);
    rstd[i] = rs;
    float* xh = XH + static_cast<long>(i) * cols;
    float* out = Y + static_cast<long>(i) * cols;
#pragma omp simd
    for (int j = 0; j < cols; ++j) {
      xh[j] = (row[j] - mean) * rs;
      out[j] = gamma[j] * xh[j] + beta[j];
    }
  }
}

void layer_norm_backward(std::span<const float> dy, std::span<const float> xhat,
                         std::span<const float> rstd, std::span<const float> gamma, int rows,
                         int cols, std::span<float> dx, std::span<float> dgamma,
                         std::span<float> dbeta) {
  const float* DY = dy.data();
  const float* XH = xhat.data();
  float* DX = dx.data();
  const float inv_cols = 1.0f / static_cast<float>(cols);
#pragma omp parallel for schedule(static) if (static_cast<long>(rows) * cols > kParallelWork)
  for (int i = 0; i < rows; ++i) {
    const float* dyr = DY + static_cast<long>(i) * cols;
    const float* xh = XH + static_cast<long>(i) * cols;
    float m1 = 0.0f;
    float m2 = 0.0f;
    for (int j = 0; j < cols; ++j) {
      const float g = dyr[j] * gamma[j];
      m1 += g;
      m2 += g * xh[j];
    }
    m1 *= inv_cols;
    m2 *= inv_cols;
    float* dxr = DX + static_cast<long>(i) * cols;
    const float rs = rstd[i];
#pragma omp simd
    for (int j = 0; j < cols; ++j) dxr[j] = rs * (dyr[j] * gamma[j] - m1 - xh[j] * m2);
  }
  for (int i = 0; i < rows; ++i) {
    const float* dyr = DY + static_cast<long>(i) * cols;
    const float* xh = XH + static_cast<long>(i) * cols;
#pragma omp simd
    for (int j = 0; j < cols; ++j) {
      dgamma[j] += dyr[j] * xh[j];
      dbeta[j] += dyr[j];
    }
  }
}

void gelu_forward(std::span<const float> x, std::span<float> y) {
  const long n = static_cast<long>(x.size());
#pragma omp parallel for schedule(static) if (n > kParallelWork)
  for (long i = 0; i < n; ++i) y[i] = 0.5f * x[i] * (1.0f + std::erf(x[i] * kInvSqrt2));
}

void gelu_backward(std::span<const float> x, std::span<const float> dy, std::span<float> dx) {
  const long n = static_cast<long>(x.size());
#pragma omp parallel for schedule(static) if (n > kParallelWork)
  for (long i = 0; i < n; ++i) {
    const float v = x[i];
    const float cdf = 0.5f * (1.0f + std::erf(v * kInvSqrt2));
    const float pdf = kInvSqrt2Pi * std::exp(-0.5f * v * v);
    dx[i] = dy[i] * (cdf + v * pdf);
  }
}

void attention_forward(std::span<const float> q, std::span<const float> k,
                       std::span<const float> v, int lq, int lk, int d, int heads, bool causal,
                       std::span<float> probs, std::span<float> ctx) {
  const int dh = d / heads;
  const float scale = 1.0f / std::sqrt(static_cast<float>(dh));
  const long work = static_cast<long>(heads) * lq * lk * dh;
#pragma omp parallel for collapse(2) schedule(static) if (work > kParallelWork)
  for (int h = 0; h < heads; ++h) {
    for (int i = 0; i < lq; ++i) {
      const float* qi = q.data() + static_cast<long>(i) * d + h * dh;
      float* p = probs.data() + (static_cast<long>(h) * lq + i) * lk;
      const int limit = causal ? std::min(lk, i + 1) : lk;
      float mx = -std::numeric_limits<float>::infinity();
      for (int j = 0; j < limit; ++j) {
        const float* kj = k.data() + static_cast<long>(j) * d + h * dh;
        float s = 0.0f;
#pragma omp simd reduction(+ : s)
        for (int t = 0; t < dh; ++t) s += qi[t] * kj[t];
        p[j] = s * scale;
        mx = std::max(mx, p[j]);
      }
      float sum = 0.0f;
      for (int j = 0; j < limit; ++j) {
        p[j] = std::exp(p[j] - mx);
        sum += p[j];
      }
      const float inv = 1.0f / sum;
      for (int j = 0; j < limit; ++j) p[j] *= inv;
      for (int j = limit; j < lk; ++j) p[j] = 0.0f;
      float* ci = ctx.data() + static_cast<long>(i) * d + h * dh;
      std::fill(ci, ci + dh, 0.0f);
      for (int j = 0; j < limit; ++j) {
        const float pj = p[j];
        const float* vj = v.data() + static_cast<long>(j) * d + h * dh;
#pragma omp simd
        for (int t = 0; t < dh; ++t) ci[t] += pj * vj[t];
      }
    }
  }
}

void attention_backward(std::span<const float> q, std::span<const float> k,
                        std::span<const float> v, std::span<const float> probs,
                        std::span<const float> dctx, int lq, int lk, int d, int heads,
                        std::span<float> dq, std::span<float> dk, std::span<float> dv,
                        std::span<float> scratch) {
  const int dh = d / heads;
  const float scale = 1.0f / std::sqrt(static_cast<float>(dh));
  const long work = static_cast<long>(heads) * lq * lk * dh;
#pragma omp parallel for collapse(2) schedule(static) if (work > kParallelWork)
  for (int h = 0; h < heads; ++h) {
    for (int i = 0; i < lq; ++i) {
      const float* p = probs.data() + (static_cast<long>(h) * lq + i) * lk;
      float* ds = scratch.data() + (static_cast<long>(h) * lq + i) * lk;
      const float* dci = dctx.data() + static_cast<long>(i) * d + h * dh;
      float dot = 0.0f;
      for (int j = 0; j < lk; ++j) {
        const float* vj = v.data() + static_cast<long>(j) * d + h * dh;
        float s = 0.0f;
#pragma omp simd reduction(+ : s)
        for (int t = 0; t < dh; ++t) s += dci[t] * vj[t];
        ds[j] = s;
        dot += p[j] * s;
      }
      for (int j = 0; j < lk; ++j) ds[j] = p[j] * (ds[j] - dot) * scale;
      float* dqi = dq.data() + static_cast<long>(i) * d + h * dh;
      std::fill(dqi, dqi + dh, 0.0f);
      for (int j = 0; j < lk; ++j) {
        const float g = ds[j];
        const float* kj = k.data() + static_cast<long>(j) * d + h * dh;
#pragma omp simd
        for (int t = 0; t < dh; ++t) dqi[t] += g * kj[t];
      }
    }
  }
#pragma omp parallel for collapse(2) schedule(static) if (work > kParallelWork)
  for (int h = 0; h < heads; ++h) {
    for (int j = 0; j < lk; ++j) {
      float* dkj = dk.data() + static_cast<long>(j) * d + h * dh;
      float* dvj = dv.data() + static_cast<long>(j) * d + h * dh;
      std::fill(dkj, dkj + dh, 0.0f);
      std::fill(dvj, dvj + dh, 0.0f);
      for (int i = 0; i < lq; ++i) {
        const long idx = (static_cast<long>(h) * lq + i) * lk + j;
        const float g = scratch[idx];
        const float pij = probs[idx];
        const float* qi = q.data() + static_cast<long>(i) * d + h * dh;
        const float* dci = dctx.data() + static_cast<long>(i) * d + h * dh;
#pragma omp simd
        for (int t = 0; t < dh; ++t) {
          dkj[t] += g * qi[t];
          dvj[t] += pij * dci[t];
        }
      }
    }
  }
}

}  // namespace culturemod::kernels
