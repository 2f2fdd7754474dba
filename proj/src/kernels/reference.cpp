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


#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "culturemod/kernels/kernels.hpp"

namespace culturemod::kernels::reference {

void matmul(std::span<const float> a, std::span<const float> b, std::span<float> c, int m,
            int k, int n, bool accumulate) {
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int p = 0; p < k; ++p) s += static_cast<double>(a[i * k + p]) * b[p * n + j];
      c[i * n + j] = static_cast<float>(accumulate ? c[i * n + j] + s : s);
    }
}

void matmul_nt(std::span<const float> a, std::span<const float> b, std::span<float> c, int m,
               int k, int n, bool accumulate) {
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int p = 0; p < k; ++p) s += static_cast<double>(a[i * k + p]) * b[j * k + p];
      c[i * n + j] = static_cast<float>(accumulate ? c[i * n + j] + s : s);
    }
}

void matmul_tn(std::span<const float> a, std::span<const float> b, std::span<float> c, int m,
               int k, int n, bool accumulate) {
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int p = 0; p < k; ++p) s += static_cast<double>(a[p * m + i]) * b[p * n + j];
      c[i * n + j] = static_cast<float>(accumulate ? c[i * n + j] + s : s);
    }
}

void softmax_rows(std::span<float> x, int rows, int cols) {
  for (int i = 0; i < rows; ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < cols; ++j) mx = std::max(mx, static_cast<double>(x[i * cols + j]));
    double sum = 0.0;
    for (int j = 0; j < cols; ++j) sum += std::exp(x[i * cols + j] - mx);
    for (int j = 0; j < cols; ++j)
      x[i * cols + j] = static_cast<float>(std::exp(x[i * cols + j] - mx) / sum);
  }
}

void layer_norm_forward(std::span<const float> x, std::span<const float> gamma,
                        std::span<const float> beta, int rows, int cols, float eps,
                        std::span<float> y, std::span<float> xhat, std::span<float> rstd) {
  for (int i = 0; i < rows; ++i) {
    double mean = 0.0;
    for (int j = 0; j < cols; ++j) mean += x[i * cols + j];
    mean /= cols;
    double var = 0.0;
    for (int j = 0; j < cols; ++j) var += (x[i * cols + j] - mean) * (x[i * cols + j] - mean);
    var /= cols;
    const double rs = 1.0 / std::sqrt(var + eps);
    rstd[i] = static_cast<float>(rs);
    for (int j = 0; j < cols; ++j) {
      const double xh = (x[i * cols + j] - mean) * rs;
      xhat[i * cols + j] = static_cast<float>(xh);
      y[i * cols + j] = static_cast<float>(gamma[j] * xh + beta[j]);
    }
  }
}

void layer_norm_backward(std::span<const float> dy, std::span<const float> xhat,
                         std::span<const float> rstd, std::span<const float> gamma, int rows,
                         int cols, std::span<float> dx, std::span<float> dgamma,
                         std::span<float> dbeta) {
  for (int i = 0; i < rows; ++i) {
    double m1 = 0.0, m2 = 0.0;
    for (int j = 0; j < cols; ++j) {
      const double g = static_cast<double>(dy[i * cols + j]) * gamma[j];
      m1 += g;
      m2 += g * xhat[i * cols + j];
      dgamma[j] += dy[i * cols + j] * xhat[i * cols + j];
      dbeta[j] += dy[i * cols + j];
    }
    m1 /= cols;
    m2 /= cols;
    for (int j = 0; j < cols; ++j) {
      const double g = static_cast<double>(dy[i * cols + j]) * gamma[j];
      dx[i * cols + j] = static_cast<float>(rstd[i] * (g - m1 - xhat[i * cols + j] * m2));
    }
  }
}

void gelu_forward(std::span<const float> x, std::span<float> y) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = x[i];
    y[i] = static_cast<float>(0.5 * v * (1.0 + std::erf(v / std::sqrt(2.0))));
  }
}

void attention_forward(std::span<const float> q, std::span<const float> k,
                       std::span<const float> v, int lq, int lk, int d, int heads, bool causal,
                       std::span<float> probs, std::span<float> ctx) {
  const int dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  std::fill(ctx.begin(), ctx.end(), 0.0f);
  for (int h = 0; h < heads; ++h) {
    for (int i = 0; i < lq; ++i) {
      std::vector<double> s(lk, -std::numeric_limits<double>::infinity());
      double mx = -std::numeric_limits<double>::infinity();
      for (int j = 0; j < lk; ++j) {
        if (causal && j > i) continue;
        double dot = 0.0;
        for (int t = 0; t < dh; ++t)
          dot += static_cast<double>(q[i * d + h * dh + t]) * k[j * d + h * dh + t];
        s[j] = dot * scale;
        mx = std::max(mx, s[j]);
      }
      double sum = 0.0;
      for (int j = 0; j < lk; ++j) sum += (causal && j > i) ? 0.0 : std::exp(s[j] - mx);
      for (int j = 0; j < lk; ++j) {
        const double p = (causal && j > i) ? 0.0 : std::exp(s[j] - mx) / sum;
        probs[(h * lq + i) * lk + j] = static_cast<float>(p);
        for (int t = 0; t < dh; ++t) ctx[i * d + h * dh + t] += static_cast<float>(p * v[j * d + h * dh + t]);
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
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  std::fill(dq.begin(), dq.end(), 0.0f);
  std::fill(dk.begin(), dk.end(), 0.0f);
  std::fill(dv.begin(), dv.end(), 0.0f);
  for (int h = 0; h < heads; ++h) {
    for (int i = 0; i < lq; ++i) {
      std::vector<double> dp(lk);
      double dot = 0.0;
      for (int j = 0; j < lk; ++j) {
        double s = 0.0;
        for (int t = 0; t < dh; ++t)
          s += static_cast<double>(dctx[i * d + h * dh + t]) * v[j * d + h * dh + t];
        dp[j] = s;
        dot += probs[(h * lq + i) * lk + j] * s;
      }
      for (int j = 0; j < lk; ++j) {
        const double p = probs[(h * lq + i) * lk + j];
        const double ds = p * (dp[j] - dot) * scale;
        scratch[(h * lq + i) * lk + j] = static_cast<float>(ds);
        for (int t = 0; t < dh; ++t) {
          dq[i * d + h * dh + t] += static_cast<float>(ds * k[j * d + h * dh + t]);
          dk[j * d + h * dh + t] += static_cast<float>(ds * q[i * d + h * dh + t]);
          dv[j * d + h * dh + t] += static_cast<float>(p * dctx[i * d + h * dh + t]);
        }
      }
    }
  }
}

}  // namespace culturemod::kernels::reference
