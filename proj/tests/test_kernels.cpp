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

#include <cmath>
#include <vector>

#include "culturemod/core/random.hpp"
#include "culturemod/kernels/kernels.hpp"

using namespace culturemod;
namespace k = culturemod::kernels;
namespace ref = culturemod::kernels::reference;

namespace {

std::vector<float> random_vec(std::size_t n, std::uint64_t seed) {
  auto rng = make_rng(seed);
  std::vector<float> v(n);
  for (auto& x : v) x = static_cast<float>(uniform_unit(rng) * 2.0 - 1.0);
  return v;
}

void check_close(const std::vector<float>& a, const std::vector<float>& b, float tol) {
  REQUIRE(a.size() == b.size());
  float worst = 0.0f;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  CHECK(worst <= tol);
}

}  // namespace

TEST_CASE("matmul variants match the serial reference") {
  // Sizes straddle the parallel threshold.
  for (auto [m, kk, n] : {std::tuple{3, 5, 7}, std::tuple{64, 128, 96}, std::tuple{130, 64, 257}}) {
    const auto a = random_vec(static_cast<std::size_t>(m) * kk, 1);
    const auto b = random_vec(static_cast<std::size_t>(kk) * n, 2);
    const auto bt = random_vec(static_cast<std::size_t>(n) * kk, 3);
    const auto at = random_vec(static_cast<std::size_t>(kk) * m, 4);
    for (bool acc : {false, true}) {
      auto c0 = random_vec(static_cast<std::size_t>(m) * n, 5);
      auto c1 = c0;
      k::matmul(a, b, c0, m, kk, n, acc);
      ref::matmul(a, b, c1, m, kk, n, acc);
      check_close(c0, c1, 1e-4f);
      k::matmul_nt(a, bt, c0, m, kk, n, acc);
      ref::matmul_nt(a, bt, c1, m, kk, n, acc);
      check_close(c0, c1, 1e-4f);
      k::matmul_tn(at, b, c0, m, kk, n, acc);
      ref::matmul_tn(at, b, c1, m, kk, n, acc);
      check_close(c0, c1, 1e-4f);
    }
  }
}

TEST_CASE("softmax, layer norm and gelu match the reference") {
  const int rows = 40, cols = 128;
  auto x0 = random_vec(rows * cols, 7);
  auto x1 = x0;
  k::softmax_rows(x0, rows, cols);
  ref::softmax_rows(x1, rows, cols);
  check_close(x0, x1, 1e-6f);
  for (int r = 0; r < rows; ++r) {
    double s = 0;
    for (int c = 0; c < cols; ++c) s += x0[r * cols + c];
    CHECK(s == doctest::Approx(1.0).epsilon(1e-5));
  }

  const auto x = random_vec(rows * cols, 8);
  const auto gamma = random_vec(cols, 9);
  const auto beta = random_vec(cols, 10);
  std::vector<float> y0(rows * cols), y1(rows * cols), xh0(rows * cols), xh1(rows * cols);
  std::vector<float> r0(rows), r1(rows);
  k::layer_norm_forward(x, gamma, beta, rows, cols, 1e-12f, y0, xh0, r0);
  ref::layer_norm_forward(x, gamma, beta, rows, cols, 1e-12f, y1, xh1, r1);
  check_close(y0, y1, 1e-5f);
  check_close(xh0, xh1, 1e-5f);

  const auto dy = random_vec(rows * cols, 11);
  std::vector<float> dx0(rows * cols), dx1(rows * cols), dg0(cols, 0), dg1(cols, 0), db0(cols, 0),
      db1(cols, 0);
  k::layer_norm_backward(dy, xh0, r0, gamma, rows, cols, dx0, dg0, db0);
  ref::layer_norm_backward(dy, xh1, r1, gamma, rows, cols, dx1, dg1, db1);
  check_close(dx0, dx1, 1e-4f);
  check_close(dg0, dg1, 1e-4f);
  check_close(db0, db1, 1e-4f);

  std::vector<float> g0(rows * cols), g1(rows * cols);
  k::gelu_forward(x, g0);
  ref::gelu_forward(x, g1);
  check_close(g0, g1, 1e-6f);
}

TEST_CASE("gelu_backward matches a central difference") {
  const auto x = random_vec(200, 12);
  std::vector<float> ones(200, 1.0f), dx(200);
  k::gelu_backward(x, ones, dx);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double h = 1e-3;
    const double xi = x[i];
    auto g = [](double v) { return 0.5 * v * (1.0 + std::erf(v / std::sqrt(2.0))); };
    CHECK(dx[i] == doctest::Approx((g(xi + h) - g(xi - h)) / (2 * h)).epsilon(1e-3));
  }
}

TEST_CASE("attention forward and backward match the reference") {
  for (bool causal : {false, true}) {
    const int lq = causal ? 12 : 9, lk = causal ? 12 : 17, d = 32, heads = 4;
    const auto q = random_vec(lq * d, 20), kk = random_vec(lk * d, 21), v = random_vec(lk * d, 22);
    std::vector<float> p0(heads * lq * lk), p1(heads * lq * lk), c0(lq * d), c1(lq * d);
    k::attention_forward(q, kk, v, lq, lk, d, heads, causal, p0, c0);
    ref::attention_forward(q, kk, v, lq, lk, d, heads, causal, p1, c1);
    check_close(p0, p1, 1e-6f);
    check_close(c0, c1, 1e-5f);
    if (causal) {
      for (int h = 0; h < heads; ++h)
        for (int i = 0; i < lq; ++i)
          for (int j = i + 1; j < lk; ++j) CHECK(p0[(h * lq + i) * lk + j] == 0.0f);
    }
    const auto dctx = random_vec(lq * d, 23);
    std::vector<float> dq0(lq * d), dk0(lk * d), dv0(lk * d), s0(heads * lq * lk);
    std::vector<float> dq1(lq * d), dk1(lk * d), dv1(lk * d), s1(heads * lq * lk);
    k::attention_backward(q, kk, v, p0, dctx, lq, lk, d, heads, dq0, dk0, dv0, s0);
    ref::attention_backward(q, kk, v, p1, dctx, lq, lk, d, heads, dq1, dk1, dv1, s1);
    check_close(dq0, dq1, 1e-5f);
    check_close(dk0, dk1, 1e-5f);
    check_close(dv0, dv1, 1e-5f);
  }
}

TEST_CASE("column sums and row bias") {
  std::vector<float> x = {1, 2, 3, 4, 5, 6};
  std::vector<float> s(3, 1.0f);
  k::column_sums(x, 2, 3, s, true);
  CHECK(s == std::vector<float>{6, 8, 10});
  k::column_sums(x, 2, 3, s, false);
  CHECK(s == std::vector<float>{5, 7, 9});
  std::vector<float> b = {1, 0, -1};
  k::add_row_bias(x, b, 2, 3);
  CHECK(x == std::vector<float>{2, 2, 2, 5, 5, 5});
}
