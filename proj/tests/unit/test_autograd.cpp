// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include "laytoken/autograd.hpp"
#include "laytoken/error.hpp"
#include "laytoken/grad_check.hpp"

using namespace laytoken;
using namespace laytoken::nn;

namespace {

void randomize(Parameter& p, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  for (auto& v : p.value.values()) v = g(rng);
}

Tensor random_tensor(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Tensor t(r, c);
  for (auto& v : t.values()) v = g(rng);
  return t;
}

// Scalar <w, out> for a fixed random w, so every output entry carries a distinct weight.
Var project(Var out, std::uint64_t seed) {
  Tape& t = *out.tape;
  std::mt19937_64 rng(seed);
  const Tensor& v = out.value();
  Var w = t.constant(random_tensor(v.cols(), 1, rng));
  Var ones = t.constant(Tensor(1, v.rows(), 1.0));
  return matmul(ones, matmul(out, w));
}

double check(const std::function<Var(Tape&)>& build, std::vector<Parameter*> params) {
  GradCheckOptions o;
  o.n_probes = 40;
  o.seed = 3;
  return grad_check(build, params, o).max_rel_error;
}

}  // namespace

TEST_SUITE("autograd") {
  TEST_CASE("per-operation gradients match central differences") {
    std::mt19937_64 rng(1);
    Parameter a("a", {3, 4}), b("b", {4, 5}), bias("bias", {5}), g("g", {4}), beta("beta", {4});
    Parameter table("table", {2, 4}), qkv("qkv", {5, 12}), q("q", {1, 4}), kv("kv", {8, 4});
    for (auto* p : {&a, &b, &bias, &g, &beta, &table, &qkv, &q, &kv}) randomize(*p, rng);

    CHECK(check([&](Tape& t) { return project(matmul(t.parameter(a), t.parameter(b)), 1); }, {&a, &b}) < 1e-6);
    CHECK(check([&](Tape& t) { return project(linear(t.parameter(a), t.parameter(b), t.parameter(bias)), 2); },
                {&a, &b, &bias}) < 1e-6);
    CHECK(check([&](Tape& t) { return project(add(t.parameter(a), scale(t.parameter(a), -2.5)), 3); }, {&a}) <
          1e-6);
    CHECK(check([&](Tape& t) { return project(add_cyclic_rows(t.parameter(a), t.parameter(table)), 4); },
                {&a, &table}) < 1e-6);
    CHECK(check([&](Tape& t) { return project(mul_cyclic_rows(t.parameter(a), t.parameter(table)), 9); },
                {&a, &table}) < 1e-6);
    CHECK(check([&](Tape& t) { return project(layer_norm(t.parameter(a), t.parameter(g), t.parameter(beta), 1e-12), 5); },
                {&a, &g, &beta}) < 1e-5);
    CHECK(check([&](Tape& t) { return project(gelu(t.parameter(a)), 6); }, {&a}) < 1e-6);
    CHECK(check([&](Tape& t) { return project(sigmoid(t.parameter(a)), 7); }, {&a}) < 1e-6);
    CHECK(check([&](Tape& t) { return project(gather_rows(t.parameter(a), {2, 0, 2}), 8); }, {&a}) < 1e-6);
    CHECK(check([&](Tape& t) {
            return project(assemble_rows({{t.parameter(a), {0, 2, 4}}, {t.parameter(table), {1, 3}}}, 5), 9);
          },
                {&a, &table}) < 1e-6);
    const std::vector<std::int64_t> pos{0, 1, 1, 2, 7};
    CHECK(check([&](Tape& t) { return project(causal_self_attention(t.parameter(qkv), pos, 2, 10000.0), 10); },
                {&qkv}) < 1e-5);
    CHECK(check([&](Tape& t) { return project(pooled_attention(t.parameter(q), t.parameter(kv), t.parameter(kv), 4), 11); },
                {&q, &kv}) < 1e-5);
    CHECK(check([&](Tape& t) { return cross_entropy_sum(t.parameter(a), {1, 3, 0}); }, {&a}) < 1e-6);
    const Tensor target = random_tensor(3, 4, rng);
    CHECK(check([&](Tape& t) { return mse_sum(t.parameter(a), target); }, {&a}) < 1e-6);
    CHECK(check([&](Tape& t) { return sum_squares(t.parameter(a)); }, {&a}) < 1e-6);
  }

  TEST_CASE("softmax rows sum to one") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g(0.0, 20.0);
    for (int i = 0; i < 200; ++i) {
      std::vector<double> x(1 + rng() % 300), out(x.size());
      for (auto& v : x) v = g(rng);
      kernels::softmax(x, out);
      CHECK(std::abs(std::accumulate(out.begin(), out.end(), 0.0) - 1.0) <= 1e-12);
    }
  }

  TEST_CASE("cross-entropy of a row matches log-sum-exp") {
    const std::vector<double> logits{1.0, 2.0, 3.0};
    const double lse = std::log(std::exp(1.0) + std::exp(2.0) + std::exp(3.0));
    CHECK(kernels::cross_entropy_row(logits, 0) == doctest::Approx(lse - 1.0));
    const std::vector<double> huge{1000.0, 0.0};
    CHECK(std::isfinite(kernels::cross_entropy_row(huge, 1)));
  }

  TEST_CASE("layer norm with unit gain standardizes each row") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 50; ++i) {
      const std::size_t d = 2 + rng() % 64;
      Tape t(false);
      Tensor x = random_tensor(4, d, rng);
      for (auto& v : x.values()) v = 5.0 * v + 3.0;
      Var y = layer_norm(t.constant(x), t.constant(Tensor(1, d, 1.0)), t.constant(Tensor(1, d, 0.0)), 1e-12);
      for (std::size_t r = 0; r < 4; ++r) {
        const auto row = y.value().row(r);
        const double mean = std::accumulate(row.begin(), row.end(), 0.0) / static_cast<double>(d);
        double var = 0.0;
        for (double v : row) var += (v - mean) * (v - mean);
        var /= static_cast<double>(d);
        CHECK(std::abs(mean) <= 1e-10);
        CHECK(std::abs(var - 1.0) <= 1e-8);
      }
    }
  }

  TEST_CASE("gradients accumulate across uses") {
    Parameter p("p", {1, 2});
    p.value.values()[0] = 3.0;
    p.value.values()[1] = -1.0;
    Tape t;
    Var x = t.parameter(p);
    Var y = sum_squares(add(x, x));
    t.backward(y);
    CHECK(p.grad[0] == doctest::Approx(24.0));
    CHECK(p.grad[1] == doctest::Approx(-8.0));
  }

  TEST_CASE("shape mismatches are rejected") {
    Tape t;
    Var a = t.constant(Tensor(2, 3)), b = t.constant(Tensor(2, 3));
    CHECK_THROWS_AS(matmul(a, b), ArgumentError);
  }
}
