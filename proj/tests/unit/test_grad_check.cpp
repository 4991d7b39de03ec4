// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "laytoken/error.hpp"
#include "laytoken/grad_check.hpp"
#include "laytoken/model.hpp"
#include "laytoken/ntlp_loss.hpp"
#include "laytoken/synthetic.hpp"

using namespace laytoken;
using namespace laytoken::nn;

TEST_SUITE("grad_check") {
  TEST_CASE("relative error") {
    CHECK(relative_error(0.0, 0.0) == 0.0);
    CHECK(relative_error(1.0, 0.5) == 0.5);
    CHECK(relative_error(-2.0, -2.0) == 0.0);
    CHECK(relative_error(1e-3, 0.0) == 1.0);
  }

  TEST_CASE("quadratic bowl") {
    Parameter p("p", {2, 3});
    for (std::size_t i = 0; i < 6; ++i) p.value[i] = 0.3 * static_cast<double>(i) - 0.7;
    std::vector<Parameter*> ps{&p};
    const auto r = grad_check([&](Tape& t) { return sum_squares(t.parameter(p)); }, ps, {12, 1e-5, 1});
    CHECK(r.probes.size() == 12);
    CHECK(r.max_rel_error < 1e-8);
    for (const auto& pr : r.probes) CHECK(pr.analytic == doctest::Approx(2.0 * p.value[pr.index]));
  }

  TEST_CASE("zero probes and bad epsilon") {
    Parameter p("p", {1, 1});
    std::vector<Parameter*> ps{&p};
    auto loss = [&](Tape& t) { return sum_squares(t.parameter(p)); };
    const auto r = grad_check(loss, ps, {0, 1e-5, 0});
    CHECK(r.max_rel_error == 0.0);
    CHECK(r.probes.empty());
    CHECK_FALSE(r.warnings.empty());
    CHECK_THROWS_AS(grad_check(loss, ps, {5, 1e-2, 0}), ArgumentError);
    CHECK_THROWS_AS(grad_check(loss, ps, {5, 1e-9, 0}), ArgumentError);
  }

  TEST_CASE("non-finite loss") {
    Parameter p("p", {1, 1});
    p.value[0] = std::nan("");
    std::vector<Parameter*> ps{&p};
    CHECK_THROWS_AS(grad_check([&](Tape& t) { return sum_squares(t.parameter(p)); }, ps), NumericError);
  }

  TEST_CASE("full next-token objective through every parameter group") {
    ModelConfig c;
    c.d_model = 16;
    c.n_heads = 2;
    c.d_ff = 32;
    c.coord_frequencies = 4;
    // Large enough weights that every probed gradient sits well above finite-difference round-off.
    c.init_std = 0.3;
    auto params = init_params(c, 3);
    for (auto* p : params.parameters())
      for (auto& v : p->value.values()) v += 0.05 * std::sin(static_cast<double>(&v - p->value.data()) + 1.0);
    const auto corpus = doc::generate_synthetic_corpus({1, {4, 4}, {1, 1}, 5, 1.0});
    const auto seq = ntlp::build_sequence(corpus.documents[0], layout::PositionScheme::SharedFirst, ntlp::Pretrain{}, 512);
    REQUIRE(seq.layout_count() > 0);
    auto ps = params.parameters();
    const auto r = grad_check([&](Tape& t) { return ntlp::ntlp_loss(t, params, seq).total; }, ps, {60, 1e-5, 7});
    CHECK(r.probes.size() == 60);
    CHECK(r.max_rel_error < 1e-4);
  }
}
