// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "laytoken/error.hpp"
#include "laytoken/model.hpp"
#include "laytoken/sequence.hpp"

using namespace laytoken;
using namespace laytoken::ntlp;

namespace {

doc::Document small_doc() {
  doc::Document d;
  d.pages.push_back({1000, 1000,
                     {doc::make_segment("Total", {100, 100, 160, 130}, 1000, 1000),
                      doc::make_segment("42.00", {170, 100, 230, 130}, 1000, 1000)}});
  return d;
}

InterleavedSequence seq_of(layout::PositionScheme s) {
  return build_sequence(small_doc(), s, Sft{"value of Total?", std::nullopt}, 512);
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("hidden states have one row per token") {
    const auto p = nn::init_params({}, 1);
    const auto seq = seq_of(layout::PositionScheme::SharedFirst);
    const auto h = nn::forward(p, seq);
    CHECK(h.rows() == seq.size());
    CHECK(h.cols() == p.config.d_model);
  }

  TEST_CASE("causal: later tokens never change earlier hidden states") {
    const auto p = nn::init_params({}, 2);
    const auto seq = seq_of(layout::PositionScheme::SharedFirst);
    const auto base = nn::forward(p, seq);
    for (std::size_t j = 1; j < seq.size(); ++j) {
      auto changed = seq;
      auto& t = changed.tokens[j];
      if (t.kind == TokenKind::Layout)
        t.box = {0.9, 0.9, 0.95, 0.99};
      else
        t.id = (t.id + 7) % 256;
      const auto h = nn::forward(p, changed);
      for (std::size_t i = 0; i < j; ++i)
        for (std::size_t c = 0; c < h.cols(); ++c) REQUIRE(h.at(i, c) == base.at(i, c));
      double diff = 0.0;
      for (std::size_t c = 0; c < h.cols(); ++c) diff += std::abs(h.at(j, c) - base.at(j, c));
      CHECK(diff > 0.0);
    }
  }

  TEST_CASE("forward is deterministic") {
    const auto p = nn::init_params({}, 3);
    const auto seq = seq_of(layout::PositionScheme::ExtraIds);
    CHECK(nn::forward(p, seq) == nn::forward(p, seq));
    CHECK(nn::parameter_checksum(nn::init_params({}, 3)) == nn::parameter_checksum(p));
    CHECK(nn::parameter_checksum(nn::init_params({}, 4)) != nn::parameter_checksum(p));
  }

  TEST_CASE("all-zero parameters give uniform next-token logits") {
    const nn::ModelParams zero(nn::ModelConfig{});
    const auto logits = nn::next_token_logits(zero, seq_of(layout::PositionScheme::SharedFirst));
    CHECK(logits.size() == serial::kVocabSize);
    for (double v : logits) CHECK(v == 0.0);
  }

  TEST_CASE("single-token sequence") {
    const auto p = nn::init_params({}, 5);
    InterleavedSequence s;
    s.tokens.push_back(TypedToken::text(serial::kBos, 0));
    CHECK(nn::forward(p, s).rows() == 1);
  }

  TEST_CASE("context overflow and malformed tokens") {
    nn::ModelConfig c;
    c.max_context = 8;
    const auto p = nn::init_params(c, 6);
    InterleavedSequence s;
    for (int i = 0; i < 9; ++i) s.tokens.push_back(TypedToken::text(65, i));
    CHECK_THROWS_AS(nn::forward(p, s), ContextOverflowError);
    s.tokens.resize(2);
    s.tokens[1].id = 999;
    CHECK_THROWS_AS(nn::forward(p, s), ArgumentError);
    s.tokens[1] = TypedToken::text(65, -1);
    CHECK_THROWS_AS(nn::forward(p, s), ArgumentError);
  }

  TEST_CASE("invalid configs") {
    nn::ModelConfig c;
    c.n_heads = 3;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.n_heads = 8;
    c.d_model = 72;  // head dim 9
    CHECK_THROWS_AS(nn::ModelParams{c}, ConfigError);
  }

  TEST_CASE("init conventions") {
    auto p = nn::init_params({}, 7);
    for (auto v : p.find("block0.ln1.gamma")->value.values()) CHECK(v == 1.0);
    for (auto v : p.find("block1.mlp.fc.bias")->value.values()) CHECK(v == 0.0);
    CHECK(p.find("no.such.tensor") == nullptr);
    CHECK(nn::parameter_count(p.config) > 0);
  }
}
