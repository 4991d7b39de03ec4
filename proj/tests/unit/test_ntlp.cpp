// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "laytoken/error.hpp"
#include "laytoken/model.hpp"
#include "laytoken/ntlp_loss.hpp"
#include "laytoken/sequence.hpp"
#include "laytoken/synthetic.hpp"

using namespace laytoken;
using namespace laytoken::ntlp;
using layout::PositionScheme;

namespace {

doc::Document ab_cde() {
  doc::Document d;
  d.pages.push_back({1000, 1000,
                     {doc::make_segment("ab", {100, 100, 140, 130}, 1000, 1000),
                      doc::make_segment("cde", {200, 100, 260, 130}, 1000, 1000)}});
  return d;
}

// Reference LM loss: mean cross-entropy of hidden[i-1] predicting token i.
double reference_lm_loss(const nn::ModelParams& p, const InterleavedSequence& seq) {
  nn::Tape tape(false);
  nn::Var h = nn::forward(tape, p, seq);
  std::vector<std::size_t> rows(seq.size() - 1);
  std::iota(rows.begin(), rows.end(), 0);
  const nn::Tensor& logits = nn::text_logits(nn::gather_rows(h, rows), p).value();
  double sum = 0.0;
  for (std::size_t i = 1; i < seq.size(); ++i) sum += nn::kernels::cross_entropy_row(logits.row(i - 1), seq.tokens[i].id);
  return sum / static_cast<double>(seq.size() - 1);
}

}  // namespace

TEST_SUITE("ntlp") {
  TEST_CASE("interleaved pretraining sequence") {
    const auto s = build_sequence(ab_cde(), PositionScheme::SharedFirst, Pretrain{}, 512);
    using K = TokenKind;
    const std::vector<K> kinds{K::Text, K::Text, K::Text, K::Layout, K::Text, K::Text, K::Text, K::Layout};
    REQUIRE(s.size() == kinds.size());
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(s.tokens[i].kind == kinds[i]);
    CHECK(s.tokens[0].id == serial::kBos);
    CHECK(s.positions() == std::vector<std::int64_t>{0, 1, 2, 1, 3, 4, 5, 3});
    CHECK(s.supervised_count() == s.size() - 1);
    CHECK(s.tokens[3].box == ab_cde().pages[0].segments[0].box);
  }

  TEST_CASE("fine-tuning supervises the answer bytes and the closing separator") {
    const auto s = build_sequence(ab_cde(), PositionScheme::SharedFirst, Sft{"q?", std::string("cde")}, 512);
    CHECK(s.supervised_count() == 3 + 1);
    for (const auto& t : s.tokens)
      if (t.kind == TokenKind::Layout) CHECK_FALSE(t.supervise);
    CHECK(s.tokens.back().id == serial::kSep);
    // Prompt ids continue after the document's largest id.
    CHECK(s.tokens[8].position == 6);
    const auto prompt = build_sequence(ab_cde(), PositionScheme::SharedFirst, Sft{"q?", std::nullopt}, 512);
    CHECK(prompt.size() == s.size() - 4);
    CHECK(prompt.supervised_count() == 0);
  }

  TEST_CASE("text-only and string layouts carry no layout tokens") {
    CHECK(build_sequence(ab_cde(), PositionScheme::TextOnly, Pretrain{}, 512).layout_count() == 0);
    const InputEncoding enc{PositionScheme::ExtraIds, serial::SerializationFormat::CoordSuffix};
    const auto s = build_sequence(ab_cde(), enc, Pretrain{}, 512);
    CHECK(s.layout_count() == 0);
    CHECK(s.size() == 1 + std::string("ab, [100, 100, 140, 130]cde, [200, 100, 260, 130]").size());
    const InputEncoding bad{PositionScheme::SharedFirst, serial::SerializationFormat::CoordSuffix};
    CHECK_THROWS_AS(build_sequence(ab_cde(), bad, Pretrain{}, 512), ArgumentError);
  }

  TEST_CASE("overflow reports required and available lengths") {
    try {
      build_sequence(ab_cde(), PositionScheme::SharedFirst, Pretrain{}, 5);
      FAIL("expected overflow");
    } catch (const ContextOverflowError& e) {
      CHECK(std::string(e.what()).find("8") != std::string::npos);
      CHECK(std::string(e.what()).find("5") != std::string::npos);
    }
  }

  TEST_CASE("without layout tokens the loss is the language-model cross-entropy, bit for bit") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto p = nn::init_params({}, seed);
      const auto s = build_sequence(ab_cde(), PositionScheme::TextOnly, Pretrain{}, 512);
      const auto b = ntlp_loss(p, s);
      CHECK(b.mse_count == 0);
      CHECK(b.total == reference_lm_loss(p, s));
    }
  }

  TEST_CASE("hand-built three-token example") {
    InterleavedSequence s;
    s.tokens.push_back(TypedToken::text(0, 0));
    s.tokens.push_back(TypedToken::text(1, 1, true));
    s.tokens.push_back(TypedToken::layout({0.1, 0.2, 0.3, 0.4}, 1, true));
    nn::Tape tape;
    nn::Var logits = tape.constant(nn::Tensor(1, 2, 0.0));
    nn::Var pred = tape.constant(nn::Tensor(1, 4, 0.5));
    const auto g = combine_targets(s, &logits, &pred, 1.0);
    CHECK(std::abs(g.breakdown.ce_sum - std::log(2.0)) <= 1e-12);
    CHECK(std::abs(g.breakdown.mse_sum - 0.075) <= 1e-12);
    CHECK(std::abs(g.total.scalar() - (std::log(2.0) + 0.075) / 2.0) <= 1e-12);
  }

  TEST_CASE("text targets feed cross-entropy and layout targets feed the coordinate error") {
    // A text target after a layout token and a layout target after a text token.
    InterleavedSequence s;
    s.tokens.push_back(TypedToken::layout({0.5, 0.5, 0.5, 0.5}, 0));
    s.tokens.push_back(TypedToken::text(1, 1, true));
    s.tokens.push_back(TypedToken::layout({0.0, 0.0, 0.0, 0.0}, 1, true));
    nn::Tape tape;
    nn::Var logits = tape.constant(nn::Tensor({1, 2}, std::vector<double>{0.0, std::log(3.0)}));
    nn::Var pred = tape.constant(nn::Tensor(1, 4, 1.0));
    const auto g = combine_targets(s, &logits, &pred, 1.0);
    CHECK(g.breakdown.ce_count == 1);
    CHECK(g.breakdown.mse_count == 1);
    CHECK(g.breakdown.ce_sum == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-12));
    CHECK(g.breakdown.mse_sum == 1.0);
    nn::Var wrong = tape.constant(nn::Tensor(2, 2, 0.0));
    CHECK_THROWS_AS(combine_targets(s, &wrong, &pred, 1.0), ArgumentError);
  }

  TEST_CASE("removing layout supervision removes exactly the coordinate term") {
    const auto p = nn::init_params({}, 4);
    auto s = build_sequence(ab_cde(), PositionScheme::SharedFirst, Pretrain{}, 512);
    const auto full = ntlp_loss(p, s);
    for (auto& t : s.tokens)
      if (t.kind == TokenKind::Layout) t.supervise = false;
    const auto masked = ntlp_loss(p, s);
    CHECK(full.mse_count == 2);
    CHECK(full.mse_sum > 0.0);
    CHECK(masked.mse_count == 0);
    CHECK(masked.mse_sum == 0.0);
    CHECK(masked.ce_count == full.ce_count);
    CHECK(masked.ce_sum == doctest::Approx(full.ce_sum).epsilon(1e-12));
    CHECK(full.total == doctest::Approx((full.ce_sum + full.mse_sum) / 7.0).epsilon(1e-14));
  }

  TEST_CASE("the total is symmetric in the order of targets") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> g;
    const std::size_t n = 12;
    std::vector<TypedToken> targets;
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < n; ++i) {
      if (i % 3 == 0) {
        targets.push_back(TypedToken::layout({u(rng), u(rng), u(rng), u(rng)}, 0, true));
        rows.push_back({u(rng), u(rng), u(rng), u(rng)});
      } else {
        targets.push_back(TypedToken::text(rng() % 5, 0, true));
        rows.push_back({g(rng), g(rng), g(rng), g(rng), g(rng)});
      }
    }
    auto total_for = [&](const std::vector<std::size_t>& order) {
      InterleavedSequence s;
      s.tokens.push_back(TypedToken::text(0, 0));
      std::vector<double> text, lay;
      for (auto k : order) {
        s.tokens.push_back(targets[k]);
        auto& dst = targets[k].kind == TokenKind::Text ? text : lay;
        dst.insert(dst.end(), rows[k].begin(), rows[k].end());
      }
      nn::Tape tape;
      nn::Var tl = tape.constant(nn::Tensor({text.size() / 5, 5}, text));
      nn::Var lp = tape.constant(nn::Tensor({lay.size() / 4, 4}, lay));
      return combine_targets(s, &tl, &lp, 1.0).total.scalar();
    };
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    const double base = total_for(order);
    CHECK(base >= 0.0);
    for (int trial = 0; trial < 20; ++trial) {
      std::shuffle(order.begin(), order.end(), rng);
      CHECK(total_for(order) == doctest::Approx(base).epsilon(1e-12));
    }
  }

  TEST_CASE("pretraining predicts across modalities in both directions") {
    const auto corpus = doc::generate_synthetic_corpus({20, {4, 8}, {1, 1}, 3, 1.0});
    for (const auto& d : corpus.documents) {
      const auto s = build_sequence(d, PositionScheme::SharedFirst, Pretrain{}, 512);
      bool text_to_layout = false, layout_to_text = false;
      for (std::size_t i = 1; i < s.size(); ++i) {
        if (!s.tokens[i].supervise) continue;
        const auto from = s.tokens[i - 1].kind, to = s.tokens[i].kind;
        text_to_layout |= from == TokenKind::Text && to == TokenKind::Layout;
        layout_to_text |= from == TokenKind::Layout && to == TokenKind::Text;
      }
      CHECK(text_to_layout);
      CHECK(layout_to_text);
    }
  }

  TEST_CASE("degenerate sequences") {
    const auto p = nn::init_params({}, 6);
    InterleavedSequence one;
    one.tokens.push_back(TypedToken::text(serial::kBos, 0));
    CHECK_THROWS_AS(ntlp_loss(p, one), ArgumentError);
    auto unsup = build_sequence(ab_cde(), PositionScheme::SharedFirst, Sft{"q?", std::nullopt}, 512);
    CHECK_THROWS_AS(ntlp_loss(p, unsup), ArgumentError);
  }

  TEST_CASE("a perfect predictor has zero loss") {
    InterleavedSequence s;
    s.tokens.push_back(TypedToken::text(0, 0));
    s.tokens.push_back(TypedToken::text(1, 1, true));
    s.tokens.push_back(TypedToken::layout({0.25, 0.5, 0.75, 1.0}, 1, true));
    nn::Tape tape;
    nn::Var logits = tape.constant(nn::Tensor({1, 2}, std::vector<double>{-1000.0, 1000.0}));
    nn::Var pred = tape.constant(nn::Tensor({1, 4}, std::vector<double>{0.25, 0.5, 0.75, 1.0}));
    CHECK(combine_targets(s, &logits, &pred, 1.0).total.scalar() == 0.0);
  }
}
