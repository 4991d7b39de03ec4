// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "laytoken/error.hpp"
#include "laytoken/model.hpp"
#include "laytoken/serial_formats.hpp"

using namespace laytoken;
using namespace laytoken::serial;

namespace {

const doc::PixelBox kBox{123, 456, 133, 500};

doc::Document one_segment_doc(const std::string& text) {
  doc::Document d;
  d.pages.push_back({1000, 1000, {doc::make_segment(text, kBox, 1000, 1000)}});
  return d;
}

doc::Document random_doc(std::mt19937_64& rng) {
  static const char* words[] = {"a", "Total", "2024-05-01", "Invoice no.", "x", "amount due", "42.00"};
  doc::Document d;
  d.pages.push_back({1000, 1000, {}});
  const std::size_t n = 1 + rng() % 12;
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t x = static_cast<std::int64_t>(rng() % 900), y = static_cast<std::int64_t>(rng() % 900);
    d.pages[0].segments.push_back(doc::make_segment(words[rng() % 7], {x, y, x + 50, y + 30}, 1000, 1000));
  }
  return d;
}

}  // namespace

TEST_SUITE("serial_formats") {
  TEST_CASE("byte tokenizer") {
    CHECK(tokenize("ab") == std::vector<TokenId>{97, 98});
    CHECK(tokenize("").empty());
    const std::string utf8 = "na\xC3\xAFve \xE2\x82\xAC";
    CHECK(tokenize(utf8).size() == utf8.size());
    CHECK(detokenize(tokenize(utf8)) == utf8);
    CHECK_THROWS_AS(detokenize({97, kSep}), ArgumentError);
    CHECK(kVocabSize == 260);
  }

  TEST_CASE("templates render byte-exactly") {
    CHECK(render("text", kBox, SerializationFormat::JsonBox) == R"({text:"text",Box:[123, 456, 133, 500]})");
    CHECK(render("text", kBox, SerializationFormat::RefBoxParen) == "<ref>text</ref><box>(123,456),(133,500)</box>");
    CHECK(render("text", kBox, SerializationFormat::RefBoxBracket) == "<ref>text</ref><box>[[123, 456, 133, 500]]</box>");
    CHECK(render("text", kBox, SerializationFormat::CoordSuffix) == "text, [123, 456, 133, 500]");
    CHECK(render("text", kBox, SerializationFormat::PlainText) == "text");
    CHECK_THROWS_AS(render("text", kBox, SerializationFormat::LayToken), ArgumentError);
  }

  TEST_CASE("render then strip recovers the text") {
    for (auto f : kAllFormats) {
      if (f == SerializationFormat::LayToken) continue;
      for (std::string t : {"text", "a, [1, 2]", "<ref>x</ref>", "{text:\"q\"}", "\xC3\xA9t\xC3\xA9"})
        CHECK(strip_markup(render(t, kBox, f), f) == t);
    }
    CHECK_THROWS_AS(strip_markup("no markup", SerializationFormat::JsonBox), ArgumentError);
  }

  TEST_CASE("extra ids of the example segment under the byte tokenizer") {
    const auto d = one_segment_doc("text");
    // Hand count: the rendered strings are 38 and 45 bytes long, the text 4.
    CHECK(count_overhead(d, SerializationFormat::JsonBox).total_extra_ids == 34);
    CHECK(count_overhead(d, SerializationFormat::RefBoxParen).total_extra_ids == 41);
    CHECK(count_overhead(d, SerializationFormat::RefBoxBracket).total_extra_ids == 44);
    CHECK(count_overhead(d, SerializationFormat::CoordSuffix).total_extra_ids == 22);
  }

  TEST_CASE("analytic T-Ratio") {
    CHECK(analytic_t_ratio(10, 27) == doctest::Approx(10.0 / 37.0));
    CHECK(std::round(analytic_t_ratio(10, 27) * 10000) / 100 == doctest::Approx(27.03).epsilon(0.0005));
    CHECK(analytic_t_ratio(10, 0) == 1.0);
  }

  TEST_CASE("plain text and layout tokens spend no extra ids") {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 50; ++i) {
      const auto d = random_doc(rng);
      for (auto f : {SerializationFormat::PlainText, SerializationFormat::LayToken}) {
        const auto r = count_overhead(d, f);
        CHECK(r.total_extra_ids == 0);
        CHECK(r.t_ratio == 1.0);
        CHECK(r.window_text_tokens == r.window);
      }
    }
  }

  TEST_CASE("string formats always cost more tokens than plain text") {
    std::mt19937_64 rng(10);
    for (int i = 0; i < 50; ++i) {
      const auto d = random_doc(rng);
      const auto plain = count_overhead(d, SerializationFormat::PlainText);
      for (auto f : kAllFormats) {
        if (!is_string_layout(f)) continue;
        const auto r = count_overhead(d, f);
        CHECK(r.text_token_count == plain.text_token_count);
        CHECK(r.sequence_length > plain.sequence_length);
        CHECK(r.t_ratio > 0.0);
        CHECK(r.t_ratio < 1.0);
        CHECK(r.t_ratio == doctest::Approx(static_cast<double>(r.text_token_count) /
                                           static_cast<double>(r.text_token_count + r.total_extra_ids)));
      }
    }
  }

  TEST_CASE("analytic override uses the mean per-segment extra ids") {
    const auto r = count_overhead(one_segment_doc("text"), SerializationFormat::JsonBox, 2048, 10);
    REQUIRE(r.analytic_t_ratio.has_value());
    CHECK(*r.analytic_t_ratio == doctest::Approx(10.0 / 44.0));
  }

  TEST_CASE("flops proxy closed forms") {
    nn::ModelConfig c;
    const double p = static_cast<double>(nn::parameter_count(c));
    CHECK(flops_proxy_macs(c, 1) == p + 2.0 * static_cast<double>(c.n_layers) * static_cast<double>(c.d_model));
    CHECK(flops_proxy(c, 1) == 2.0 * flops_proxy_macs(c, 1));
    for (std::size_t s : {1u, 7u, 100u, 512u}) CHECK(flops_proxy_macs(c, 2 * s) > 2.0 * flops_proxy_macs(c, s));
    CHECK_THROWS_AS(flops_proxy_macs(c, 0), ArgumentError);
  }

  TEST_CASE("layout tokens are cheaper than every string format") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 50; ++i) {
      const auto d = random_doc(rng);
      const auto lay = count_overhead(d, SerializationFormat::LayToken);
      CHECK(lay.sequence_length == count_overhead(d, SerializationFormat::PlainText).sequence_length + d.segment_count());
      for (auto f : kAllFormats) {
        if (!is_string_layout(f)) continue;
        const auto r = count_overhead(d, f);
        CHECK(lay.sequence_length < r.sequence_length);
        CHECK(lay.flops_proxy < r.flops_proxy);
      }
    }
  }

  TEST_CASE("format names round trip and unknown names list the valid ones") {
    for (auto f : kAllFormats) CHECK(parse_format(format_name(f)) == f);
    try {
      parse_format("xml");
      FAIL("expected an argument error");
    } catch (const ArgumentError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("json-box") != std::string::npos);
      CHECK(msg.find("laytoken") != std::string::npos);
    }
  }

  TEST_CASE("reference overhead constants") {
    CHECK(kReferenceOverheads[1].extra_ids_per_segment == 27);
    CHECK(kReferenceOverheads[2].extra_ids_per_segment == 21);
    CHECK(kReferenceOverheads[3].extra_ids_per_segment == 18);
    CHECK(kReferenceOverheads[4].extra_ids_per_segment == 1);
    CHECK(kReferenceOverheads[3].avg_extra_ids_mp_docvqa == 6894);
  }
}
