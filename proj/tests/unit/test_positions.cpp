// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "laytoken/error.hpp"
#include "laytoken/positions.hpp"

using namespace laytoken;
using namespace laytoken::layout;

using Ids = std::vector<std::int64_t>;

TEST_SUITE("positions") {
  TEST_CASE("single segment of four tokens") {
    const std::vector<std::size_t> t{4};
    CHECK(assign_positions(t, PositionScheme::SharedFirst) == Ids{0, 1, 2, 3, 0});
    CHECK(assign_positions(t, PositionScheme::ExtraIds) == Ids{0, 1, 2, 3, 4});
    CHECK(assign_positions(t, PositionScheme::TextOnly) == Ids{0, 1, 2, 3});
  }

  TEST_CASE("two segments") {
    const std::vector<std::size_t> t{2, 3};
    CHECK(assign_positions(t, PositionScheme::SharedFirst) == Ids{0, 1, 0, 2, 3, 4, 2});
    CHECK(assign_positions(t, PositionScheme::ExtraIds) == Ids{0, 1, 2, 3, 4, 5, 6});
    CHECK(assign_positions(t, PositionScheme::SharedFirst, 1) == Ids{1, 2, 1, 3, 4, 5, 3});
  }

  TEST_CASE("empty segments are rejected") {
    const std::vector<std::size_t> t{2, 0};
    CHECK_THROWS_AS(assign_positions(t, PositionScheme::SharedFirst), ArgumentError);
  }

  TEST_CASE("scheme names") {
    for (auto s : {PositionScheme::SharedFirst, PositionScheme::ExtraIds, PositionScheme::TextOnly})
      CHECK(parse_scheme(scheme_name(s)) == s);
    CHECK_THROWS_AS(parse_scheme("shared"), ArgumentError);
  }

  TEST_CASE("layout ids reuse text ids under shared-first") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<std::size_t> t(1 + rng() % 10);
      for (auto& n : t) n = 1 + rng() % 8;
      const auto ids = assign_positions(t, PositionScheme::SharedFirst);
      std::set<std::int64_t> text_ids, layout_ids;
      std::size_t k = 0;
      for (auto n : t) {
        for (std::size_t i = 0; i < n; ++i) text_ids.insert(ids[k++]);
        layout_ids.insert(ids[k++]);
      }
      CHECK(std::includes(text_ids.begin(), text_ids.end(), layout_ids.begin(), layout_ids.end()));
    }
  }
}
