// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#include "laytoken/anls.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

#include "laytoken/error.hpp"

namespace laytoken::train {

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

std::string normalize_answer(std::string_view s) {
  auto space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && space(s.front())) s.remove_prefix(1);
  while (!s.empty() && space(s.back())) s.remove_suffix(1);
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

double anls(std::string_view prediction, const std::vector<std::string>& golds, double threshold) {
  if (golds.empty()) throw ArgumentError("anls needs at least one gold answer");
  const std::string p = normalize_answer(prediction);
  double best = 0.0;
  for (const auto& gold : golds) {
    const std::string g = normalize_answer(gold);
    const std::size_t len = std::max(p.size(), g.size());
    const double nls =
        len == 0 ? 1.0 : 1.0 - static_cast<double>(edit_distance(p, g)) / static_cast<double>(len);
    best = std::max(best, nls >= threshold ? nls : 0.0);
  }
  return best;
}

}  // namespace laytoken::train
