// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace laytoken::train {

inline constexpr double kAnlsThreshold = 0.5;

/// Byte-level Levenshtein distance.
std::size_t edit_distance(std::string_view a, std::string_view b);

/// Lowercases ASCII letters and trims surrounding whitespace.
std::string normalize_answer(std::string_view s);

/// Max over golds of the normalized Levenshtein similarity
/// 1 - dist / max(len), zeroed below `threshold`. Both sides are normalized
/// first. Throws ArgumentError when `golds` is empty.
double anls(std::string_view prediction, const std::vector<std::string>& golds,
            double threshold = kAnlsThreshold);

}  // namespace laytoken::train
