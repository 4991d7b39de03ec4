// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace laytoken::layout {

enum class PositionScheme {
  /// Layout tokens take their own consecutive ids: [0 .. T-1, T .. T+L-1].
  ExtraIds,
  /// Each layout token reuses the id of its segment's first text token:
  /// [0, 1, .., T-1, 0]. Consumes no ids beyond the text.
  SharedFirst,
  /// No layout tokens at all.
  TextOnly,
};

std::string_view scheme_name(PositionScheme scheme);
/// Parses shared-first | extra-ids | text-only.
PositionScheme parse_scheme(std::string_view name);

/// Position ids for an interleaved run of segments. Each segment contributes
/// its `text_counts[k]` text tokens followed (unless TextOnly) by one layout
/// token. Text ids are consecutive starting at `first_id`. Throws
/// ArgumentError for a segment without text.
std::vector<std::int64_t> assign_positions(std::span<const std::size_t> text_counts,
                                           PositionScheme scheme, std::int64_t first_id = 0);

}  // namespace laytoken::layout
