// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#include "laytoken/positions.hpp"

#include <string>

#include "laytoken/error.hpp"

namespace laytoken::layout {

std::string_view scheme_name(PositionScheme scheme) {
  switch (scheme) {
    case PositionScheme::ExtraIds: return "extra-ids";
    case PositionScheme::SharedFirst: return "shared-first";
    case PositionScheme::TextOnly: return "text-only";
  }
  return "unknown";
}

PositionScheme parse_scheme(std::string_view name) {
  for (auto s : {PositionScheme::SharedFirst, PositionScheme::ExtraIds, PositionScheme::TextOnly})
    if (scheme_name(s) == name) return s;
  throw ArgumentError("unknown position scheme '" + std::string(name) +
                      "'; valid schemes: shared-first, extra-ids, text-only");
}

std::vector<std::int64_t> assign_positions(std::span<const std::size_t> text_counts,
                                           PositionScheme scheme, std::int64_t first_id) {
  std::vector<std::int64_t> ids;
  std::int64_t next = first_id;
  for (std::size_t k = 0; k < text_counts.size(); ++k) {
    if (text_counts[k] == 0)
      throw ArgumentError("segment " + std::to_string(k) + " has no text tokens to anchor its layout token");
    const std::int64_t first = next;
    for (std::size_t i = 0; i < text_counts[k]; ++i) ids.push_back(next++);
    switch (scheme) {
      case PositionScheme::SharedFirst: ids.push_back(first); break;
      case PositionScheme::ExtraIds: ids.push_back(next++); break;
      case PositionScheme::TextOnly: break;
    }
  }
  return ids;
}

}  // namespace laytoken::layout
