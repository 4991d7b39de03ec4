// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace laytoken::doc {

/// Integer pixel box as emitted by OCR: [x1, y1, x2, y2].
struct PixelBox {
  std::int64_t x1 = 0;
  std::int64_t y1 = 0;
  std::int64_t x2 = 0;
  std::int64_t y2 = 0;

  bool operator==(const PixelBox&) const = default;
};

/// Page-relative box with every coordinate in [0, 1].
struct BBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  std::array<double, 4> coords() const { return {x1, y1, x2, y2}; }
  bool operator==(const BBox&) const = default;
};

struct TextSegment {
  std::string text;
  PixelBox pixel_box;
  BBox box;  // pixel_box normalized by the owning page's dimensions
};

struct Page {
  std::int64_t width = 0;
  std::int64_t height = 0;
  std::vector<TextSegment> segments;
};

struct Document {
  std::vector<Page> pages;

  std::size_t segment_count() const;
  /// Segments of all pages in page-major reading order.
  std::vector<const TextSegment*> segments() const;
};

/// Divides each coordinate by the matching page dimension. Throws
/// ArgumentError for a non-positive page dimension and DomainError when the
/// box is not inside the page.
BBox normalize_box(const PixelBox& box, std::int64_t page_width, std::int64_t page_height);

/// Inverse of normalize_box, without rounding.
std::array<double, 4> denormalize_box(const BBox& box, double page_width, double page_height);

/// Builds a segment, validating its text and box against the page.
TextSegment make_segment(std::string text, const PixelBox& box, std::int64_t page_width,
                         std::int64_t page_height);

/// Parses a UTF-8 OCR JSON document:
///   {"pages":[{"width":int,"height":int,
///              "segments":[{"text":string,"box":[x1,y1,x2,y2]}]}]}
/// Segment order is preserved exactly. Throws ParseError (with byte offset)
/// for malformed JSON and ValidationError for schema or invariant violations.
Document ingest_document(std::string_view raw);

/// Inverse of ingest_document: emits the OCR JSON schema with pixel boxes.
std::string serialize_document(const Document& doc);

/// Reads a corpus file: `.jsonl` holds one OCR document per line; any other
/// file holds a single document object or a JSON array of documents.
std::vector<Document> load_corpus(const std::string& path);

/// True when the string has at least one non-whitespace character.
bool has_visible_text(std::string_view text);

}  // namespace laytoken::doc
