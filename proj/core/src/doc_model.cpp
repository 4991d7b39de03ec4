// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#include "laytoken/doc_model.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "laytoken/error.hpp"

namespace laytoken::doc {

using nlohmann::json;

std::size_t Document::segment_count() const {
  std::size_t n = 0;
  for (const auto& page : pages) n += page.segments.size();
  return n;
}

std::vector<const TextSegment*> Document::segments() const {
  std::vector<const TextSegment*> out;
  out.reserve(segment_count());
  for (const auto& page : pages)
    for (const auto& seg : page.segments) out.push_back(&seg);
  return out;
}

bool has_visible_text(std::string_view text) {
  return std::any_of(text.begin(), text.end(),
                     [](unsigned char c) { return !std::isspace(c); });
}

BBox normalize_box(const PixelBox& box, std::int64_t page_width, std::int64_t page_height) {
  if (page_width < 1 || page_height < 1)
    throw ArgumentError("page dimensions must be positive, got " + std::to_string(page_width) +
                        "x" + std::to_string(page_height));
  if (box.x1 < 0 || box.y1 < 0 || box.x1 > box.x2 || box.y1 > box.y2 || box.x2 > page_width ||
      box.y2 > page_height)
    throw DomainError("box [" + std::to_string(box.x1) + "," + std::to_string(box.y1) + "," +
                      std::to_string(box.x2) + "," + std::to_string(box.y2) +
                      "] is not inside a " + std::to_string(page_width) + "x" +
                      std::to_string(page_height) + " page");
  const auto w = static_cast<double>(page_width);
  const auto h = static_cast<double>(page_height);
  return {static_cast<double>(box.x1) / w, static_cast<double>(box.y1) / h,
          static_cast<double>(box.x2) / w, static_cast<double>(box.y2) / h};
}

std::array<double, 4> denormalize_box(const BBox& box, double page_width, double page_height) {
  return {box.x1 * page_width, box.y1 * page_height, box.x2 * page_width, box.y2 * page_height};
}

TextSegment make_segment(std::string text, const PixelBox& box, std::int64_t page_width,
                         std::int64_t page_height) {
  if (!has_visible_text(text)) throw ArgumentError("segment text is empty or whitespace");
  TextSegment seg;
  seg.box = normalize_box(box, page_width, page_height);
  seg.text = std::move(text);
  seg.pixel_box = box;
  return seg;
}

namespace {

[[noreturn]] void invalid(const std::string& what, long page, long segment) {
  std::string where = "page " + std::to_string(page);
  if (segment >= 0) where += ", segment " + std::to_string(segment);
  throw ValidationError(where + ": " + what, page, segment);
}

std::int64_t require_int(const json& j, const char* field, long page, long segment) {
  if (!j.contains(field)) invalid(std::string("missing field '") + field + "'", page, segment);
  const auto& v = j.at(field);
  if (!v.is_number_integer()) invalid(std::string("field '") + field + "' must be an integer", page, segment);
  return v.get<std::int64_t>();
}

Document document_from_json(const json& root) {
  if (!root.is_object() || !root.contains("pages") || !root.at("pages").is_array())
    throw ValidationError("document must be an object with a 'pages' array", -1, -1);
  Document doc;
  long page_index = 0;
  for (const auto& jp : root.at("pages")) {
    if (!jp.is_object()) invalid("page must be an object", page_index, -1);
    Page page;
    page.width = require_int(jp, "width", page_index, -1);
    page.height = require_int(jp, "height", page_index, -1);
    if (page.width < 1 || page.height < 1) invalid("page dimensions must be positive", page_index, -1);
    if (!jp.contains("segments") || !jp.at("segments").is_array())
      invalid("missing 'segments' array", page_index, -1);
    long seg_index = 0;
    for (const auto& js : jp.at("segments")) {
      if (!js.is_object() || !js.contains("text") || !js.at("text").is_string())
        invalid("segment needs a string 'text'", page_index, seg_index);
      const auto& jb = js.contains("box") ? js.at("box") : json();
      if (!jb.is_array() || jb.size() != 4 ||
          !std::all_of(jb.begin(), jb.end(), [](const json& v) { return v.is_number_integer(); }))
        invalid("'box' must be four integers [x1,y1,x2,y2]", page_index, seg_index);
      PixelBox box{jb[0].get<std::int64_t>(), jb[1].get<std::int64_t>(), jb[2].get<std::int64_t>(),
                   jb[3].get<std::int64_t>()};
      auto text = js.at("text").get<std::string>();
      if (!has_visible_text(text)) invalid("empty segment text", page_index, seg_index);
      try {
        page.segments.push_back(make_segment(std::move(text), box, page.width, page.height));
      } catch (const DomainError& e) {
        invalid(e.what(), page_index, seg_index);
      }
      ++seg_index;
    }
    doc.pages.push_back(std::move(page));
    ++page_index;
  }
  return doc;
}

json parse_json(std::string_view raw) {
  try {
    return json::parse(raw.begin(), raw.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), e.byte);
  }
}

}  // namespace

Document ingest_document(std::string_view raw) { return document_from_json(parse_json(raw)); }

std::string serialize_document(const Document& doc) {
  json pages = json::array();
  for (const auto& page : doc.pages) {
    json segs = json::array();
    for (const auto& s : page.segments) {
      const auto& b = s.pixel_box;
      segs.push_back({{"text", s.text}, {"box", {b.x1, b.y1, b.x2, b.y2}}});
    }
    pages.push_back({{"width", page.width}, {"height", page.height}, {"segments", std::move(segs)}});
  }
  return json{{"pages", std::move(pages)}}.dump();
}

std::vector<Document> load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus", path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string raw = buffer.str();

  std::vector<Document> docs;
  const bool jsonl = path.size() >= 6 && path.compare(path.size() - 6, 6, ".jsonl") == 0;
  if (jsonl) {
    std::size_t start = 0;
    while (start < raw.size()) {
      auto end = raw.find('\n', start);
      if (end == std::string::npos) end = raw.size();
      std::string_view line(raw.data() + start, end - start);
      if (has_visible_text(line)) {
        try {
          docs.push_back(ingest_document(line));
        } catch (const ParseError& e) {
          throw ParseError(e.what(), start + e.byte_offset());
        }
      }
      start = end + 1;
    }
    return docs;
  }
  const json root = parse_json(raw);
  if (root.is_array()) {
    for (const auto& j : root) docs.push_back(document_from_json(j));
  } else {
    docs.push_back(document_from_json(root));
  }
  return docs;
}

}  // namespace laytoken::doc
