// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#include "laytoken/sequence.hpp"

#include <algorithm>

#include "laytoken/error.hpp"

namespace laytoken::ntlp {

std::vector<std::int64_t> InterleavedSequence::positions() const {
  std::vector<std::int64_t> p;
  p.reserve(tokens.size());
  for (const auto& t : tokens) p.push_back(t.position);
  return p;
}

std::size_t InterleavedSequence::layout_count() const {
  return static_cast<std::size_t>(std::count_if(
      tokens.begin(), tokens.end(), [](const TypedToken& t) { return t.kind == TokenKind::Layout; }));
}

std::size_t InterleavedSequence::supervised_count() const {
  return static_cast<std::size_t>(
      std::count_if(tokens.begin(), tokens.end(), [](const TypedToken& t) { return t.supervise; }));
}

std::int64_t InterleavedSequence::max_position() const {
  std::int64_t m = -1;
  for (const auto& t : tokens) m = std::max(m, t.position);
  return m;
}

InterleavedSequence build_sequence(const doc::Document& doc, const InputEncoding& encoding,
                                   const Mode& mode, std::size_t max_context) {
  const auto segments = doc.segments();
  if (segments.empty()) throw ArgumentError("cannot build a sequence from a document without segments");
  if (encoding.string_layout && !serial::is_string_layout(*encoding.string_layout))
    throw ArgumentError("string layout needs a format that renders coordinates");
  if (encoding.string_layout && encoding.scheme == layout::PositionScheme::SharedFirst)
    throw ArgumentError("string layout cannot share position ids; use extra-ids");

  const bool pretrain = std::holds_alternative<Pretrain>(mode);
  InterleavedSequence seq;
  seq.tokens.push_back(TypedToken::text(serial::kBos, 0));

  std::vector<std::vector<serial::TokenId>> texts;
  texts.reserve(segments.size());
  for (const auto* s : segments)
    texts.push_back(serial::tokenize(encoding.string_layout ? serial::render(*s, *encoding.string_layout)
                                                            : s->text));
  std::vector<std::size_t> counts;
  for (const auto& t : texts) counts.push_back(t.size());

  const auto scheme = encoding.string_layout ? layout::PositionScheme::TextOnly : encoding.scheme;
  const auto ids = layout::assign_positions(counts, scheme, 1);
  std::size_t cursor = 0;
  for (std::size_t k = 0; k < segments.size(); ++k) {
    for (auto id : texts[k]) seq.tokens.push_back(TypedToken::text(id, ids[cursor++], pretrain));
    if (scheme != layout::PositionScheme::TextOnly)
      seq.tokens.push_back(TypedToken::layout(segments[k]->box, ids[cursor++], pretrain));
  }

  if (const auto* sft = std::get_if<Sft>(&mode)) {
    std::int64_t next = seq.max_position() + 1;
    seq.tokens.push_back(TypedToken::text(serial::kSep, next++));
    for (auto id : serial::tokenize(sft->question)) seq.tokens.push_back(TypedToken::text(id, next++));
    seq.tokens.push_back(TypedToken::text(serial::kSep, next++));
    if (sft->answer) {
      for (auto id : serial::tokenize(*sft->answer)) seq.tokens.push_back(TypedToken::text(id, next++, true));
      seq.tokens.push_back(TypedToken::text(serial::kSep, next++, true));
    }
  }
  if (seq.size() > max_context) throw ContextOverflowError(seq.size(), max_context);
  return seq;
}

InterleavedSequence build_sequence(const doc::Document& doc, layout::PositionScheme scheme,
                                   const Mode& mode, std::size_t max_context) {
  return build_sequence(doc, InputEncoding{scheme, std::nullopt}, mode, max_context);
}

}  // namespace laytoken::ntlp
