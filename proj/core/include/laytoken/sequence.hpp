// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "laytoken/doc_model.hpp"
#include "laytoken/positions.hpp"
#include "laytoken/serial_formats.hpp"

namespace laytoken::ntlp {

enum class TokenKind { Text, Layout };

/// One model-facing token. Text tokens carry a vocabulary id; layout tokens
/// carry the ground-truth box they are built from (and are embedded by the
/// layout tokenizer, never by the vocabulary table).
struct TypedToken {
  TokenKind kind = TokenKind::Text;
  serial::TokenId id = 0;
  doc::BBox box;
  std::int64_t position = 0;
  bool supervise = false;

  static TypedToken text(serial::TokenId id, std::int64_t position, bool supervise = false) {
    return {TokenKind::Text, id, {}, position, supervise};
  }
  static TypedToken layout(const doc::BBox& box, std::int64_t position, bool supervise = false) {
    return {TokenKind::Layout, serial::kLayoutPlaceholder, box, position, supervise};
  }
};

struct InterleavedSequence {
  std::vector<TypedToken> tokens;

  std::size_t size() const { return tokens.size(); }
  std::vector<std::int64_t> positions() const;
  std::size_t layout_count() const;
  std::size_t supervised_count() const;
  std::int64_t max_position() const;
};

/// How a document is presented to the model.
struct InputEncoding {
  layout::PositionScheme scheme = layout::PositionScheme::SharedFirst;
  /// When set, layout is spelled out as characters in this format instead of
  /// layout tokens; every token then takes the next position id.
  std::optional<serial::SerializationFormat> string_layout;
};

/// Whole-document reconstruction: every token after BOS is a target.
struct Pretrain {};
/// Question answering: document, SEP, question, SEP, answer, SEP. Only the
/// answer bytes and the closing SEP are targets. Without an answer the
/// sequence ends after the second SEP (a decoding prompt).
struct Sft {
  std::string question;
  std::optional<std::string> answer;
};
using Mode = std::variant<Pretrain, Sft>;

/// Builds the interleaved sequence. BOS takes position 0 and the first
/// segment's text starts at 1; prompt and answer text continue the id
/// sequence after the largest id used by the document. Throws
/// ContextOverflowError when the result exceeds `max_context` tokens.
InterleavedSequence build_sequence(const doc::Document& doc, const InputEncoding& encoding,
                                   const Mode& mode, std::size_t max_context);
InterleavedSequence build_sequence(const doc::Document& doc, layout::PositionScheme scheme,
                                   const Mode& mode, std::size_t max_context);

}  // namespace laytoken::ntlp
