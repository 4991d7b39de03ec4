// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "laytoken/doc_model.hpp"
#include "laytoken/model_config.hpp"

namespace laytoken::serial {

using TokenId = std::uint16_t;

// Byte-level vocabulary: ids 0..255 are raw bytes, followed by four specials.
inline constexpr TokenId kPad = 256;
inline constexpr TokenId kBos = 257;
inline constexpr TokenId kSep = 258;
inline constexpr TokenId kLayoutPlaceholder = 259;
inline constexpr std::size_t kVocabSize = 260;

/// One UTF-8 byte per token.
std::vector<TokenId> tokenize(std::string_view text);

/// Inverse of tokenize. Throws ArgumentError on a special token id.
std::string detokenize(const std::vector<TokenId>& ids);

enum class SerializationFormat {
  PlainText,      // text
  JsonBox,        // {text:"text",Box:[123, 456, 133, 500]}
  RefBoxParen,    // <ref>text</ref><box>(123,456),(133,500)</box>
  RefBoxBracket,  // <ref>text</ref><box>[[123, 456, 133, 500]]</box>
  CoordSuffix,    // text, [123, 456, 133, 500]
  LayToken,       // text tokens followed by one layout token; not a string rendering
};

inline constexpr std::array<SerializationFormat, 6> kAllFormats = {
    SerializationFormat::PlainText,     SerializationFormat::JsonBox,
    SerializationFormat::RefBoxParen,   SerializationFormat::RefBoxBracket,
    SerializationFormat::CoordSuffix,   SerializationFormat::LayToken};

std::string_view format_name(SerializationFormat format);
/// Accepts the names produced by format_name (plain, json-box, ref-paren,
/// ref-bracket, coord-suffix, laytoken). Throws ArgumentError listing the
/// valid names otherwise.
SerializationFormat parse_format(std::string_view name);

/// True for the formats that spell layout out as characters.
bool is_string_layout(SerializationFormat format);

/// Renders one segment with pixel-integer coordinates. Throws ArgumentError
/// for LayToken, which has no string form.
std::string render(std::string_view text, const doc::PixelBox& box, SerializationFormat format);
std::string render(const doc::TextSegment& segment, SerializationFormat format);

/// Recovers the segment text from a rendered string. Throws ArgumentError
/// when the string does not match the format's template.
std::string strip_markup(std::string_view rendered, SerializationFormat format);

struct OverheadReport {
  SerializationFormat format = SerializationFormat::PlainText;
  std::size_t segments = 0;
  std::vector<std::size_t> per_segment_extra_ids;
  std::size_t total_extra_ids = 0;  // m'
  std::size_t text_token_count = 0;
  /// Trained position window N.
  std::size_t window = 2048;
  /// Fraction of consumed position ids that carry text: text / (text + extra).
  /// Equals N_t / N for a window filled with this format.
  double t_ratio = 1.0;
  /// Text positions available inside the window, floor(N * t_ratio).
  std::size_t window_text_tokens = 0;
  /// Model-facing tokens for the document, without BOS.
  std::size_t sequence_length = 0;
  std::optional<double> analytic_t_ratio;
  double flops_proxy = 0.0;
};

/// Analytic T-Ratio for an average segment of `text_tokens` text tokens that
/// spends `extra_ids` position ids on layout: T / (T + E).
double analytic_t_ratio(double text_tokens, double extra_ids);

/// Extra position ids a single segment costs in `format` under the byte
/// tokenizer. Zero for PlainText and LayToken.
std::size_t segment_extra_ids(const doc::TextSegment& segment, SerializationFormat format);

/// Tokens the document occupies in `format` (LayToken adds one token per
/// segment that consumes no position id).
std::size_t sequence_length(const doc::Document& doc, SerializationFormat format);

/// Per-format position-id accounting for a document. When
/// `avg_text_tokens_override` is set, the report also carries the analytic
/// ratio T / (T + E) with E the document's mean per-segment extra ids.
OverheadReport count_overhead(const doc::Document& doc, SerializationFormat format,
                              std::size_t window = 2048,
                              std::optional<std::size_t> avg_text_tokens_override = std::nullopt,
                              const nn::ModelConfig& model = {});

/// Reference per-segment extra-id counts reported for the published
/// subword tokenizer: {text:..,Box:[..]} 27, <ref>..(..),(..) 21,
/// <ref>..[[..]] 18, a single box embedding 1, layout token 0.
struct ReferenceOverhead {
  std::string_view label;
  std::size_t extra_ids_per_segment;
  std::size_t avg_extra_ids_mp_docvqa;
};
inline constexpr std::array<ReferenceOverhead, 6> kReferenceOverheads = {{
    {"plain", 0, 0},
    {"json-box", 27, 8015},
    {"ref-paren", 21, 7959},
    {"ref-bracket", 18, 6894},
    {"box-embedding", 1, 350},
    {"laytoken", 0, 0},
}};

/// Multiply-accumulate estimate for one forward pass over `sequence_length`
/// tokens: P*S + n_layers * 2 * S^2 * d, with P the parameter count. A
/// proxy, not a hardware measurement.
double flops_proxy_macs(const nn::ModelConfig& config, std::size_t sequence_length);
/// 2 * flops_proxy_macs.
double flops_proxy(const nn::ModelConfig& config, std::size_t sequence_length);

}  // namespace laytoken::serial
