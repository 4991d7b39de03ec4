// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#include "laytoken/serial_formats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "laytoken/error.hpp"

namespace laytoken::serial {

std::vector<TokenId> tokenize(std::string_view text) {
  std::vector<TokenId> ids;
  ids.reserve(text.size());
  for (unsigned char c : text) ids.push_back(static_cast<TokenId>(c));
  return ids;
}

std::string detokenize(const std::vector<TokenId>& ids) {
  std::string out;
  out.reserve(ids.size());
  for (TokenId id : ids) {
    if (id > 255) throw ArgumentError("cannot detokenize special token id " + std::to_string(id));
    out.push_back(static_cast<char>(id));
  }
  return out;
}

std::string_view format_name(SerializationFormat format) {
  switch (format) {
    case SerializationFormat::PlainText: return "plain";
    case SerializationFormat::JsonBox: return "json-box";
    case SerializationFormat::RefBoxParen: return "ref-paren";
    case SerializationFormat::RefBoxBracket: return "ref-bracket";
    case SerializationFormat::CoordSuffix: return "coord-suffix";
    case SerializationFormat::LayToken: return "laytoken";
  }
  return "unknown";
}

SerializationFormat parse_format(std::string_view name) {
  for (auto f : kAllFormats)
    if (format_name(f) == name) return f;
  std::string valid;
  for (auto f : kAllFormats) {
    if (!valid.empty()) valid += ", ";
    valid += format_name(f);
  }
  throw ArgumentError("unknown format '" + std::string(name) + "'; valid formats: " + valid);
}

bool is_string_layout(SerializationFormat format) {
  return format != SerializationFormat::PlainText && format != SerializationFormat::LayToken;
}

std::string render(std::string_view text, const doc::PixelBox& b, SerializationFormat format) {
  const auto n = [](std::int64_t v) { return std::to_string(v); };
  const std::string t(text);
  switch (format) {
    case SerializationFormat::PlainText:
      return t;
    case SerializationFormat::JsonBox:
      return "{text:\"" + t + "\",Box:[" + n(b.x1) + ", " + n(b.y1) + ", " + n(b.x2) + ", " +
             n(b.y2) + "]}";
    case SerializationFormat::RefBoxParen:
      return "<ref>" + t + "</ref><box>(" + n(b.x1) + "," + n(b.y1) + "),(" + n(b.x2) + "," +
             n(b.y2) + ")</box>";
    case SerializationFormat::RefBoxBracket:
      return "<ref>" + t + "</ref><box>[[" + n(b.x1) + ", " + n(b.y1) + ", " + n(b.x2) + ", " +
             n(b.y2) + "]]</box>";
    case SerializationFormat::CoordSuffix:
      return t + ", [" + n(b.x1) + ", " + n(b.y1) + ", " + n(b.x2) + ", " + n(b.y2) + "]";
    case SerializationFormat::LayToken:
      break;
  }
  throw ArgumentError(
      "laytoken has no string rendering; build layout tokens with the layout tokenizer instead");
}

std::string render(const doc::TextSegment& segment, SerializationFormat format) {
  return render(segment.text, segment.pixel_box, format);
}

namespace {

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}
bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

[[noreturn]] void mismatch(SerializationFormat format) {
  throw ArgumentError("string does not match the " + std::string(format_name(format)) + " template");
}

// Text is whatever sits between the fixed prefix and the LAST occurrence of
// the separator that opens the coordinate block, so segment text may itself
// contain markup characters.
std::string between(std::string_view s, std::string_view prefix, std::string_view separator,
                    std::string_view suffix, SerializationFormat format) {
  if (!starts_with(s, prefix) || !ends_with(s, suffix)) mismatch(format);
  const auto pos = s.rfind(separator);
  if (pos == std::string_view::npos || pos < prefix.size()) mismatch(format);
  return std::string(s.substr(prefix.size(), pos - prefix.size()));
}

}  // namespace

std::string strip_markup(std::string_view rendered, SerializationFormat format) {
  switch (format) {
    case SerializationFormat::PlainText:
      return std::string(rendered);
    case SerializationFormat::JsonBox:
      return between(rendered, "{text:\"", "\",Box:[", "]}", format);
    case SerializationFormat::RefBoxParen:
      return between(rendered, "<ref>", "</ref><box>(", ")</box>", format);
    case SerializationFormat::RefBoxBracket:
      return between(rendered, "<ref>", "</ref><box>[[", "]]</box>", format);
    case SerializationFormat::CoordSuffix:
      return between(rendered, "", ", [", "]", format);
    case SerializationFormat::LayToken:
      break;
  }
  throw ArgumentError("laytoken has no string rendering to strip");
}

double analytic_t_ratio(double text_tokens, double extra_ids) {
  if (text_tokens <= 0.0) throw ArgumentError("analytic T-Ratio needs a positive text length");
  return text_tokens / (text_tokens + extra_ids);
}

std::size_t segment_extra_ids(const doc::TextSegment& segment, SerializationFormat format) {
  if (!is_string_layout(format)) return 0;
  return tokenize(render(segment, format)).size() - tokenize(segment.text).size();
}

std::size_t sequence_length(const doc::Document& doc, SerializationFormat format) {
  std::size_t n = 0;
  for (const auto* seg : doc.segments()) {
    if (format == SerializationFormat::LayToken)
      n += tokenize(seg->text).size() + 1;
    else if (format == SerializationFormat::PlainText)
      n += tokenize(seg->text).size();
    else
      n += tokenize(render(*seg, format)).size();
  }
  return n;
}

OverheadReport count_overhead(const doc::Document& doc, SerializationFormat format,
                              std::size_t window,
                              std::optional<std::size_t> avg_text_tokens_override,
                              const nn::ModelConfig& model) {
  if (window == 0) throw ArgumentError("window must be positive");
  OverheadReport r;
  r.format = format;
  r.window = window;
  for (const auto* seg : doc.segments()) {
    const auto extra = segment_extra_ids(*seg, format);
    r.per_segment_extra_ids.push_back(extra);
    r.total_extra_ids += extra;
    r.text_token_count += tokenize(seg->text).size();
  }
  r.segments = r.per_segment_extra_ids.size();
  const std::size_t positions = r.text_token_count + r.total_extra_ids;
  r.t_ratio = positions == 0 ? 1.0
                             : static_cast<double>(r.text_token_count) / static_cast<double>(positions);
  r.window_text_tokens = r.total_extra_ids == 0
                             ? window
                             : static_cast<std::size_t>(std::floor(static_cast<double>(window) * r.t_ratio));
  r.sequence_length = sequence_length(doc, format);
  if (avg_text_tokens_override) {
    const double mean_extra =
        r.segments == 0 ? 0.0 : static_cast<double>(r.total_extra_ids) / static_cast<double>(r.segments);
    r.analytic_t_ratio = analytic_t_ratio(static_cast<double>(*avg_text_tokens_override), mean_extra);
  }
  r.flops_proxy = flops_proxy(model, std::max<std::size_t>(r.sequence_length, 1));
  return r;
}

double flops_proxy_macs(const nn::ModelConfig& config, std::size_t sequence_length) {
  if (sequence_length < 1) throw ArgumentError("flops_proxy needs sequence_length >= 1");
  const auto p = static_cast<double>(nn::parameter_count(config));
  const auto s = static_cast<double>(sequence_length);
  const auto d = static_cast<double>(config.d_model);
  return p * s + static_cast<double>(config.n_layers) * 2.0 * s * s * d;
}

double flops_proxy(const nn::ModelConfig& config, std::size_t sequence_length) {
  return 2.0 * flops_proxy_macs(config, sequence_length);
}

}  // namespace laytoken::serial
