// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#include "laytoken/layout_tokenizer.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "laytoken/error.hpp"

namespace laytoken::layout {

using nn::Parameter;
using nn::Tape;
using nn::Tensor;
using nn::Var;

LayoutTokenizerParams::LayoutTokenizerParams(const nn::ModelConfig& c)
    : query("layout.query", {1, c.d_model}),
      coord_proj_w("layout.coord_proj.weight", {2 * c.coord_frequencies, c.d_model}),
      coord_proj_b("layout.coord_proj.bias", {c.d_model}),
      coord_role("layout.coord_role", {4, c.d_model}),
      attn_q("layout.attn.q", {c.d_model, c.d_model}),
      attn_k("layout.attn.k", {c.d_model, c.d_model}),
      attn_v("layout.attn.v", {c.d_model, c.d_model}),
      attn_out_w("layout.attn.out.weight", {c.d_model, c.d_model}),
      attn_out_b("layout.attn.out.bias", {c.d_model}) {}

std::vector<Parameter*> LayoutTokenizerParams::parameters() {
  return {&query, &coord_proj_w, &coord_proj_b, &coord_role, &attn_q,
          &attn_k, &attn_v,       &attn_out_w,   &attn_out_b};
}

std::vector<const Parameter*> LayoutTokenizerParams::parameters() const {
  return {&query, &coord_proj_w, &coord_proj_b, &coord_role, &attn_q,
          &attn_k, &attn_v,       &attn_out_w,   &attn_out_b};
}

LayoutHeadParams::LayoutHeadParams(const nn::ModelConfig& c)
    : weight("layout_head.weight", {c.d_model, 4}), bias("layout_head.bias", {4}) {}

std::vector<Parameter*> LayoutHeadParams::parameters() { return {&weight, &bias}; }
std::vector<const Parameter*> LayoutHeadParams::parameters() const { return {&weight, &bias}; }

Tensor coordinate_features(std::span<const doc::BBox> boxes, std::size_t frequencies) {
  Tensor out(4 * boxes.size(), 2 * frequencies);
  for (std::size_t b = 0; b < boxes.size(); ++b) {
    const auto coords = boxes[b].coords();
    for (std::size_t c = 0; c < 4; ++c) {
      const double v = coords[c];
      if (!(v >= -kCoordinateSlack && v <= 1.0 + kCoordinateSlack))
        throw DomainError("box coordinate " + std::to_string(v) + " outside [0, 1]");
      auto row = out.row(4 * b + c);
      for (std::size_t k = 0; k < frequencies; ++k) {
        const double w = std::numbers::pi * std::exp2(0.25 * static_cast<double>(k));
        row[2 * k] = std::sin(w * v);
        row[2 * k + 1] = std::cos(w * v);
      }
    }
  }
  return out;
}

namespace {

template <class P>
Var layout_tokens_impl(Tape& tape, P& p, std::span<const doc::BBox> boxes) {
  const std::size_t frequencies = p.coord_proj_w.value.rows() / 2;
  Var features = tape.constant(coordinate_features(boxes, frequencies));
  Var proj = nn::linear(features, tape.parameter(p.coord_proj_w), tape.parameter(p.coord_proj_b));
  Var kv = nn::mul_cyclic_rows(proj, tape.parameter(p.coord_role));
  Var q = nn::matmul(tape.parameter(p.query), tape.parameter(p.attn_q));
  Var k = nn::matmul(kv, tape.parameter(p.attn_k));
  Var v = nn::matmul(kv, tape.parameter(p.attn_v));
  Var pooled = nn::pooled_attention(q, k, v, 4);
  return nn::linear(pooled, tape.parameter(p.attn_out_w), tape.parameter(p.attn_out_b));
}

template <class P>
Var layout_head_impl(Var hidden, P& p) {
  Tape& tape = *hidden.tape;
  return nn::sigmoid(nn::linear(hidden, tape.parameter(p.weight), tape.parameter(p.bias)));
}

}  // namespace

Var layout_tokens(Tape& tape, LayoutTokenizerParams& params, std::span<const doc::BBox> boxes) {
  return layout_tokens_impl(tape, params, boxes);
}

Var layout_tokens(Tape& tape, const LayoutTokenizerParams& params, std::span<const doc::BBox> boxes) {
  return layout_tokens_impl(tape, params, boxes);
}

std::vector<double> tokenize_layout(const doc::BBox& box, const LayoutTokenizerParams& params) {
  Tape tape(false);
  Var b = layout_tokens(tape, params, std::span<const doc::BBox>(&box, 1));
  const auto v = b.value().values();
  return {v.begin(), v.end()};
}

Var layout_head(Var hidden, LayoutHeadParams& params) { return layout_head_impl(hidden, params); }
Var layout_head(Var hidden, const LayoutHeadParams& params) { return layout_head_impl(hidden, params); }

std::array<double, 4> layout_head(std::span<const double> hidden, const LayoutHeadParams& params) {
  Tape tape(false);
  Var h = tape.constant(Tensor({1, hidden.size()}, std::vector<double>(hidden.begin(), hidden.end())));
  const Tensor& out = layout_head(h, params).value();
  return {out[0], out[1], out[2], out[3]};
}

}  // namespace laytoken::layout
