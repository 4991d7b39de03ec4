// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <span>
#include <vector>

#include "laytoken/autograd.hpp"
#include "laytoken/doc_model.hpp"
#include "laytoken/model_config.hpp"

namespace laytoken::layout {

/// Learnable state of the box -> single-token compressor.
///
/// Each of the four coordinates is featurized independently as
/// [sin(w_k c), cos(w_k c)] for w_k = pi * 2^(k/4), projected by a shared
/// linear map and scaled elementwise by a learned coordinate-role embedding
/// (x1, y1, x2, y2). An additive role tag would leave the pooled token a
/// symmetric sum in which x and y cannot be told apart. The resulting four rows are the keys/values of a single-head
/// attention whose only query is the learned vector `query`; the attended
/// row, projected once more, is the layout token.
struct LayoutTokenizerParams {
  nn::Parameter query;         // [1 x d]
  nn::Parameter coord_proj_w;  // [2F x d]
  nn::Parameter coord_proj_b;  // [d]
  nn::Parameter coord_role;    // [4 x d], gains initialized normal(0, 1)
  nn::Parameter attn_q;        // [d x d]
  nn::Parameter attn_k;        // [d x d]
  nn::Parameter attn_v;        // [d x d]
  nn::Parameter attn_out_w;    // [d x d]
  nn::Parameter attn_out_b;    // [d]

  explicit LayoutTokenizerParams(const nn::ModelConfig& config = {});
  std::vector<nn::Parameter*> parameters();
  std::vector<const nn::Parameter*> parameters() const;
};

/// Maps a hidden state to four coordinates in (0, 1): sigmoid(h W + b).
struct LayoutHeadParams {
  nn::Parameter weight;  // [d x 4]
  nn::Parameter bias;    // [4]

  explicit LayoutHeadParams(const nn::ModelConfig& config = {});
  std::vector<nn::Parameter*> parameters();
  std::vector<const nn::Parameter*> parameters() const;
};

/// Allowed slack outside [0, 1] before a coordinate is rejected.
inline constexpr double kCoordinateSlack = 1e-6;

/// [4n x 2F] sinusoidal features, one row per (box, coordinate role).
/// Throws DomainError for coordinates outside [0, 1] beyond the slack.
nn::Tensor coordinate_features(std::span<const doc::BBox> boxes, std::size_t frequencies);

/// Layout tokens for `boxes` as one [n x d] graph value.
nn::Var layout_tokens(nn::Tape& tape, LayoutTokenizerParams& params,
                      std::span<const doc::BBox> boxes);
nn::Var layout_tokens(nn::Tape& tape, const LayoutTokenizerParams& params,
                      std::span<const doc::BBox> boxes);

/// Layout token of a single box.
std::vector<double> tokenize_layout(const doc::BBox& box, const LayoutTokenizerParams& params);

nn::Var layout_head(nn::Var hidden, LayoutHeadParams& params);
nn::Var layout_head(nn::Var hidden, const LayoutHeadParams& params);
std::array<double, 4> layout_head(std::span<const double> hidden, const LayoutHeadParams& params);

}  // namespace laytoken::layout
