// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

namespace laytoken::nn {

/// Architecture hyperparameters of the micro-transformer. Layout tokens and
/// text embeddings share the model width `d_model`.
struct ModelConfig {
  std::size_t d_model = 64;
  std::size_t n_heads = 4;
  std::size_t n_layers = 2;
  std::size_t vocab_size = 260;
  std::size_t max_context = 512;
  double rope_base = 10000.0;
  std::size_t d_ff = 256;
  /// Sinusoidal frequency pairs used to featurize each box coordinate.
  std::size_t coord_frequencies = 16;
  double layer_norm_eps = 1e-12;
  double init_std = 0.02;

  std::size_t head_dim() const { return d_model / n_heads; }

  /// Throws ConfigError unless d_model splits evenly into heads of even width.
  void validate() const;

  bool operator==(const ModelConfig&) const = default;
};

/// Number of learnable scalars for a model built from `config`.
std::size_t parameter_count(const ModelConfig& config);

}  // namespace laytoken::nn
