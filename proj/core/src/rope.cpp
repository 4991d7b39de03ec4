// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#include "laytoken/rope.hpp"

#include <cmath>
#include <string>

#include "laytoken/error.hpp"

namespace laytoken::nn {

std::vector<double> rope_inverse_frequencies(std::size_t head_dim, double base) {
  if (head_dim == 0 || head_dim % 2 != 0)
    throw ConfigError("rotary encoding needs an even head dimension, got " + std::to_string(head_dim));
  std::vector<double> inv(head_dim / 2);
  for (std::size_t k = 0; k < inv.size(); ++k)
    inv[k] = std::pow(base, -2.0 * static_cast<double>(k) / static_cast<double>(head_dim));
  return inv;
}

void rope_rotate(std::span<double> vec, double position, std::span<const double> inv_freq,
                 bool inverse) {
  const double sign = inverse ? -1.0 : 1.0;
  for (std::size_t k = 0; k < inv_freq.size(); ++k) {
    const double angle = sign * position * inv_freq[k];
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    const double x0 = vec[2 * k];
    const double x1 = vec[2 * k + 1];
    vec[2 * k] = x0 * c - x1 * s;
    vec[2 * k + 1] = x0 * s + x1 * c;
  }
}

Tensor rope_apply(const Tensor& vectors, std::span<const std::int64_t> position_ids, double base) {
  if (position_ids.size() != vectors.rows())
    throw ArgumentError("rope_apply: " + std::to_string(position_ids.size()) + " position ids for " +
                        std::to_string(vectors.rows()) + " vectors");
  const auto inv = rope_inverse_frequencies(vectors.cols(), base);
  Tensor out = vectors;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    if (position_ids[r] < 0) throw ArgumentError("position ids must be non-negative");
    rope_rotate(out.row(r), static_cast<double>(position_ids[r]), inv);
  }
  return out;
}

}  // namespace laytoken::nn
