// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "laytoken/tensor.hpp"

namespace laytoken::nn {

/// Inverse frequencies base^(-2k/head_dim) for k = 0 .. head_dim/2 - 1.
/// Throws ConfigError for an odd or zero head dimension.
std::vector<double> rope_inverse_frequencies(std::size_t head_dim, double base);

/// Rotates coordinate pairs (2k, 2k+1) of `vec` in place by the angle
/// position * inv_freq[k]; `inverse` rotates by the negated angle.
void rope_rotate(std::span<double> vec, double position, std::span<const double> inv_freq,
                 bool inverse = false);

/// Applies the rotary encoding to each row of `vectors` ([n x head_dim])
/// using its position id. Ids may repeat and need not be monotone.
Tensor rope_apply(const Tensor& vectors, std::span<const std::int64_t> position_ids,
                  double base = 10000.0);

}  // namespace laytoken::nn
