// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "laytoken/tensor.hpp"

namespace laytoken::train {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  bool operator==(const AdamConfig&) const = default;
};

/// Adam with bias correction. Reads each Parameter's grad and updates its
/// value in place; moment buffers are owned here.
class Adam {
 public:
  Adam(std::vector<nn::Parameter*> params, AdamConfig config = {});

  void step(double learning_rate);
  std::size_t steps() const { return t_; }

 private:
  std::vector<nn::Parameter*> params_;
  std::vector<nn::Tensor> m_, v_;
  AdamConfig config_;
  std::size_t t_ = 0;
};

}  // namespace laytoken::train
