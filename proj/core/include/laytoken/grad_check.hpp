// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "laytoken/autograd.hpp"

namespace laytoken::nn {

/// Builds a scalar loss on `tape` from the current parameter values. Must be
/// deterministic; it is called once recording and twice per probe without.
using LossBuilder = std::function<Var(Tape&)>;

struct GradCheckOptions {
  std::size_t n_probes = 50;
  double epsilon = 1e-5;
  std::uint64_t seed = 0;
};

struct ProbeResult {
  std::string parameter;
  std::size_t index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_error = 0.0;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::vector<ProbeResult> probes;
  std::vector<std::string> warnings;
};

/// |a - n| / max(|a|, |n|); zero when both are exactly zero.
double relative_error(double analytic, double numeric);

/// Compares reverse-mode gradients with central differences
/// (L(θ+ε) - L(θ-ε)) / 2ε on `n_probes` scalar entries. Probes rotate over the
/// parameter tensors so every tensor is visited, and within a tensor pick a
/// random entry with a non-zero analytic gradient when one exists.
///
/// Parameter values are restored afterwards; their grad buffers are left
/// holding the analytic gradient. Throws ArgumentError for epsilon outside
/// [1e-7, 1e-3] and NumericError when the loss is not finite.
GradCheckReport grad_check(const LossBuilder& loss, std::span<Parameter* const> params,
                           const GradCheckOptions& options = {});

}  // namespace laytoken::nn
