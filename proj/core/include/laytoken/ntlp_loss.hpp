// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

#include "laytoken/autograd.hpp"
#include "laytoken/model.hpp"
#include "laytoken/sequence.hpp"

namespace laytoken::ntlp {

/// Aggregates of one sequence's next-token objective.
struct LossBreakdown {
  double total = 0.0;
  double ce_sum = 0.0;
  std::size_t ce_count = 0;
  double mse_sum = 0.0;
  std::size_t mse_count = 0;

  std::size_t target_count() const { return ce_count + mse_count; }
};

struct LossGraph {
  nn::Var total;
  LossBreakdown breakdown;
};

/// Next interleaved text/layout prediction. Hidden state i-1 predicts token
/// i for every supervised i >= 1: cross-entropy of the text head for text
/// targets, coordinate MSE (mean over the four values) of the layout head for
/// layout targets. total = (ce_sum + mse_weight * mse_sum) / (ce_count + mse_count).
///
/// Throws ArgumentError for sequences shorter than two tokens or without any
/// supervised target.
LossGraph ntlp_loss(nn::Tape& tape, nn::ModelParams& params, const InterleavedSequence& sequence,
                    double mse_weight = 1.0);
LossGraph ntlp_loss(nn::Tape& tape, const nn::ModelParams& params, const InterleavedSequence& sequence,
                    double mse_weight = 1.0);
/// Value only; no gradient bookkeeping.
LossBreakdown ntlp_loss(const nn::ModelParams& params, const InterleavedSequence& sequence,
                        double mse_weight = 1.0);

/// Same objective over already computed head outputs: `text_logits` holds one
/// row per text target and `layout_pred` one row per layout target, both in
/// sequence order. Used by the model path above and by hand-built checks.
LossGraph combine_targets(const InterleavedSequence& sequence, nn::Var* text_logits, nn::Var* layout_pred,
                          double mse_weight);

}  // namespace laytoken::ntlp
