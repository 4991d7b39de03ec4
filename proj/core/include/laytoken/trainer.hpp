// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "laytoken/adam.hpp"
#include "laytoken/model.hpp"
#include "laytoken/ntlp_loss.hpp"
#include "laytoken/positions.hpp"
#include "laytoken/sequence.hpp"
#include "laytoken/serial_formats.hpp"
#include "laytoken/synthetic.hpp"

namespace laytoken::train {

/// Optimization settings plus the three ablation switches. The switches map
/// onto inputs as follows:
///   tokenizer on,  scheme extra-ids / shared-first -> layout tokens
///   tokenizer off, scheme extra-ids                -> coordinates spelled out
///                                                     in `string_format`
///   tokenizer off, scheme text-only                -> text only
/// use_ntlp adds `pretrain_epochs` of whole-document next-token training
/// (text and layout targets) before question-answer fine-tuning.
struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 1;
  std::size_t epochs = 3;
  std::uint64_t seed = 0;
  AdamConfig adam;
  double mse_weight = 1.0;
  layout::PositionScheme scheme = layout::PositionScheme::SharedFirst;
  bool use_layout_tokenizer = true;
  bool use_ntlp = true;
  std::size_t pretrain_epochs = 1;
  serial::SerializationFormat string_format = serial::SerializationFormat::CoordSuffix;

  /// Throws ConfigError for inconsistent switches or invalid numbers.
  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

ntlp::InputEncoding input_encoding(const TrainConfig& config);

enum class Phase { Pretrain, Sft };
std::string_view phase_name(Phase phase);

struct StepRecord {
  std::size_t step = 0;
  Phase phase = Phase::Sft;
  /// Sums over the batch; `total` is the batch mean of per-sequence totals.
  ntlp::LossBreakdown loss;
  double learning_rate = 0.0;
};

struct TrainResult {
  nn::ModelParams params;
  std::vector<StepRecord> history;
};

struct TrainHooks {
  std::function<void(const StepRecord&)> on_step;
  /// Called after every epoch with the current parameters.
  std::function<void(Phase, std::size_t epoch, const nn::ModelParams&)> on_epoch;
};

/// Builds the training sequences of each phase. Throws ContextOverflowError
/// when any of them exceeds max_context.
std::vector<ntlp::InterleavedSequence> pretrain_sequences(const doc::SyntheticCorpus& corpus,
                                                          const ntlp::InputEncoding& encoding,
                                                          std::size_t max_context);
std::vector<ntlp::InterleavedSequence> sft_sequences(const doc::SyntheticCorpus& corpus,
                                                     const ntlp::InputEncoding& encoding,
                                                     std::size_t max_context);

/// Deterministic training from a seeded initialization: fixed per-epoch
/// shuffles, batch gradients summed in batch order. Throws NumericError
/// naming the step when a loss is not finite.
TrainResult train(const doc::SyntheticCorpus& corpus, const nn::ModelConfig& model, const TrainConfig& config,
                  const TrainHooks& hooks = {});

/// Continues from given parameters (same rules as above).
TrainResult train(nn::ModelParams params, const doc::SyntheticCorpus& corpus, const TrainConfig& config,
                  const TrainHooks& hooks = {});

}  // namespace laytoken::train
