// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "laytoken/evaluate.hpp"
#include "laytoken/trainer.hpp"

namespace laytoken::train {

/// One configuration of the layout ablation: which of layout tokenizer,
/// shared position ids and interleaved pretraining are switched on.
struct AblationRow {
  std::string label;
  TrainConfig config;

  bool tokenizer() const { return config.use_layout_tokenizer; }
  bool shared_ids() const { return config.scheme == layout::PositionScheme::SharedFirst; }
  bool ntlp() const { return config.use_ntlp; }
};

/// The four cumulative rows on top of `base` (its optimization settings are
/// kept, the switches overwritten):
///   #0 coordinates as text, extra ids
///   #1 + layout tokenizer (extra ids)
///   #2 + shared first-token ids
///   #3 + interleaved text/layout pretraining
std::vector<AblationRow> ablation_rows(const TrainConfig& base);

/// Reference without any layout input.
AblationRow text_only_row(const TrainConfig& base);

struct RowResult {
  AblationRow row;
  std::vector<std::uint64_t> seeds;
  std::vector<double> anls;
  double anls_mean = 0.0;
  /// Filled when a long-context evaluation set is given.
  std::vector<double> long_anls;
  double long_anls_mean = 0.0;
  std::size_t skipped = 0;
};

struct AblationOptions {
  std::vector<std::uint64_t> seeds{1, 2, 3};
  EvalOptions eval;
  /// Called after each (row, seed) run.
  std::function<void(const AblationRow&, std::uint64_t seed, double anls, std::optional<double> long_anls)> on_run;
};

/// Trains every row once per seed on `train_set` and scores it on
/// `eval_set` (and `long_eval_set` when given).
std::vector<RowResult> run_ablation(const std::vector<AblationRow>& rows, const doc::SyntheticCorpus& train_set,
                                    const doc::SyntheticCorpus& eval_set,
                                    const std::optional<doc::SyntheticCorpus>& long_eval_set,
                                    const nn::ModelConfig& model, const AblationOptions& options);

}  // namespace laytoken::train
