// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#include "laytoken/ablation.hpp"

#include <numeric>

#include "laytoken/error.hpp"

namespace laytoken::train {

using layout::PositionScheme;

namespace {

AblationRow make_row(std::string label, TrainConfig c, bool tokenizer, PositionScheme scheme, bool ntlp) {
  c.use_layout_tokenizer = tokenizer;
  c.scheme = scheme;
  c.use_ntlp = ntlp;
  c.validate();
  return {std::move(label), c};
}

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

std::vector<AblationRow> ablation_rows(const TrainConfig& base) {
  return {make_row("#0", base, false, PositionScheme::ExtraIds, false),
          make_row("#1", base, true, PositionScheme::ExtraIds, false),
          make_row("#2", base, true, PositionScheme::SharedFirst, false),
          make_row("#3", base, true, PositionScheme::SharedFirst, true)};
}

AblationRow text_only_row(const TrainConfig& base) {
  return make_row("text-only", base, false, PositionScheme::TextOnly, false);
}

std::vector<RowResult> run_ablation(const std::vector<AblationRow>& rows, const doc::SyntheticCorpus& train_set,
                                    const doc::SyntheticCorpus& eval_set,
                                    const std::optional<doc::SyntheticCorpus>& long_eval_set,
                                    const nn::ModelConfig& model, const AblationOptions& options) {
  if (options.seeds.empty()) throw ArgumentError("ablation needs at least one seed");
  std::vector<RowResult> results;
  for (const auto& row : rows) {
    RowResult r{row, options.seeds, {}, 0.0, {}, 0.0, 0};
    const auto encoding = input_encoding(row.config);
    for (auto seed : options.seeds) {
      TrainConfig c = row.config;
      c.seed = seed;
      const auto trained = train(train_set, model, c);
      const auto report = evaluate(trained.params, eval_set, encoding, options.eval);
      r.anls.push_back(report.anls_mean);
      r.skipped += report.skipped.size();
      std::optional<double> long_score;
      if (long_eval_set) {
        const auto long_report = evaluate(trained.params, *long_eval_set, encoding, options.eval);
        r.long_anls.push_back(long_report.anls_mean);
        r.skipped += long_report.skipped.size();
        long_score = long_report.anls_mean;
      }
      if (options.on_run) options.on_run(row, seed, report.anls_mean, long_score);
    }
    r.anls_mean = mean(r.anls);
    r.long_anls_mean = mean(r.long_anls);
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace laytoken::train
