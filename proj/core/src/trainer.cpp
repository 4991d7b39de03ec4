// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#include "laytoken/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "laytoken/error.hpp"

namespace laytoken::train {

using layout::PositionScheme;

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    throw ConfigError("learning_rate must be a non-negative number");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (!(mse_weight >= 0.0) || !std::isfinite(mse_weight)) throw ConfigError("mse_weight must be non-negative");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0 && adam.beta2 >= 0.0 && adam.beta2 < 1.0 && adam.epsilon > 0.0))
    throw ConfigError("Adam needs betas in [0, 1) and a positive epsilon");
  if (use_layout_tokenizer && scheme == PositionScheme::TextOnly)
    throw ConfigError("the layout tokenizer needs a scheme that places layout tokens");
  if (!use_layout_tokenizer && scheme == PositionScheme::SharedFirst)
    throw ConfigError("shared-first ids need the layout tokenizer; use extra-ids or text-only");
  if (!use_layout_tokenizer && scheme == PositionScheme::ExtraIds && !serial::is_string_layout(string_format))
    throw ConfigError("string layout needs a format that renders coordinates");
}

ntlp::InputEncoding input_encoding(const TrainConfig& c) {
  c.validate();
  if (!c.use_layout_tokenizer && c.scheme == PositionScheme::ExtraIds)
    return {PositionScheme::ExtraIds, c.string_format};
  return {c.scheme, std::nullopt};
}

std::string_view phase_name(Phase phase) { return phase == Phase::Pretrain ? "pretrain" : "sft"; }

std::vector<ntlp::InterleavedSequence> pretrain_sequences(const doc::SyntheticCorpus& corpus,
                                                          const ntlp::InputEncoding& encoding,
                                                          std::size_t max_context) {
  std::vector<ntlp::InterleavedSequence> out;
  out.reserve(corpus.documents.size());
  for (const auto& d : corpus.documents) out.push_back(ntlp::build_sequence(d, encoding, ntlp::Pretrain{}, max_context));
  return out;
}

std::vector<ntlp::InterleavedSequence> sft_sequences(const doc::SyntheticCorpus& corpus,
                                                     const ntlp::InputEncoding& encoding,
                                                     std::size_t max_context) {
  std::vector<ntlp::InterleavedSequence> out;
  out.reserve(corpus.qa.size());
  for (const auto& q : corpus.qa) {
    if (q.doc >= corpus.documents.size()) throw ArgumentError("QA pair names a missing document");
    out.push_back(ntlp::build_sequence(corpus.documents[q.doc], encoding, ntlp::Sft{q.question, q.answers.front()},
                                       max_context));
  }
  return out;
}

namespace {

void run_phase(nn::ModelParams& params, Adam& adam, const std::vector<ntlp::InterleavedSequence>& data,
               std::size_t epochs, Phase phase, const TrainConfig& config, std::mt19937_64& rng,
               TrainResult& result, const TrainHooks& hooks) {
  if (data.empty()) return;
  std::vector<std::size_t> order(data.size());
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      params.zero_grad();
      StepRecord rec;
      rec.step = result.history.size();
      rec.phase = phase;
      rec.learning_rate = config.learning_rate;
      double total = 0.0;
      for (std::size_t b = start; b < end; ++b) {
        nn::Tape tape(true);
        auto loss = ntlp::ntlp_loss(tape, params, data[order[b]], config.mse_weight);
        if (!std::isfinite(loss.breakdown.total))
          throw NumericError("training diverged: non-finite loss at step " + std::to_string(rec.step));
        tape.backward(loss.total);
        total += loss.breakdown.total;
        rec.loss.ce_sum += loss.breakdown.ce_sum;
        rec.loss.ce_count += loss.breakdown.ce_count;
        rec.loss.mse_sum += loss.breakdown.mse_sum;
        rec.loss.mse_count += loss.breakdown.mse_count;
      }
      const std::size_t n = end - start;
      rec.loss.total = total / static_cast<double>(n);
      if (n > 1)
        for (auto* p : params.parameters())
          for (auto& g : p->grad.values()) g /= static_cast<double>(n);
      adam.step(config.learning_rate);
      result.history.push_back(rec);
      if (hooks.on_step) hooks.on_step(rec);
    }
    if (hooks.on_epoch) hooks.on_epoch(phase, epoch, params);
  }
}

}  // namespace

TrainResult train(nn::ModelParams params, const doc::SyntheticCorpus& corpus, const TrainConfig& config,
                  const TrainHooks& hooks) {
  const auto encoding = input_encoding(config);
  if (corpus.documents.empty()) throw ArgumentError("training corpus is empty");
  const std::size_t ctx = params.config.max_context;
  std::vector<ntlp::InterleavedSequence> pre;
  if (config.use_ntlp && config.pretrain_epochs > 0) pre = pretrain_sequences(corpus, encoding, ctx);
  const auto sft = sft_sequences(corpus, encoding, ctx);

  TrainResult result{std::move(params), {}};
  Adam adam(result.params.parameters(), config.adam);
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  run_phase(result.params, adam, pre, config.pretrain_epochs, Phase::Pretrain, config, rng, result, hooks);
  run_phase(result.params, adam, sft, config.epochs, Phase::Sft, config, rng, result, hooks);
  return result;
}

TrainResult train(const doc::SyntheticCorpus& corpus, const nn::ModelConfig& model, const TrainConfig& config,
                  const TrainHooks& hooks) {
  config.validate();
  return train(nn::init_params(model, config.seed), corpus, config, hooks);
}

}  // namespace laytoken::train
