// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "laytoken/autograd.hpp"
#include "laytoken/layout_tokenizer.hpp"
#include "laytoken/model_config.hpp"
#include "laytoken/sequence.hpp"

namespace laytoken::nn {

/// Pre-norm transformer block: x += Attn(LN(x)); x += MLP(LN(x)).
struct BlockParams {
  Parameter ln1_gamma, ln1_beta;
  Parameter qkv_w, qkv_b;
  Parameter attn_out_w, attn_out_b;
  Parameter ln2_gamma, ln2_beta;
  Parameter fc_w, fc_b;
  Parameter proj_w, proj_b;

  BlockParams(const ModelConfig& config, std::size_t index);
  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
};

/// Every learnable tensor of the model: text embedding, decoder blocks,
/// final norm, text head, layout tokenizer and layout head.
struct ModelParams {
  ModelConfig config;
  Parameter token_embedding;  // [vocab x d]
  std::vector<BlockParams> blocks;
  Parameter final_ln_gamma, final_ln_beta;
  Parameter text_head_w, text_head_b;  // [d x vocab], [vocab]
  layout::LayoutTokenizerParams layout_tokenizer;
  layout::LayoutHeadParams layout_head;

  /// All-zero tensors of the right shapes. Validates the config.
  explicit ModelParams(const ModelConfig& config);

  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
  /// nullptr when no parameter has that name.
  Parameter* find(std::string_view name);
  void zero_grad();
};

/// Weights ~ normal(0, init_std), biases zero, norm gains one; fixed by seed.
ModelParams init_params(const ModelConfig& config, std::uint64_t seed);

/// Hidden states ([S x d], after the final norm) for every token. Throws
/// ContextOverflowError for sequences longer than max_context.
Var forward(Tape& tape, ModelParams& params, const ntlp::InterleavedSequence& sequence);
Var forward(Tape& tape, const ModelParams& params, const ntlp::InterleavedSequence& sequence);
Tensor forward(const ModelParams& params, const ntlp::InterleavedSequence& sequence);

/// f_text: hidden rows -> vocabulary logits.
Var text_logits(Var hidden, ModelParams& params);
Var text_logits(Var hidden, const ModelParams& params);

/// Logits predicting the token after the last one in `sequence`.
std::vector<double> next_token_logits(const ModelParams& params,
                                      const ntlp::InterleavedSequence& sequence);

/// Order-sensitive FNV-1a hash of every parameter value, for read-only checks.
std::uint64_t parameter_checksum(const ModelParams& params);

}  // namespace laytoken::nn
