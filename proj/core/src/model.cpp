// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#include "laytoken/model.hpp"

#include <bit>
#include <cstring>
#include <random>
#include <string>

#include "laytoken/error.hpp"

namespace laytoken::nn {

void ModelConfig::validate() const {
  if (d_model == 0 || n_heads == 0 || d_model % n_heads != 0)
    throw ConfigError("d_model " + std::to_string(d_model) + " is not divisible by n_heads " +
                      std::to_string(n_heads));
  if (head_dim() % 2 != 0)
    throw ConfigError("head dimension " + std::to_string(head_dim()) + " must be even for rotary encoding");
  if (vocab_size == 0 || max_context == 0 || d_ff == 0 || coord_frequencies == 0)
    throw ConfigError("vocab_size, max_context, d_ff and coord_frequencies must be positive");
  if (!(rope_base > 1.0)) throw ConfigError("rope_base must exceed 1");
}

std::size_t parameter_count(const ModelConfig& config) {
  const ModelParams shapes(config);
  std::size_t n = 0;
  for (const auto* p : shapes.parameters()) n += p->value.size();
  return n;
}

BlockParams::BlockParams(const ModelConfig& c, std::size_t i)
    : ln1_gamma("block" + std::to_string(i) + ".ln1.gamma", {c.d_model}),
      ln1_beta("block" + std::to_string(i) + ".ln1.beta", {c.d_model}),
      qkv_w("block" + std::to_string(i) + ".attn.qkv.weight", {c.d_model, 3 * c.d_model}),
      qkv_b("block" + std::to_string(i) + ".attn.qkv.bias", {3 * c.d_model}),
      attn_out_w("block" + std::to_string(i) + ".attn.out.weight", {c.d_model, c.d_model}),
      attn_out_b("block" + std::to_string(i) + ".attn.out.bias", {c.d_model}),
      ln2_gamma("block" + std::to_string(i) + ".ln2.gamma", {c.d_model}),
      ln2_beta("block" + std::to_string(i) + ".ln2.beta", {c.d_model}),
      fc_w("block" + std::to_string(i) + ".mlp.fc.weight", {c.d_model, c.d_ff}),
      fc_b("block" + std::to_string(i) + ".mlp.fc.bias", {c.d_ff}),
      proj_w("block" + std::to_string(i) + ".mlp.proj.weight", {c.d_ff, c.d_model}),
      proj_b("block" + std::to_string(i) + ".mlp.proj.bias", {c.d_model}) {}

std::vector<Parameter*> BlockParams::parameters() {
  return {&ln1_gamma,  &ln1_beta,  &qkv_w,     &qkv_b, &attn_out_w, &attn_out_b,
          &ln2_gamma,  &ln2_beta,  &fc_w,      &fc_b,  &proj_w,     &proj_b};
}

std::vector<const Parameter*> BlockParams::parameters() const {
  return {&ln1_gamma,  &ln1_beta,  &qkv_w,     &qkv_b, &attn_out_w, &attn_out_b,
          &ln2_gamma,  &ln2_beta,  &fc_w,      &fc_b,  &proj_w,     &proj_b};
}

namespace {
const ModelConfig& validated(const ModelConfig& c) {
  c.validate();
  return c;
}
}  // namespace

ModelParams::ModelParams(const ModelConfig& c)
    : config(validated(c)),
      token_embedding("token_embedding", {c.vocab_size, c.d_model}),
      final_ln_gamma("final_ln.gamma", {c.d_model}),
      final_ln_beta("final_ln.beta", {c.d_model}),
      text_head_w("text_head.weight", {c.d_model, c.vocab_size}),
      text_head_b("text_head.bias", {c.vocab_size}),
      layout_tokenizer(c),
      layout_head(c) {
  blocks.reserve(c.n_layers);
  for (std::size_t i = 0; i < c.n_layers; ++i) blocks.emplace_back(c, i);
}

std::vector<Parameter*> ModelParams::parameters() {
  std::vector<Parameter*> out{&token_embedding};
  for (auto& b : blocks)
    for (auto* p : b.parameters()) out.push_back(p);
  for (auto* p : {&final_ln_gamma, &final_ln_beta, &text_head_w, &text_head_b}) out.push_back(p);
  for (auto* p : layout_tokenizer.parameters()) out.push_back(p);
  for (auto* p : layout_head.parameters()) out.push_back(p);
  return out;
}

std::vector<const Parameter*> ModelParams::parameters() const {
  std::vector<const Parameter*> out;
  for (auto* p : const_cast<ModelParams*>(this)->parameters()) out.push_back(p);
  return out;
}

Parameter* ModelParams::find(std::string_view name) {
  for (auto* p : parameters())
    if (p->name == name) return p;
  return nullptr;
}

void ModelParams::zero_grad() {
  for (auto* p : parameters()) p->zero_grad();
}

ModelParams init_params(const ModelConfig& config, std::uint64_t seed) {
  ModelParams params(config);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, config.init_std);
  std::normal_distribution<double> role(0.0, 1.0);
  for (auto* p : params.parameters()) {
    const auto& n = p->name;
    const bool gain = n.ends_with(".gamma");
    const bool bias = n.ends_with(".bias") || n.ends_with(".beta");
    if (gain)
      p->value.fill(1.0);
    else if (n == "layout.coord_role")
      for (auto& v : p->value.values()) v = role(rng);
    else if (!bias)
      for (auto& v : p->value.values()) v = normal(rng);
  }
  return params;
}

namespace {

template <class P>
Var forward_impl(Tape& tape, P& params, const ntlp::InterleavedSequence& seq) {
  const ModelConfig& c = params.config;
  const std::size_t S = seq.size();
  if (S == 0) throw ArgumentError("forward: empty sequence");
  if (S > c.max_context) throw ContextOverflowError(S, c.max_context);

  std::vector<std::size_t> text_ids, text_rows, layout_rows;
  std::vector<doc::BBox> boxes;
  std::vector<std::int64_t> positions;
  positions.reserve(S);
  for (std::size_t i = 0; i < S; ++i) {
    const auto& t = seq.tokens[i];
    if (t.position < 0) throw ArgumentError("forward: negative position id");
    positions.push_back(t.position);
    if (t.kind == ntlp::TokenKind::Layout) {
      layout_rows.push_back(i);
      boxes.push_back(t.box);
    } else {
      if (t.id >= c.vocab_size)
        throw ArgumentError("forward: token id " + std::to_string(t.id) + " outside vocabulary");
      text_rows.push_back(i);
      text_ids.push_back(t.id);
    }
  }

  std::vector<std::pair<Var, std::vector<std::size_t>>> parts;
  if (!text_rows.empty())
    parts.emplace_back(gather_rows(tape.parameter(params.token_embedding), std::move(text_ids)),
                       std::move(text_rows));
  if (!layout_rows.empty())
    parts.emplace_back(layout::layout_tokens(tape, params.layout_tokenizer, boxes), std::move(layout_rows));
  Var x = assemble_rows(parts, S);

  for (auto& b : params.blocks) {
    Var h = layer_norm(x, tape.parameter(b.ln1_gamma), tape.parameter(b.ln1_beta), c.layer_norm_eps);
    Var qkv = linear(h, tape.parameter(b.qkv_w), tape.parameter(b.qkv_b));
    Var att = causal_self_attention(qkv, positions, c.n_heads, c.rope_base);
    x = add(x, linear(att, tape.parameter(b.attn_out_w), tape.parameter(b.attn_out_b)));
    Var h2 = layer_norm(x, tape.parameter(b.ln2_gamma), tape.parameter(b.ln2_beta), c.layer_norm_eps);
    Var m = gelu(linear(h2, tape.parameter(b.fc_w), tape.parameter(b.fc_b)));
    x = add(x, linear(m, tape.parameter(b.proj_w), tape.parameter(b.proj_b)));
  }
  return layer_norm(x, tape.parameter(params.final_ln_gamma), tape.parameter(params.final_ln_beta),
                    c.layer_norm_eps);
}

}  // namespace

Var forward(Tape& tape, ModelParams& params, const ntlp::InterleavedSequence& sequence) {
  return forward_impl(tape, params, sequence);
}

Var forward(Tape& tape, const ModelParams& params, const ntlp::InterleavedSequence& sequence) {
  return forward_impl(tape, params, sequence);
}

Tensor forward(const ModelParams& params, const ntlp::InterleavedSequence& sequence) {
  Tape tape(false);
  return forward(tape, params, sequence).value();
}

Var text_logits(Var hidden, ModelParams& params) {
  Tape& t = *hidden.tape;
  return linear(hidden, t.parameter(params.text_head_w), t.parameter(params.text_head_b));
}

Var text_logits(Var hidden, const ModelParams& params) {
  Tape& t = *hidden.tape;
  return linear(hidden, t.parameter(params.text_head_w), t.parameter(params.text_head_b));
}

std::vector<double> next_token_logits(const ModelParams& params, const ntlp::InterleavedSequence& sequence) {
  Tape tape(false);
  Var hidden = forward(tape, params, sequence);
  Var last = gather_rows(hidden, {sequence.size() - 1});
  const auto v = text_logits(last, params).value().values();
  return {v.begin(), v.end()};
}

std::uint64_t parameter_checksum(const ModelParams& params) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto* p : params.parameters())
    for (double v : p->value.values()) {
      const auto bits = std::bit_cast<std::uint64_t>(v);
      for (int i = 0; i < 8; ++i) {
        h ^= (bits >> (8 * i)) & 0xFFu;
        h *= 1099511628211ULL;
      }
    }
  return h;
}

}  // namespace laytoken::nn
