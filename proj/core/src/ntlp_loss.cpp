// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#include "laytoken/ntlp_loss.hpp"

#include <string>
#include <vector>

#include "laytoken/error.hpp"
#include "laytoken/layout_tokenizer.hpp"

namespace laytoken::ntlp {

using nn::Tape;
using nn::Tensor;
using nn::Var;

namespace {

struct Targets {
  std::vector<std::size_t> text_src, text_ids, layout_src;
  Tensor boxes;
};

Targets split_targets(const InterleavedSequence& seq) {
  if (seq.size() < 2) throw ArgumentError("loss needs at least two tokens, got " + std::to_string(seq.size()));
  Targets t;
  std::vector<double> boxes;
  for (std::size_t i = 1; i < seq.size(); ++i) {
    const auto& tok = seq.tokens[i];
    if (!tok.supervise) continue;
    if (tok.kind == TokenKind::Text) {
      t.text_src.push_back(i - 1);
      t.text_ids.push_back(tok.id);
    } else {
      t.layout_src.push_back(i - 1);
      for (double c : tok.box.coords()) boxes.push_back(c);
    }
  }
  if (t.text_src.empty() && t.layout_src.empty()) throw ArgumentError("sequence has no supervised targets");
  t.boxes = Tensor({t.layout_src.size(), 4}, std::move(boxes));
  return t;
}

template <class P>
LossGraph loss_impl(Tape& tape, P& params, const InterleavedSequence& seq, double w) {
  Targets t = split_targets(seq);
  Var hidden = nn::forward(tape, params, seq);
  Var logits, pred;
  if (!t.text_src.empty()) logits = nn::text_logits(nn::gather_rows(hidden, t.text_src), params);
  if (!t.layout_src.empty()) pred = layout::layout_head(nn::gather_rows(hidden, t.layout_src), params.layout_head);
  return combine_targets(seq, t.text_src.empty() ? nullptr : &logits, t.layout_src.empty() ? nullptr : &pred, w);
}

}  // namespace

LossGraph combine_targets(const InterleavedSequence& seq, Var* text_logits, Var* layout_pred, double w) {
  Targets t = split_targets(seq);
  if ((text_logits == nullptr) != t.text_src.empty() || (layout_pred == nullptr) != t.layout_src.empty())
    throw ArgumentError("head outputs do not match the supervised targets");
  Tape& tape = text_logits ? *text_logits->tape : *layout_pred->tape;

  LossBreakdown b;
  b.ce_count = t.text_src.size();
  b.mse_count = t.layout_src.size();
  std::vector<std::size_t> parts;
  if (text_logits) {
    if (text_logits->value().rows() != b.ce_count) throw ArgumentError("text logits row count mismatch");
    Var ce = nn::cross_entropy_sum(*text_logits, t.text_ids);
    b.ce_sum = ce.scalar();
    parts.push_back(ce.index);
  }
  if (layout_pred) {
    if (layout_pred->value().rows() != b.mse_count) throw ArgumentError("layout prediction row count mismatch");
    Var mse = nn::mse_sum(*layout_pred, t.boxes);
    b.mse_sum = mse.scalar();
    parts.push_back(mse.index);
  }
  const auto n = static_cast<double>(b.target_count());
  b.total = (b.ce_sum + w * b.mse_sum) / n;

  bool grad = false;
  for (auto p : parts) grad = grad || tape.requires_grad(p);
  const bool has_ce = text_logits != nullptr;
  Var total = tape.push(Tensor({1}, std::vector<double>{b.total}), grad,
                        [parts, has_ce, w, n](Tape& tp, std::size_t self) {
                          const double g = tp.grad(self)[0];
                          for (std::size_t k = 0; k < parts.size(); ++k) {
                            const bool is_ce = has_ce && k == 0;
                            if (tp.requires_grad(parts[k])) tp.grad(parts[k])[0] += (is_ce ? 1.0 : w) * g / n;
                          }
                        });
  return {total, b};
}

LossGraph ntlp_loss(Tape& tape, nn::ModelParams& params, const InterleavedSequence& seq, double w) {
  return loss_impl(tape, params, seq, w);
}

LossGraph ntlp_loss(Tape& tape, const nn::ModelParams& params, const InterleavedSequence& seq, double w) {
  return loss_impl(tape, params, seq, w);
}

LossBreakdown ntlp_loss(const nn::ModelParams& params, const InterleavedSequence& seq, double w) {
  Tape tape(false);
  return ntlp_loss(tape, params, seq, w).breakdown;
}

}  // namespace laytoken::ntlp
