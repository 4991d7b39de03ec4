// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#include "laytoken/evaluate.hpp"

#include <algorithm>

#include "laytoken/error.hpp"

namespace laytoken::train {

std::string greedy_decode(const nn::ModelParams& params, ntlp::InterleavedSequence seq,
                          std::size_t max_new_tokens) {
  std::string out;
  std::int64_t next = seq.max_position() + 1;
  for (std::size_t n = 0; n < max_new_tokens && seq.size() < params.config.max_context; ++n) {
    const auto logits = next_token_logits(params, seq);
    const auto best = static_cast<serial::TokenId>(std::max_element(logits.begin(), logits.end()) - logits.begin());
    if (best >= serial::kPad) break;
    out.push_back(static_cast<char>(best));
    seq.tokens.push_back(ntlp::TypedToken::text(best, next++));
  }
  return out;
}

EvalReport evaluate(const nn::ModelParams& params, const doc::SyntheticCorpus& eval_set,
                    const ntlp::InputEncoding& encoding, const EvalOptions& options) {
  EvalReport report;
  double anls_sum = 0.0, exact = 0.0;
  for (const auto& q : eval_set.qa) {
    if (q.doc >= eval_set.documents.size()) throw ArgumentError("QA pair names a missing document");
    if (q.answers.empty()) throw ArgumentError("evaluation question without gold answers");
    ntlp::InterleavedSequence prompt;
    try {
      prompt = ntlp::build_sequence(eval_set.documents[q.doc], encoding, ntlp::Sft{q.question, std::nullopt},
                                    params.config.max_context);
    } catch (const ContextOverflowError& e) {
      report.skipped.push_back({q.doc, q.question, e.what()});
      continue;
    }
    QuestionRecord rec{q.doc, q.question, q.answers, greedy_decode(params, std::move(prompt), options.max_new_tokens),
                       0.0};
    rec.anls = anls(rec.prediction, rec.golds, options.threshold);
    const auto norm = normalize_answer(rec.prediction);
    if (std::any_of(rec.golds.begin(), rec.golds.end(), [&](const std::string& g) { return normalize_answer(g) == norm; }))
      exact += 1.0;
    anls_sum += rec.anls;
    report.records.push_back(std::move(rec));
  }
  if (!report.records.empty()) {
    report.anls_mean = anls_sum / static_cast<double>(report.records.size());
    report.exact_match = exact / static_cast<double>(report.records.size());
  }
  return report;
}

}  // namespace laytoken::train
