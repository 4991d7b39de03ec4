// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "laytoken/anls.hpp"
#include "laytoken/model.hpp"
#include "laytoken/sequence.hpp"
#include "laytoken/synthetic.hpp"

namespace laytoken::train {

struct EvalOptions {
  std::size_t max_new_tokens = 32;
  double threshold = kAnlsThreshold;
};

struct QuestionRecord {
  std::size_t doc = 0;
  std::string question;
  std::vector<std::string> golds;
  std::string prediction;
  double anls = 0.0;
};

struct SkippedQuestion {
  std::size_t doc = 0;
  std::string question;
  std::string reason;
};

struct EvalReport {
  double anls_mean = 0.0;
  double exact_match = 0.0;
  std::vector<QuestionRecord> records;
  std::vector<SkippedQuestion> skipped;
};

/// Greedy continuation of `prompt` with text tokens: stops at SEP or any
/// other special id, after `max_new_tokens`, or when the context is full.
/// Returns the generated bytes.
std::string greedy_decode(const nn::ModelParams& params, ntlp::InterleavedSequence prompt,
                          std::size_t max_new_tokens);

/// Answers every QA pair from its document and scores it with ANLS.
/// Questions whose prompt does not fit the context are listed in `skipped`
/// and left out of the means. Parameters are only read.
EvalReport evaluate(const nn::ModelParams& params, const doc::SyntheticCorpus& eval_set,
                    const ntlp::InputEncoding& encoding, const EvalOptions& options = {});

}  // namespace laytoken::train
