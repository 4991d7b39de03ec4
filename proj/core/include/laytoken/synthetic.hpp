// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "laytoken/doc_model.hpp"

namespace laytoken::doc {

struct CountRange {
  std::size_t min = 0;
  std::size_t max = 0;
};

/// Key-value documents whose pairing is only recoverable from geometry.
///
/// Every key has a value segment placed right of it (same top edge) or below
/// it (same left edge) with a fixed 10 px gap. With probability
/// `distractor_rate` a key also gets a decoy: a second segment with the same
/// key text followed in the stream by a different value that is not adjacent
/// to it. Stream order shuffles units (a key with its value candidate, or a
/// filler), so the value that follows a key in the text is not evidence.
/// Documents that need more than one page's worth of cells span several
/// 1000 x 1000 pages.
struct SyntheticSpec {
  std::size_t n_documents = 200;
  CountRange segments_per_doc{6, 6};
  CountRange keys_per_doc{1, 1};
  std::uint64_t seed = 0;
  double distractor_rate = 1.0;

  /// Throws ConfigError for empty ranges, rates outside [0, 1] or segment
  /// counts too small to hold the keys, their values and decoys.
  void validate() const;
};

struct QaPair {
  std::size_t doc = 0;
  std::string question;
  std::vector<std::string> answers;
};

struct SyntheticCorpus {
  std::vector<Document> documents;
  std::vector<QaPair> qa;
};

inline constexpr std::int64_t kSyntheticPageSize = 1000;
inline constexpr std::int64_t kSyntheticPairGap = 10;

std::string question_for_key(const std::string& key);

SyntheticCorpus generate_synthetic_corpus(const SyntheticSpec& spec);

/// Writes `corpus.jsonl` (one OCR document per line) and `qa.json`
/// ({"qa":[{"doc","question","answers"}]}) into `directory`.
void write_corpus(const SyntheticCorpus& corpus, const std::string& directory);

/// Reads a QA sidecar. Throws IoError, ParseError or ValidationError.
std::vector<QaPair> load_qa(const std::string& path);

/// Documents from `corpus_path` plus the sidecar; every QA document index is
/// checked against the corpus.
SyntheticCorpus load_labeled_corpus(const std::string& corpus_path, const std::string& qa_path);

}  // namespace laytoken::doc
