// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "laytoken/error.hpp"
#include "laytoken/synthetic.hpp"

using namespace laytoken;
using namespace laytoken::doc;

namespace {

std::string key_of(const std::string& question) {
  // "value of <key>?"
  return question.substr(9, question.size() - 10);
}

bool right_of(const PixelBox& k, const PixelBox& v) {
  return v.x1 == k.x2 + kSyntheticPairGap && v.y1 == k.y1;
}

bool below(const PixelBox& k, const PixelBox& v) {
  return v.y1 == k.y2 + kSyntheticPairGap && v.x1 == k.x1;
}

std::string corpus_bytes(const SyntheticCorpus& c) {
  std::string s;
  for (const auto& d : c.documents) s += serialize_document(d) + "\n";
  for (const auto& q : c.qa) s += std::to_string(q.doc) + q.question + q.answers.front() + "\n";
  return s;
}

// The value that follows the first occurrence of the key in reading order.
std::string text_order_guess(const Document& d, const std::string& key) {
  const auto segs = d.segments();
  for (std::size_t i = 0; i + 1 < segs.size(); ++i)
    if (segs[i]->text == key) return segs[i + 1]->text;
  return {};
}

}  // namespace

TEST_SUITE("synthetic") {
  TEST_CASE("identical specs give identical corpora") {
    SyntheticSpec spec;
    spec.n_documents = 1;
    spec.keys_per_doc = {2, 2};
    spec.segments_per_doc = {10, 10};
    spec.seed = 7;
    const auto a = generate_synthetic_corpus(spec);
    const auto b = generate_synthetic_corpus(spec);
    CHECK(a.qa.size() == 2);
    CHECK(corpus_bytes(a) == corpus_bytes(b));
    spec.seed = 8;
    CHECK(corpus_bytes(generate_synthetic_corpus(spec)) != corpus_bytes(a));
  }

  TEST_CASE("fixed segment count is honored") {
    SyntheticSpec spec;
    spec.n_documents = 50;
    spec.segments_per_doc = {6, 6};
    for (const auto& d : generate_synthetic_corpus(spec).documents) CHECK(d.segment_count() == 6);
  }

  TEST_CASE("every answer has exactly one matching segment, adjacent to a key with the question text") {
    SyntheticSpec spec;
    spec.n_documents = 200;
    spec.keys_per_doc = {1, 3};
    spec.segments_per_doc = {12, 40};
    spec.seed = 3;
    const auto c = generate_synthetic_corpus(spec);
    for (const auto& q : c.qa) {
      const auto segs = c.documents[q.doc].segments();
      const std::string& gold = q.answers.front();
      const auto n = std::count_if(segs.begin(), segs.end(), [&](const TextSegment* s) { return s->text == gold; });
      REQUIRE(n == 1);
      // The gold value touches a key segment with the asked text on the same page.
      bool adjacent = false;
      for (const auto& page : c.documents[q.doc].pages) {
        const TextSegment* value = nullptr;
        for (const auto& s : page.segments)
          if (s.text == gold) value = &s;
        if (!value) continue;
        for (const auto& s : page.segments)
          if (s.text == key_of(q.question) && (right_of(s.pixel_box, value->pixel_box) || below(s.pixel_box, value->pixel_box)))
            adjacent = true;
      }
      CHECK(adjacent);
    }
  }

  TEST_CASE("distractor rate 1 defeats a text-order matcher, rate 0 does not") {
    SyntheticSpec spec;
    spec.n_documents = 300;
    spec.seed = 21;
    spec.distractor_rate = 1.0;
    auto c = generate_synthetic_corpus(spec);
    std::size_t hits = 0;
    for (const auto& q : c.qa) {
      const auto& d = c.documents[q.doc];
      const auto key = key_of(q.question);
      const auto segs = d.segments();
      CHECK(std::count_if(segs.begin(), segs.end(), [&](const TextSegment* s) { return s->text == key; }) == 2);
      hits += text_order_guess(d, key) == q.answers.front() ? 1 : 0;
    }
    CHECK(hits < c.qa.size());
    CHECK(hits > 0);

    spec.distractor_rate = 0.0;
    c = generate_synthetic_corpus(spec);
    hits = 0;
    for (const auto& q : c.qa) hits += text_order_guess(c.documents[q.doc], key_of(q.question)) == q.answers.front();
    CHECK(hits == c.qa.size());
  }

  TEST_CASE("long documents span several pages") {
    SyntheticSpec spec;
    spec.n_documents = 5;
    spec.segments_per_doc = {60, 60};
    const auto c = generate_synthetic_corpus(spec);
    for (const auto& d : c.documents) {
      CHECK(d.pages.size() >= 3);
      CHECK(d.segment_count() == 60);
    }
  }

  TEST_CASE("invalid specs are configuration errors") {
    SyntheticSpec spec;
    spec.n_documents = 0;
    CHECK_THROWS_AS(generate_synthetic_corpus(spec), ConfigError);
    spec = {};
    spec.distractor_rate = 1.5;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec = {};
    spec.segments_per_doc = {3, 3};
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec = {};
    spec.keys_per_doc = {2, 1};
    CHECK_THROWS_AS(spec.validate(), ConfigError);
  }

  TEST_CASE("written corpora re-ingest with their QA sidecar") {
    SyntheticSpec spec;
    spec.n_documents = 12;
    spec.keys_per_doc = {1, 2};
    spec.segments_per_doc = {8, 12};
    const auto c = generate_synthetic_corpus(spec);
    const auto dir = std::filesystem::temp_directory_path() / "laytoken_synthetic_test";
    write_corpus(c, dir.string());
    const auto back = load_labeled_corpus((dir / "corpus.jsonl").string(), (dir / "qa.json").string());
    CHECK(corpus_bytes(back) == corpus_bytes(c));
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("QA entries must point at existing documents") {
    const auto dir = std::filesystem::temp_directory_path() / "laytoken_synthetic_bad_qa";
    SyntheticSpec spec;
    spec.n_documents = 1;
    write_corpus(generate_synthetic_corpus(spec), dir.string());
    {
      std::ofstream out(dir / "qa.json");
      out << R"({"qa":[{"doc":4,"question":"value of x?","answers":["y"]}]})";
    }
    CHECK_THROWS_AS(load_labeled_corpus((dir / "corpus.jsonl").string(), (dir / "qa.json").string()),
                    ValidationError);
    std::filesystem::remove_all(dir);
  }
}
