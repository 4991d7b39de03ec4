// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#include "laytoken/synthetic.hpp"

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string_view>

#include <nlohmann/json.hpp>

#include "laytoken/error.hpp"

namespace laytoken::doc {

namespace {

using json = nlohmann::json;

constexpr std::array<std::string_view, 12> kKeys = {"name", "date", "total", "phone", "city", "tax",
                                                   "amount", "due", "ref", "email", "code", "zip"};
// Distinct first letters keep every wrong value below the ANLS threshold.
constexpr std::array<std::string_view, 8> kValues = {"apple", "bravo", "cedar", "delta",
                                                     "ember", "flint", "grove", "haven"};
constexpr std::array<std::string_view, 8> kFillers = {"page", "note", "form", "copy",
                                                      "draft", "sign", "stamp", "memo"};

constexpr std::size_t kGridCols = 4;
constexpr std::size_t kGridRows = 10;
constexpr std::int64_t kCellWidth = 250;
constexpr std::int64_t kCellHeight = 100;
constexpr std::int64_t kCharWidth = 12;
constexpr std::int64_t kLineHeight = 30;
// Cells filled per page at most, so random placement always finds room.
constexpr std::size_t kCellsPerPage = 24;
constexpr std::size_t kMaxKeys = kValues.size() / 2;

enum class Shape { Right, Below, Single };

struct Item {
  std::string text;
  Shape shape = Shape::Single;
  std::size_t partner = 0;  // for Right/Below values: index of the key item
};

struct Unit {
  std::vector<std::size_t> items;
  std::size_t cells = 0;
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }
  std::size_t between(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
  }
  bool chance(double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_) < p; }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

template <std::size_t N>
std::vector<std::string_view> sample(const std::array<std::string_view, N>& pool, std::size_t k, Rng& rng) {
  std::vector<std::string_view> all(pool.begin(), pool.end());
  for (std::size_t i = 0; i < k; ++i) std::swap(all[i], all[i + rng.below(all.size() - i)]);
  all.resize(k);
  return all;
}

struct Grid {
  std::array<std::array<bool, kGridCols>, kGridRows> used{};

  bool free(std::size_t r, std::size_t c) const { return r < kGridRows && c < kGridCols && !used[r][c]; }

  // Returns the top-left cell of a free block for the shape.
  std::pair<std::size_t, std::size_t> take(Shape shape, Rng& rng) {
    const std::size_t dr = shape == Shape::Below ? 1 : 0;
    const std::size_t dc = shape == Shape::Right ? 1 : 0;
    auto fits = [&](std::size_t r, std::size_t c) { return free(r, c) && free(r + dr, c + dc); };
    for (int attempt = 0; attempt < 200; ++attempt) {
      const std::size_t r = rng.below(kGridRows - dr), c = rng.below(kGridCols - dc);
      if (fits(r, c)) return claim(r, c, dr, dc);
    }
    for (std::size_t r = 0; r + dr < kGridRows; ++r)
      for (std::size_t c = 0; c + dc < kGridCols; ++c)
        if (fits(r, c)) return claim(r, c, dr, dc);
    throw DomainError("synthetic page has no free block");
  }

  // A free single cell sharing neither row nor column with `apart`, when one exists.
  std::pair<std::size_t, std::size_t> take_apart(std::pair<std::size_t, std::size_t> apart, Rng& rng) {
    std::vector<std::pair<std::size_t, std::size_t>> options;
    for (std::size_t r = 0; r < kGridRows; ++r)
      for (std::size_t c = 0; c < kGridCols; ++c)
        if (free(r, c) && r != apart.first && c != apart.second) options.emplace_back(r, c);
    if (options.empty()) return take(Shape::Single, rng);
    const auto [r, c] = options[rng.below(options.size())];
    return claim(r, c, 0, 0);
  }

 private:
  std::pair<std::size_t, std::size_t> claim(std::size_t r, std::size_t c, std::size_t dr, std::size_t dc) {
    used[r][c] = true;
    used[r + dr][c + dc] = true;
    return {r, c};
  }
};

PixelBox text_box(std::int64_t x, std::int64_t y, const std::string& text) {
  return {x, y, x + kCharWidth * static_cast<std::int64_t>(text.size()), y + kLineHeight};
}

}  // namespace

void SyntheticSpec::validate() const {
  if (n_documents == 0) throw ConfigError("n_documents must be positive");
  if (segments_per_doc.min == 0 || segments_per_doc.min > segments_per_doc.max)
    throw ConfigError("segments_per_doc must be a non-empty positive range");
  if (keys_per_doc.min == 0 || keys_per_doc.min > keys_per_doc.max)
    throw ConfigError("keys_per_doc must be a non-empty positive range");
  if (keys_per_doc.max > kMaxKeys) throw ConfigError("keys_per_doc may not exceed " + std::to_string(kMaxKeys));
  if (!(distractor_rate >= 0.0 && distractor_rate <= 1.0)) throw ConfigError("distractor_rate must lie in [0, 1]");
  const std::size_t per_key = distractor_rate > 0.0 ? 4 : 2;
  if (segments_per_doc.min < per_key * keys_per_doc.max)
    throw ConfigError("segments_per_doc.min must be at least " + std::to_string(per_key * keys_per_doc.max) +
                      " to hold keys, values and decoys");
}

std::string question_for_key(const std::string& key) { return "value of " + key + "?"; }

SyntheticCorpus generate_synthetic_corpus(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  SyntheticCorpus corpus;
  corpus.documents.reserve(spec.n_documents);

  for (std::size_t d = 0; d < spec.n_documents; ++d) {
    const std::size_t n_keys = rng.between(spec.keys_per_doc.min, spec.keys_per_doc.max);
    const std::size_t n_segments = rng.between(spec.segments_per_doc.min, spec.segments_per_doc.max);
    std::vector<bool> decoy(n_keys);
    std::size_t n_decoys = 0;
    for (std::size_t k = 0; k < n_keys; ++k) n_decoys += (decoy[k] = rng.chance(spec.distractor_rate)) ? 1 : 0;

    const auto keys = sample(kKeys, n_keys, rng);
    const auto values = sample(kValues, n_keys + n_decoys, rng);

    std::vector<Item> items;
    std::vector<Unit> units;
    std::size_t next_decoy_value = n_keys;
    for (std::size_t k = 0; k < n_keys; ++k) {
      const std::size_t key_item = items.size();
      items.push_back({std::string(keys[k]), Shape::Single, 0});
      items.push_back({std::string(values[k]), rng.chance(0.5) ? Shape::Right : Shape::Below, key_item});
      units.push_back({{key_item, key_item + 1}, 2});
      if (decoy[k]) {
        items.push_back({std::string(keys[k]), Shape::Single, 0});
        items.push_back({std::string(values[next_decoy_value++]), Shape::Single, 0});
        units.push_back({{items.size() - 2, items.size() - 1}, 2});
      }
      corpus.qa.push_back({d, question_for_key(std::string(keys[k])), {std::string(values[k])}});
    }
    while (items.size() < n_segments) {
      items.push_back({std::string(kFillers[rng.below(kFillers.size())]), Shape::Single, 0});
      units.push_back({{items.size() - 1}, 1});
    }

    std::size_t cells = 0;
    for (const auto& u : units) cells += u.cells;
    const std::size_t n_pages = std::max<std::size_t>(1, (cells + kCellsPerPage - 1) / kCellsPerPage);

    // Spread units over pages, then shuffle each page's stream order.
    std::shuffle(units.begin(), units.end(), rng.engine());
    std::vector<std::vector<const Unit*>> page_units(n_pages);
    std::vector<std::size_t> load(n_pages, 0);
    for (const auto& u : units) {
      std::size_t p = rng.below(n_pages);
      while (load[p] + u.cells > kCellsPerPage) p = (p + 1) % n_pages;
      load[p] += u.cells;
      page_units[p].push_back(&u);
    }

    Document doc;
    for (std::size_t p = 0; p < n_pages; ++p) {
      Grid grid;
      std::vector<PixelBox> boxes(items.size());
      // Place value pairs first: they need two-cell blocks.
      for (const Unit* u : page_units[p]) {
        const Item& value = items[u->items.back()];
        if (u->items.size() != 2 || value.shape == Shape::Single) continue;
        const auto [r, c] = grid.take(value.shape, rng);
        const auto x = static_cast<std::int64_t>(c) * kCellWidth + 20 + static_cast<std::int64_t>(rng.below(20));
        const auto y = static_cast<std::int64_t>(r) * kCellHeight + 20 + static_cast<std::int64_t>(rng.below(20));
        const PixelBox kb = text_box(x, y, items[u->items[0]].text);
        boxes[u->items[0]] = kb;
        boxes[u->items[1]] = value.shape == Shape::Right ? text_box(kb.x2 + kSyntheticPairGap, kb.y1, value.text)
                                                         : text_box(kb.x1, kb.y2 + kSyntheticPairGap, value.text);
      }
      // Decoy values sit in another row and column than their key copy.
      for (const Unit* u : page_units[p]) {
        std::pair<std::size_t, std::size_t> previous{kGridRows, kGridCols};
        for (std::size_t i : u->items) {
          if (items[i].shape != Shape::Single || (u->items.size() == 2 && items[u->items[1]].shape != Shape::Single))
            continue;
          const auto [r, c] = i == u->items.front() ? grid.take(Shape::Single, rng) : grid.take_apart(previous, rng);
          previous = {r, c};
          const auto x = static_cast<std::int64_t>(c) * kCellWidth + 20 + static_cast<std::int64_t>(rng.below(40));
          const auto y = static_cast<std::int64_t>(r) * kCellHeight + 20 + static_cast<std::int64_t>(rng.below(30));
          boxes[i] = text_box(x, y, items[i].text);
        }
      }
      std::shuffle(page_units[p].begin(), page_units[p].end(), rng.engine());
      Page page{kSyntheticPageSize, kSyntheticPageSize, {}};
      for (const Unit* u : page_units[p])
        for (std::size_t i : u->items)
          page.segments.push_back(make_segment(items[i].text, boxes[i], page.width, page.height));
      doc.pages.push_back(std::move(page));
    }
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

void write_corpus(const SyntheticCorpus& corpus, const std::string& directory) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw IoError("cannot create directory", directory);
  const auto base = std::filesystem::path(directory);
  {
    const auto path = (base / "corpus.jsonl").string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write corpus", path);
    for (const auto& doc : corpus.documents) out << serialize_document(doc) << '\n';
    if (!out) throw IoError("write failed", path);
  }
  json qa = json::array();
  for (const auto& q : corpus.qa) qa.push_back({{"doc", q.doc}, {"question", q.question}, {"answers", q.answers}});
  const auto path = (base / "qa.json").string();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write QA sidecar", path);
  out << json{{"qa", std::move(qa)}}.dump(1) << '\n';
  if (!out) throw IoError("write failed", path);
}

std::vector<QaPair> load_qa(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open QA sidecar", path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string raw = buffer.str();
  json root;
  try {
    root = json::parse(raw);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed QA JSON: ") + e.what(), e.byte);
  }
  if (!root.is_object() || !root.contains("qa") || !root["qa"].is_array())
    throw ValidationError("QA sidecar needs a top-level 'qa' array", -1, -1);
  std::vector<QaPair> out;
  long index = 0;
  for (const auto& j : root["qa"]) {
    try {
      QaPair q{j.at("doc").get<std::size_t>(), j.at("question").get<std::string>(),
               j.at("answers").get<std::vector<std::string>>()};
      if (q.answers.empty()) throw ValidationError("QA entry without answers", -1, index);
      out.push_back(std::move(q));
    } catch (const json::exception& e) {
      throw ValidationError("QA entry " + std::to_string(index) + ": " + e.what(), -1, index);
    }
    ++index;
  }
  return out;
}

SyntheticCorpus load_labeled_corpus(const std::string& corpus_path, const std::string& qa_path) {
  SyntheticCorpus c{load_corpus(corpus_path), load_qa(qa_path)};
  for (std::size_t i = 0; i < c.qa.size(); ++i)
    if (c.qa[i].doc >= c.documents.size())
      throw ValidationError("QA entry " + std::to_string(i) + " names missing document " +
                                std::to_string(c.qa[i].doc),
                            -1, static_cast<long>(i));
  return c;
}

}  // namespace laytoken::doc
