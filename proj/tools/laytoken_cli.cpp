// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "laytoken/ablation.hpp"
#include "laytoken/checkpoint.hpp"
#include "laytoken/config_io.hpp"
#include "laytoken/error.hpp"
#include "laytoken/evaluate.hpp"
#include "laytoken/grad_check.hpp"
#include "laytoken/ntlp_loss.hpp"
#include "laytoken/serial_formats.hpp"
#include "laytoken/synthetic.hpp"
#include "laytoken/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace laytoken;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitGradCheck = 3;
constexpr double kGradCheckTolerance = 1e-4;

/// Bad command-line input that CLI11 cannot detect on its own.
class UsageError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "usage"; }
};

void print_error(std::string_view kind, std::string_view message) {
  std::cerr << json{{"error", kind}, {"message", message}}.dump(-1, ' ', false, json::error_handler_t::replace)
            << '\n';
}

// ---------------------------------------------------------------------------
// Run configuration: a JSON file with optional "model", "train", "data",
// "eval_data" and "ablation" sections, overridden by flags.

struct AblationSettings {
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::size_t long_segments = 0;  // 0 disables the long-context evaluation
  bool text_only = false;
};

struct RunConfig {
  nn::ModelConfig model;
  train::TrainConfig train;
  doc::SyntheticSpec data;
  doc::SyntheticSpec eval_data;
  AblationSettings ablation;
  train::EvalOptions eval;
};

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::string> scheme;
  std::vector<std::string> formats;
  std::size_t window = 2048;
  std::optional<double> analytic_t;
  std::optional<std::size_t> docs;
  std::optional<std::size_t> eval_docs;
  std::optional<std::string> segments;
  std::optional<std::size_t> keys;
  std::optional<double> distractor_rate;
  std::optional<double> lr;
  std::optional<std::size_t> epochs;
  std::size_t probes = 50;
  double epsilon = 1e-5;
  double init_std = 0.3;
  std::string corpus;
  std::string checkpoint;
  std::string seeds;
  std::optional<std::size_t> long_segments;
  bool text_only = false;
  std::optional<std::size_t> max_new_tokens;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path, path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what(), static_cast<std::size_t>(e.byte));
  }
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      seeds.push_back(std::stoull(item));
    } catch (const std::exception&) {
      throw UsageError("--seeds expects comma-separated integers, got '" + text + "'");
    }
  }
  if (seeds.empty()) throw UsageError("--seeds needs at least one seed");
  return seeds;
}

doc::CountRange parse_range(const std::string& text) {
  const auto comma = text.find(',');
  try {
    if (comma == std::string::npos) {
      const auto n = std::stoul(text);
      return {n, n};
    }
    return {std::stoul(text.substr(0, comma)), std::stoul(text.substr(comma + 1))};
  } catch (const std::exception&) {
    throw UsageError("expected N or MIN,MAX, got '" + text + "'");
  }
}

std::string valid_formats() {
  std::string s;
  for (auto f : serial::kAllFormats) s += (s.empty() ? "" : ", ") + std::string(serial::format_name(f));
  return s;
}

serial::SerializationFormat format_flag(const std::string& name) {
  try {
    return serial::parse_format(name);
  } catch (const ArgumentError&) {
    throw UsageError("unknown format '" + name + "'; valid formats: " + valid_formats());
  }
}

RunConfig resolve_config(const Flags& f) {
  RunConfig rc;
  if (!f.config.empty()) {
    const json j = read_json_file(f.config);
    if (!j.is_object()) throw ConfigError(f.config + ": config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
      if (key == "model") {
        rc.model = model_config_from_json(value);
      } else if (key == "train") {
        rc.train = train_config_from_json(value);
      } else if (key == "data") {
        rc.data = synthetic_spec_from_json(value);
      } else if (key == "eval_data") {
        rc.eval_data = synthetic_spec_from_json(value);
      } else if (key == "ablation") {
        if (!value.is_object()) throw ConfigError("'ablation' must be an object");
        for (const auto& [k, v] : value.items()) {
          if (k == "seeds")
            rc.ablation.seeds = v.get<std::vector<std::uint64_t>>();
          else if (k == "long_segments")
            rc.ablation.long_segments = v.get<std::size_t>();
          else if (k == "text_only")
            rc.ablation.text_only = v.get<bool>();
          else
            throw ConfigError("unknown ablation key '" + k + "'");
        }
      } else if (key == "eval") {
        if (!value.is_object()) throw ConfigError("'eval' must be an object");
        for (const auto& [k, v] : value.items()) {
          if (k == "max_new_tokens")
            rc.eval.max_new_tokens = v.get<std::size_t>();
          else if (k == "threshold")
            rc.eval.threshold = v.get<double>();
          else
            throw ConfigError("unknown eval key '" + k + "'");
        }
      } else {
        throw ConfigError("unknown config section '" + key + "'");
      }
    }
    if (!j.contains("eval_data")) {
      rc.eval_data = rc.data;
      rc.eval_data.seed = rc.data.seed + 1000;
    }
  } else {
    rc.eval_data.seed = rc.data.seed + 1000;
  }

  if (f.seed) {
    rc.train.seed = *f.seed;
    rc.data.seed = *f.seed;
    rc.eval_data.seed = *f.seed + 1000;
  }
  if (f.scheme) {
    try {
      rc.train.scheme = layout::parse_scheme(*f.scheme);
    } catch (const ArgumentError& e) {
      throw UsageError(e.what());
    }
    if (rc.train.scheme == layout::PositionScheme::TextOnly) rc.train.use_layout_tokenizer = false;
  }
  if (f.formats.size() == 1 && f.formats[0] != "all") {
    const auto fmt = format_flag(f.formats[0]);
    if (serial::is_string_layout(fmt)) rc.train.string_format = fmt;
  }
  if (f.docs) {
    if (*f.docs == 0) throw UsageError("--docs must be at least 1");
    rc.data.n_documents = *f.docs;
  }
  if (f.eval_docs) {
    if (*f.eval_docs == 0) throw UsageError("--eval-docs must be at least 1");
    rc.eval_data.n_documents = *f.eval_docs;
  }
  if (f.segments) rc.data.segments_per_doc = rc.eval_data.segments_per_doc = parse_range(*f.segments);
  if (f.keys) rc.data.keys_per_doc = rc.eval_data.keys_per_doc = {*f.keys, *f.keys};
  if (f.distractor_rate) rc.data.distractor_rate = rc.eval_data.distractor_rate = *f.distractor_rate;
  if (f.lr) rc.train.learning_rate = *f.lr;
  if (f.epochs) rc.train.epochs = *f.epochs;
  if (!f.seeds.empty()) rc.ablation.seeds = parse_seeds(f.seeds);
  if (f.long_segments) rc.ablation.long_segments = *f.long_segments;
  if (f.text_only) rc.ablation.text_only = true;
  if (f.max_new_tokens) rc.eval.max_new_tokens = *f.max_new_tokens;

  rc.model.validate();
  rc.train.validate();
  rc.data.validate();
  rc.eval_data.validate();
  return rc;
}

json run_config_json(const RunConfig& rc) {
  return {{"model", to_json(rc.model)},
          {"train", to_json(rc.train)},
          {"data", to_json(rc.data)},
          {"eval_data", to_json(rc.eval_data)},
          {"ablation",
           {{"seeds", rc.ablation.seeds},
            {"long_segments", rc.ablation.long_segments},
            {"text_only", rc.ablation.text_only}}},
          {"eval", {{"max_new_tokens", rc.eval.max_new_tokens}, {"threshold", rc.eval.threshold}}}};
}

// ---------------------------------------------------------------------------
// Output helpers. Nothing is written outside the --out directory.

fs::path out_dir(const Flags& f, bool required) {
  if (f.out.empty()) {
    if (required) throw UsageError("--out is required for this command");
    return {};
  }
  fs::create_directories(f.out);
  return f.out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string(), path.string());
  out << text;
}

// Decoded predictions may hold partial UTF-8 sequences; those bytes are replaced.
std::string dump(const json& j, int indent = -1) { return j.dump(indent, ' ', false, json::error_handler_t::replace); }

void write_json(const fs::path& path, const json& j) { write_text(path, dump(j, 2) + "\n"); }

void write_resolved(const fs::path& dir, const json& config) {
  if (!dir.empty()) write_json(dir / "config.json", config);
}

doc::SyntheticCorpus corpus_from(const std::string& dir, const doc::SyntheticSpec& spec) {
  if (dir.empty()) return doc::generate_synthetic_corpus(spec);
  const fs::path d(dir);
  return doc::load_labeled_corpus((d / "corpus.jsonl").string(), (d / "qa.json").string());
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// ---------------------------------------------------------------------------
// Subcommands.

int cmd_analyze(const Flags& f, const std::vector<std::string>& inputs) {
  std::vector<serial::SerializationFormat> formats;
  if (f.formats.empty() || (f.formats.size() == 1 && f.formats[0] == "all"))
    formats.assign(serial::kAllFormats.begin(), serial::kAllFormats.end());
  else
    for (const auto& name : f.formats) formats.push_back(format_flag(name));
  if (inputs.empty() && !f.analytic_t) throw UsageError("analyze needs a corpus path or --analytic-T");

  json result = {{"window", f.window}};
  if (f.analytic_t) {
    const double t = *f.analytic_t;
    if (!(t > 0.0)) throw UsageError("--analytic-T must be positive");
    std::printf("analytic T-Ratio, T = %g text tokens per segment\n", t);
    std::printf("%-16s %10s %10s\n", "format", "extra_ids", "t_ratio%");
    json rows = json::array();
    for (const auto& r : serial::kReferenceOverheads) {
      const double ratio = serial::analytic_t_ratio(t, static_cast<double>(r.extra_ids_per_segment));
      std::printf("%-16s %10zu %10s\n", std::string(r.label).c_str(), r.extra_ids_per_segment,
                  fixed(100.0 * ratio, 2).c_str());
      rows.push_back({{"format", r.label}, {"extra_ids", r.extra_ids_per_segment}, {"t_ratio", ratio}});
    }
    result["analytic"] = {{"T", t}, {"rows", rows}};
  }

  for (const auto& path : inputs) {
    const auto docs = doc::load_corpus(path);
    std::printf("%s: %zu documents, window %zu\n", path.c_str(), docs.size(), f.window);
    std::printf("%-14s %9s %10s %10s %9s %12s %10s %14s\n", "format", "segments", "extra_ids", "text_tok",
                "t_ratio", "window_text", "seq_len", "flops_proxy");
    json rows = json::array();
    for (auto fmt : formats) {
      std::size_t segments = 0, extra = 0, text = 0, length = 0;
      double flops = 0.0;
      for (const auto& d : docs) {
        const auto r = serial::count_overhead(d, fmt, f.window);
        segments += r.segments;
        extra += r.total_extra_ids;
        text += r.text_token_count;
        length += r.sequence_length;
        flops += r.flops_proxy;
      }
      const double ratio = text + extra == 0 ? 1.0 : static_cast<double>(text) / static_cast<double>(text + extra);
      const auto window_text = static_cast<std::size_t>(static_cast<double>(f.window) * ratio);
      const std::string name(serial::format_name(fmt));
      std::printf("%-14s %9zu %10zu %10zu %9s %12zu %10zu %14.4g\n", name.c_str(), segments, extra, text,
                  fixed(ratio, 4).c_str(), window_text, length, flops);
      rows.push_back({{"format", name},
                      {"segments", segments},
                      {"extra_ids", extra},
                      {"text_tokens", text},
                      {"t_ratio", ratio},
                      {"window_text_tokens", window_text},
                      {"sequence_length", length},
                      {"flops_proxy", flops}});
    }
    result["corpora"].push_back({{"path", path}, {"documents", docs.size()}, {"rows", rows}});
  }

  const auto dir = out_dir(f, false);
  if (!dir.empty()) {
    write_json(dir / "analyze.json", result);
    write_resolved(dir, {{"command", "analyze"},
                         {"inputs", inputs},
                         {"formats", f.formats.empty() ? std::vector<std::string>{"all"} : f.formats},
                         {"window", f.window},
                         {"analytic_T", f.analytic_t ? json(*f.analytic_t) : json(nullptr)}});
  }
  return 0;
}

int cmd_gen_data(const Flags& f) {
  const RunConfig rc = resolve_config(f);
  const auto dir = out_dir(f, true);
  const auto corpus = doc::generate_synthetic_corpus(rc.data);
  doc::write_corpus(corpus, dir.string());
  write_resolved(dir, {{"command", "gen-data"}, {"data", to_json(rc.data)}});
  spdlog::info("wrote {} documents and {} questions to {}", corpus.documents.size(), corpus.qa.size(),
               dir.string());
  return 0;
}

int cmd_train(const Flags& f) {
  const RunConfig rc = resolve_config(f);
  const auto dir = out_dir(f, true);
  write_resolved(dir, run_config_json(rc));
  const auto corpus = corpus_from(f.corpus, rc.data);

  std::ofstream log(dir / "train_log.jsonl", std::ios::trunc);
  if (!log) throw IoError("cannot write the training log", (dir / "train_log.jsonl").string());
  const auto start = std::chrono::steady_clock::now();
  train::TrainHooks hooks;
  hooks.on_step = [&](const train::StepRecord& r) {
    log << json{{"step", r.step},
                {"phase", train::phase_name(r.phase)},
                {"total", r.loss.total},
                {"ce", r.loss.ce_count ? r.loss.ce_sum / static_cast<double>(r.loss.ce_count) : 0.0},
                {"mse", r.loss.mse_count ? r.loss.mse_sum / static_cast<double>(r.loss.mse_count) : 0.0},
                {"lr", r.learning_rate}}
               .dump()
        << '\n';
  };
  hooks.on_epoch = [&](train::Phase phase, std::size_t epoch, const nn::ModelParams&) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    spdlog::info("{} epoch {} done ({:.1f}s)", train::phase_name(phase), epoch + 1, secs);
  };

  const auto initial = nn::parameter_checksum(nn::init_params(rc.model, rc.train.seed));
  const auto result = train::train(corpus, rc.model, rc.train, hooks);
  save_checkpoint(result.params, rc.train, result.history, (dir / "model.ckpt").string());
  if (nn::parameter_checksum(result.params) == initial)
    spdlog::warn("parameters are unchanged after {} steps (learning rate {})", result.history.size(),
                 rc.train.learning_rate);
  const auto& last = result.history.back();
  std::printf("trained %zu steps; final loss %.6f; checkpoint %s\n", result.history.size(), last.loss.total,
              (dir / "model.ckpt").string().c_str());
  return 0;
}

int cmd_eval(const Flags& f) {
  if (f.checkpoint.empty()) throw UsageError("eval needs --checkpoint");
  RunConfig rc = resolve_config(f);
  if (f.docs) rc.eval_data.n_documents = *f.docs;
  const auto ckpt = train::load_checkpoint(f.checkpoint);
  if (ckpt.train_config && !f.scheme && !(f.formats.size() == 1)) rc.train = *ckpt.train_config;
  const auto encoding = train::input_encoding(rc.train);
  const auto corpus = corpus_from(f.corpus, rc.eval_data);
  const auto report = train::evaluate(ckpt.params, corpus, encoding, rc.eval);

  std::printf("anls %.6f  exact %.6f  questions %zu  skipped %zu\n", report.anls_mean, report.exact_match,
              report.records.size(), report.skipped.size());
  for (const auto& s : report.skipped) spdlog::warn("skipped doc {} '{}': {}", s.doc, s.question, s.reason);
  const auto dir = out_dir(f, false);
  if (!dir.empty()) {
    json records = json::array(), skipped = json::array();
    for (const auto& r : report.records)
      records.push_back(
          {{"doc", r.doc}, {"question", r.question}, {"golds", r.golds}, {"prediction", r.prediction}, {"anls", r.anls}});
    for (const auto& s : report.skipped)
      skipped.push_back({{"doc", s.doc}, {"question", s.question}, {"reason", s.reason}});
    write_json(dir / "eval.json", {{"anls_mean", report.anls_mean},
                                   {"exact_match", report.exact_match},
                                   {"records", records},
                                   {"skipped", skipped}});
    json cfg = run_config_json(rc);
    cfg["checkpoint"] = f.checkpoint;
    write_resolved(dir, cfg);
  }
  return 0;
}

int cmd_gradcheck(const Flags& f) {
  RunConfig rc = resolve_config(f);
  rc.model.init_std = f.init_std;
  auto params = nn::init_params(rc.model, rc.train.seed);
  doc::SyntheticSpec spec = rc.data;
  spec.n_documents = 1;
  const auto corpus = doc::generate_synthetic_corpus(spec);
  const auto seq = ntlp::build_sequence(corpus.documents.front(), train::input_encoding(rc.train), ntlp::Pretrain{},
                                        rc.model.max_context);
  auto ps = params.parameters();
  const auto report = nn::grad_check(
      [&](nn::Tape& t) { return ntlp::ntlp_loss(t, params, seq, rc.train.mse_weight).total; }, ps,
      {f.probes, f.epsilon, rc.train.seed});
  for (const auto& w : report.warnings) spdlog::warn("{}", w);
  std::printf("probes %zu  max_rel_error %.3e  tolerance %.0e\n", report.probes.size(), report.max_rel_error,
              kGradCheckTolerance);

  const auto dir = out_dir(f, false);
  if (!dir.empty()) {
    json probes = json::array();
    for (const auto& p : report.probes)
      probes.push_back({{"parameter", p.parameter},
                        {"index", p.index},
                        {"analytic", p.analytic},
                        {"numeric", p.numeric},
                        {"rel_error", p.rel_error}});
    write_json(dir / "gradcheck.json", {{"max_rel_error", report.max_rel_error}, {"probes", probes}});
    json cfg = run_config_json(rc);
    cfg["gradcheck"] = {{"probes", f.probes}, {"epsilon", f.epsilon}, {"init_std", f.init_std}};
    write_resolved(dir, cfg);
  }
  if (!(report.max_rel_error < kGradCheckTolerance)) {
    print_error("gradcheck", "max relative error " + std::to_string(report.max_rel_error) + " exceeds tolerance");
    return kExitGradCheck;
  }
  return 0;
}

int cmd_ablate(const Flags& f) {
  const RunConfig rc = resolve_config(f);
  const auto dir = out_dir(f, false);
  if (!dir.empty()) write_resolved(dir, run_config_json(rc));
  const auto train_set = corpus_from(f.corpus, rc.data);
  const auto eval_set = doc::generate_synthetic_corpus(rc.eval_data);
  std::optional<doc::SyntheticCorpus> long_set;
  if (rc.ablation.long_segments > 0) {
    auto spec = rc.eval_data;
    spec.segments_per_doc = {rc.ablation.long_segments, rc.ablation.long_segments};
    long_set = doc::generate_synthetic_corpus(spec);
  }

  train::AblationOptions opts;
  opts.seeds = rc.ablation.seeds;
  opts.eval = rc.eval;
  opts.on_run = [](const train::AblationRow& row, std::uint64_t seed, double anls, std::optional<double> long_anls) {
    if (long_anls)
      spdlog::info("{} seed {}: anls {:.4f} long {:.4f}", row.label, seed, anls, *long_anls);
    else
      spdlog::info("{} seed {}: anls {:.4f}", row.label, seed, anls);
  };
  const auto rows = train::ablation_rows(rc.train);
  const auto results = train::run_ablation(rows, train_set, eval_set, long_set, rc.model, opts);

  auto print_row = [&](const train::RowResult& r) {
    std::printf("%-10s %9s %10s %5s %10s", r.row.label.c_str(), r.row.tokenizer() ? "yes" : "no",
                r.row.shared_ids() ? "yes" : "no", r.row.ntlp() ? "yes" : "no", fixed(r.anls_mean, 4).c_str());
    if (long_set) std::printf(" %10s", fixed(r.long_anls_mean, 4).c_str());
    std::printf("\n");
  };
  auto row_json = [&](const train::RowResult& r) {
    json j = {{"label", r.row.label},      {"tokenizer", r.row.tokenizer()}, {"shared_ids", r.row.shared_ids()},
              {"ntlp", r.row.ntlp()},      {"seeds", r.seeds},               {"anls", r.anls},
              {"anls_mean", r.anls_mean},  {"skipped", r.skipped}};
    if (long_set) {
      j["long_anls"] = r.long_anls;
      j["long_anls_mean"] = r.long_anls_mean;
    }
    return j;
  };
  std::printf("%-10s %9s %10s %5s %10s%s\n", "row", "tokenizer", "shared_ids", "ntlp", "anls",
              long_set ? "  long_anls" : "");
  json table = json::array();
  for (const auto& r : results) {
    print_row(r);
    table.push_back(row_json(r));
  }
  json out = {{"rows", table}};
  if (rc.ablation.text_only) {
    const auto baseline = train::run_ablation({train::text_only_row(rc.train)}, train_set, eval_set, long_set,
                                              rc.model, opts);
    std::printf("baseline:\n");
    print_row(baseline.front());
    out["text_only"] = row_json(baseline.front());
  }
  if (!dir.empty()) write_json(dir / "ablation.json", out);
  return 0;
}

int cmd_serialize(const Flags& f, const std::vector<std::string>& inputs) {
  if (inputs.empty()) throw UsageError("serialize needs a corpus path");
  if (f.formats.size() > 1 || (f.formats.size() == 1 && f.formats[0] == "all"))
    throw UsageError("serialize takes a single --format");
  const auto fmt = f.formats.empty() ? serial::SerializationFormat::LayToken : format_flag(f.formats[0]);
  const auto scheme = f.scheme ? layout::parse_scheme(*f.scheme) : layout::PositionScheme::SharedFirst;
  std::ostringstream lines;
  std::size_t index = 0;
  for (const auto& path : inputs) {
    for (const auto& d : doc::load_corpus(path)) {
      json j = {{"doc", index++}, {"format", serial::format_name(fmt)}};
      if (fmt == serial::SerializationFormat::LayToken) {
        const auto seq = ntlp::build_sequence(d, scheme, ntlp::Pretrain{}, std::numeric_limits<std::size_t>::max());
        json tokens = json::array();
        std::string text;
        for (std::size_t i = 1; i < seq.size(); ++i) {
          const auto& t = seq.tokens[i];
          if (t.kind == ntlp::TokenKind::Layout) {
            tokens.push_back({{"text", text}, {"box", t.box.coords()}, {"layout_position", t.position}});
            text.clear();
          } else {
            text.push_back(static_cast<char>(t.id));
          }
        }
        j["scheme"] = layout::scheme_name(scheme);
        j["segments"] = tokens;
        j["positions"] = seq.positions();
        j["length"] = seq.size() - 1;
      } else {
        std::string text;
        for (const auto* s : d.segments()) text += serial::render(*s, fmt);
        j["length"] = serial::tokenize(text).size();
        j["text"] = text;
      }
      lines << dump(j) << '\n';
    }
  }
  const auto dir = out_dir(f, false);
  if (dir.empty()) {
    std::cout << lines.str();
  } else {
    write_text(dir / "serialized.jsonl", lines.str());
    write_resolved(dir, {{"command", "serialize"},
                         {"inputs", inputs},
                         {"format", serial::format_name(fmt)},
                         {"scheme", layout::scheme_name(scheme)}});
  }
  return 0;
}

void init_logging() {
  auto logger = spdlog::stderr_color_st("laytoken");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("LAYTOKEN_LOG")) {
    const auto level = spdlog::level::from_str(env);
    if (level == spdlog::level::off && std::string(env) != "off")
      spdlog::warn("ignoring unknown LAYTOKEN_LOG level '{}'", env);
    else
      spdlog::set_level(level);
  }
}

}  // namespace

int main(int argc, char** argv) {
  init_logging();
  CLI::App app{"Layout-token document language models at desk scale"};
  app.require_subcommand(1);
  Flags f;
  std::vector<std::string> inputs;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--seed", f.seed, "seed for data, initialization and shuffling");
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--scheme", f.scheme, "position scheme: shared-first, extra-ids or text-only");
    sub->add_option("--format", f.formats, "serialization format name, or 'all'; repeatable")->allow_extra_args(false);
    sub->add_option("--window", f.window, "position window N");
  };
  auto data_flags = [&](CLI::App* sub) {
    sub->add_option("--docs", f.docs, "number of synthetic documents");
    sub->add_option("--segments", f.segments, "segments per document: N or MIN,MAX");
    sub->add_option("--keys", f.keys, "questions per document");
    sub->add_option("--distractor-rate", f.distractor_rate, "probability of a decoy pair per key");
  };

  auto* analyze = app.add_subcommand("analyze", "position-id overhead per serialization format");
  common(analyze);
  analyze->add_option("--analytic-T", f.analytic_t, "print analytic T-Ratios for T text tokens per segment");
  analyze->add_option("corpus", inputs, "OCR corpus files (.json or .jsonl)");

  auto* gen = app.add_subcommand("gen-data", "write a synthetic key-value corpus");
  common(gen);
  data_flags(gen);

  auto* train_cmd = app.add_subcommand("train", "train a model and write a checkpoint");
  common(train_cmd);
  data_flags(train_cmd);
  train_cmd->add_option("--corpus", f.corpus, "directory with corpus.jsonl and qa.json");
  train_cmd->add_option("--lr", f.lr, "learning rate");
  train_cmd->add_option("--epochs", f.epochs, "fine-tuning epochs");

  auto* eval_cmd = app.add_subcommand("eval", "score a checkpoint with ANLS");
  common(eval_cmd);
  data_flags(eval_cmd);
  eval_cmd->add_option("--checkpoint", f.checkpoint, "checkpoint file");
  eval_cmd->add_option("--corpus", f.corpus, "directory with corpus.jsonl and qa.json");
  eval_cmd->add_option("--max-new-tokens", f.max_new_tokens, "greedy decoding budget");

  auto* grad = app.add_subcommand("gradcheck", "compare analytic and finite-difference gradients");
  common(grad);
  grad->add_option("--probes", f.probes, "number of probed scalars");
  grad->add_option("--epsilon", f.epsilon, "central-difference step");
  grad->add_option("--init-std", f.init_std, "weight scale of the probed initialization");

  auto* ablate = app.add_subcommand("ablate", "train and score the four ablation configurations");
  common(ablate);
  data_flags(ablate);
  ablate->add_option("--corpus", f.corpus, "directory with corpus.jsonl and qa.json");
  ablate->add_option("--lr", f.lr, "learning rate");
  ablate->add_option("--epochs", f.epochs, "fine-tuning epochs");
  ablate->add_option("--eval-docs", f.eval_docs, "number of synthetic evaluation documents");
  ablate->add_option("--seeds", f.seeds, "comma-separated training seeds");
  ablate->add_option("--long-segments", f.long_segments, "segments per long-context evaluation document");
  ablate->add_flag("--text-only", f.text_only, "also report a text-only baseline");

  auto* serialize = app.add_subcommand("serialize", "render documents in one serialization format");
  common(serialize);
  serialize->add_option("corpus", inputs, "OCR corpus files (.json or .jsonl)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    return kExitUsage;
  }

  try {
    if (*analyze) return cmd_analyze(f, inputs);
    if (*gen) return cmd_gen_data(f);
    if (*train_cmd) return cmd_train(f);
    if (*eval_cmd) return cmd_eval(f);
    if (*grad) return cmd_gradcheck(f);
    if (*ablate) return cmd_ablate(f);
    if (*serialize) return cmd_serialize(f, inputs);
  } catch (const UsageError& e) {
    print_error(e.kind(), e.what());
    return kExitUsage;
  } catch (const Error& e) {
    print_error(e.kind(), e.what());
    return kExitFailure;
  } catch (const json::exception& e) {
    print_error("config", e.what());
    return kExitFailure;
  } catch (const fs::filesystem_error& e) {
    print_error("io", e.what());
    return kExitFailure;
  }
  return kExitFailure;
}
