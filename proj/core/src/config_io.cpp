// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#include "laytoken/config_io.hpp"

#include <cstdint>
#include <set>
#include <string>

#include "laytoken/error.hpp"

namespace laytoken {

using json = nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const char* what) {
  if (!j.is_object()) throw ConfigError(std::string(what) + " must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!known.contains(key)) throw ConfigError(std::string("unknown ") + what + " key '" + key + "'");
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

}  // namespace

json to_json(const nn::ModelConfig& c) {
  return {{"d_model", c.d_model},         {"n_heads", c.n_heads},
          {"n_layers", c.n_layers},       {"vocab_size", c.vocab_size},
          {"max_context", c.max_context}, {"rope_base", c.rope_base},
          {"d_ff", c.d_ff},               {"coord_frequencies", c.coord_frequencies},
          {"layer_norm_eps", c.layer_norm_eps}, {"init_std", c.init_std}};
}

nn::ModelConfig model_config_from_json(const json& j, nn::ModelConfig c) {
  reject_unknown(j,
                 {"d_model", "n_heads", "n_layers", "vocab_size", "max_context", "rope_base", "d_ff",
                  "coord_frequencies", "layer_norm_eps", "init_std"},
                 "model");
  const auto d_before = c.d_model;
  read(j, "d_model", c.d_model);
  read(j, "n_heads", c.n_heads);
  read(j, "n_layers", c.n_layers);
  read(j, "vocab_size", c.vocab_size);
  read(j, "max_context", c.max_context);
  read(j, "rope_base", c.rope_base);
  // d_ff follows 4 * d_model unless given explicitly.
  if (!j.contains("d_ff") && c.d_model != d_before) c.d_ff = 4 * c.d_model;
  read(j, "d_ff", c.d_ff);
  read(j, "coord_frequencies", c.coord_frequencies);
  read(j, "layer_norm_eps", c.layer_norm_eps);
  read(j, "init_std", c.init_std);
  c.validate();
  return c;
}

json to_json(const train::TrainConfig& c) {
  return {{"learning_rate", c.learning_rate},
          {"batch_size", c.batch_size},
          {"epochs", c.epochs},
          {"seed", c.seed},
          {"adam", {{"beta1", c.adam.beta1}, {"beta2", c.adam.beta2}, {"epsilon", c.adam.epsilon}}},
          {"mse_weight", c.mse_weight},
          {"scheme", std::string(layout::scheme_name(c.scheme))},
          {"use_layout_tokenizer", c.use_layout_tokenizer},
          {"use_ntlp", c.use_ntlp},
          {"pretrain_epochs", c.pretrain_epochs},
          {"string_format", std::string(serial::format_name(c.string_format))}};
}

train::TrainConfig train_config_from_json(const json& j, train::TrainConfig c) {
  reject_unknown(j,
                 {"learning_rate", "batch_size", "epochs", "seed", "adam", "mse_weight", "scheme",
                  "use_layout_tokenizer", "use_ntlp", "pretrain_epochs", "string_format"},
                 "train");
  read(j, "learning_rate", c.learning_rate);
  read(j, "batch_size", c.batch_size);
  read(j, "epochs", c.epochs);
  read(j, "seed", c.seed);
  if (j.contains("adam")) {
    const auto& a = j["adam"];
    reject_unknown(a, {"beta1", "beta2", "epsilon"}, "adam");
    read(a, "beta1", c.adam.beta1);
    read(a, "beta2", c.adam.beta2);
    read(a, "epsilon", c.adam.epsilon);
  }
  read(j, "mse_weight", c.mse_weight);
  std::string name;
  if (j.contains("scheme")) {
    read(j, "scheme", name);
    try {
      c.scheme = layout::parse_scheme(name);
    } catch (const ArgumentError& e) {
      throw ConfigError(e.what());
    }
  }
  read(j, "use_layout_tokenizer", c.use_layout_tokenizer);
  read(j, "use_ntlp", c.use_ntlp);
  read(j, "pretrain_epochs", c.pretrain_epochs);
  if (j.contains("string_format")) {
    read(j, "string_format", name);
    try {
      c.string_format = serial::parse_format(name);
    } catch (const ArgumentError& e) {
      throw ConfigError(e.what());
    }
  }
  c.validate();
  return c;
}

json to_json(const doc::SyntheticSpec& s) {
  return {{"n_documents", s.n_documents},
          {"segments_per_doc", {s.segments_per_doc.min, s.segments_per_doc.max}},
          {"keys_per_doc", {s.keys_per_doc.min, s.keys_per_doc.max}},
          {"seed", s.seed},
          {"distractor_rate", s.distractor_rate}};
}

doc::SyntheticSpec synthetic_spec_from_json(const json& j, doc::SyntheticSpec s) {
  reject_unknown(j, {"n_documents", "segments_per_doc", "keys_per_doc", "seed", "distractor_rate"}, "data");
  auto range = [&](const char* key, doc::CountRange& r) {
    if (!j.contains(key)) return;
    const auto& v = j[key];
    auto count = [](const json& x) { return x.is_number_integer() && x.get<std::int64_t>() >= 0; };
    if (count(v)) {
      r.min = r.max = v.get<std::size_t>();
    } else if (v.is_array() && v.size() == 2 && count(v[0]) && count(v[1])) {
      r = {v[0].get<std::size_t>(), v[1].get<std::size_t>()};
    } else {
      throw ConfigError(std::string("'") + key + "' must be a count or [min, max]");
    }
  };
  read(j, "n_documents", s.n_documents);
  range("segments_per_doc", s.segments_per_doc);
  range("keys_per_doc", s.keys_per_doc);
  read(j, "seed", s.seed);
  read(j, "distractor_rate", s.distractor_rate);
  s.validate();
  return s;
}

}  // namespace laytoken
