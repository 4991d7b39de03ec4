// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#include "laytoken/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "laytoken/config_io.hpp"

namespace laytoken::train {

using json = nlohmann::json;

namespace {

constexpr std::array<char, 8> kMagic = {'L', 'A', 'Y', 'T', 'O', 'K', 'C', 'K'};

template <class U>
void put_le(std::string& out, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

template <class U>
U get_le(const std::string& in, std::size_t at) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(static_cast<unsigned char>(in[at + i])) << (8 * i);
  return v;
}

json history_to_json(const std::vector<StepRecord>& history) {
  json out = json::array();
  for (const auto& r : history)
    out.push_back({r.step, std::string(phase_name(r.phase)), r.loss.total, r.loss.ce_sum, r.loss.ce_count,
                   r.loss.mse_sum, r.loss.mse_count, r.learning_rate});
  return out;
}

std::vector<StepRecord> history_from_json(const json& j) {
  std::vector<StepRecord> out;
  for (const auto& e : j) {
    StepRecord r;
    r.step = e.at(0).get<std::size_t>();
    r.phase = e.at(1).get<std::string>() == "pretrain" ? Phase::Pretrain : Phase::Sft;
    r.loss.total = e.at(2).get<double>();
    r.loss.ce_sum = e.at(3).get<double>();
    r.loss.ce_count = e.at(4).get<std::size_t>();
    r.loss.mse_sum = e.at(5).get<double>();
    r.loss.mse_count = e.at(6).get<std::size_t>();
    r.learning_rate = e.at(7).get<double>();
    out.push_back(r);
  }
  return out;
}

}  // namespace

const char* CheckpointError::kind() const noexcept {
  switch (kind_) {
    case Kind::Format: return "checkpoint-format";
    case Kind::Version: return "checkpoint-version";
    case Kind::Shape: return "checkpoint-shape";
    case Kind::Truncated: return "checkpoint-truncated";
  }
  return "checkpoint";
}

void save_checkpoint(const nn::ModelParams& params, const std::optional<TrainConfig>& config,
                     const std::vector<StepRecord>& history, const std::string& path) {
  json tensors = json::array();
  for (const auto* p : params.parameters()) tensors.push_back({{"name", p->name}, {"shape", p->value.shape()}});
  json manifest = {{"version", kCheckpointVersion},
                   {"model", to_json(params.config)},
                   {"train", config ? to_json(*config) : json(nullptr)},
                   {"step", history.size()},
                   {"history", history_to_json(history)},
                   {"tensors", std::move(tensors)}};
  const std::string text = manifest.dump();

  std::string out(kMagic.begin(), kMagic.end());
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint64_t>(out, text.size());
  out += text;
  for (const auto* p : params.parameters())
    for (double v : p->value.values()) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write checkpoint", path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("checkpoint write failed", path);
}

Checkpoint load_checkpoint(const std::string& path, const std::optional<nn::ModelConfig>& expected) {
  using K = CheckpointError::Kind;
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open checkpoint", path);
  const std::string in((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

  if (in.size() < kMagic.size() || std::memcmp(in.data(), kMagic.data(), kMagic.size()) != 0)
    throw CheckpointError(K::Format, "not a checkpoint (bad magic): " + path);
  const std::size_t header = kMagic.size() + 4 + 8;
  if (in.size() < header) throw CheckpointError(K::Truncated, "checkpoint header truncated: " + path);
  const auto version = get_le<std::uint32_t>(in, 8);
  if (version != kCheckpointVersion)
    throw CheckpointError(K::Version, "checkpoint version " + std::to_string(version) + " unsupported (expected " +
                                          std::to_string(kCheckpointVersion) + ")");
  const auto manifest_len = get_le<std::uint64_t>(in, 12);
  if (manifest_len > in.size() - header) throw CheckpointError(K::Truncated, "checkpoint manifest truncated: " + path);

  json manifest;
  nn::ModelConfig model;
  std::optional<TrainConfig> train_config;
  try {
    manifest = json::parse(in.begin() + static_cast<std::ptrdiff_t>(header),
                           in.begin() + static_cast<std::ptrdiff_t>(header + manifest_len));
    model = model_config_from_json(manifest.at("model"));
    if (!manifest.at("train").is_null()) train_config = train_config_from_json(manifest["train"]);
  } catch (const json::exception& e) {
    throw CheckpointError(K::Format, std::string("bad checkpoint manifest: ") + e.what());
  } catch (const ConfigError& e) {
    throw CheckpointError(K::Format, std::string("bad checkpoint manifest: ") + e.what());
  }

  if (expected && !(*expected == model)) {
    // Report the first tensor whose shape differs, if any.
    const nn::ModelParams want(*expected);
    const nn::ModelParams have(model);
    const auto w = want.parameters();
    const auto h = have.parameters();
    for (std::size_t i = 0; i < std::min(w.size(), h.size()); ++i)
      if (w[i]->value.shape() != h[i]->value.shape())
        throw CheckpointError(K::Shape, "tensor " + h[i]->name + " has shape " + nn::shape_string(h[i]->value.shape()) +
                                            ", expected " + nn::shape_string(w[i]->value.shape()));
    if (w.size() != h.size()) throw CheckpointError(K::Shape, "checkpoint has a different number of tensors");
    throw CheckpointError(K::Shape, "checkpoint config differs from the expected model config");
  }

  Checkpoint ck{nn::ModelParams(model), train_config, {}};
  try {
    const auto& tensors = manifest.at("tensors");
    auto params = ck.params.parameters();
    if (tensors.size() != params.size()) throw CheckpointError(K::Shape, "tensor count does not match the config");
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (tensors[i].at("name").get<std::string>() != params[i]->name ||
          tensors[i].at("shape").get<std::vector<std::size_t>>() != params[i]->value.shape())
        throw CheckpointError(K::Shape, "tensor " + params[i]->name + " does not match its manifest entry");
    }
    ck.history = history_from_json(manifest.at("history"));
  } catch (const json::exception& e) {
    throw CheckpointError(K::Format, std::string("bad checkpoint manifest: ") + e.what());
  }

  std::size_t at = header + manifest_len;
  std::size_t needed = 0;
  for (const auto* p : ck.params.parameters()) needed += 4 * p->value.size();
  if (in.size() - at < needed)
    throw CheckpointError(K::Truncated, "checkpoint data truncated: have " + std::to_string(in.size() - at) +
                                            " bytes, need " + std::to_string(needed));
  if (in.size() - at > needed) throw CheckpointError(K::Format, "checkpoint has trailing bytes");
  for (auto* p : ck.params.parameters())
    for (auto& v : p->value.values()) {
      v = static_cast<double>(std::bit_cast<float>(get_le<std::uint32_t>(in, at)));
      at += 4;
    }
  return ck;
}

}  // namespace laytoken::train
