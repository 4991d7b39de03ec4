// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "laytoken/error.hpp"
#include "laytoken/model.hpp"
#include "laytoken/trainer.hpp"

namespace laytoken::train {

/// File layout (all integers little-endian):
///   8 bytes magic "LAYTOKCK" | u32 format version | u64 manifest length |
///   manifest JSON | float32 values of every tensor in manifest order.
/// The manifest records the version, model config, training config (when
/// known), step count, loss history and each tensor's name and shape.
inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public Error {
 public:
  enum class Kind { Format, Version, Shape, Truncated };
  CheckpointError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind reason() const noexcept { return kind_; }
  const char* kind() const noexcept override;

 private:
  Kind kind_;
};

struct Checkpoint {
  nn::ModelParams params;
  std::optional<TrainConfig> train_config;
  std::vector<StepRecord> history;
};

void save_checkpoint(const nn::ModelParams& params, const std::optional<TrainConfig>& config,
                     const std::vector<StepRecord>& history, const std::string& path);

/// Reads a checkpoint. With `expected`, every tensor shape must match the
/// shapes that config implies (CheckpointError::Kind::Shape otherwise).
/// Missing files raise IoError.
Checkpoint load_checkpoint(const std::string& path, const std::optional<nn::ModelConfig>& expected = std::nullopt);

}  // namespace laytoken::train
