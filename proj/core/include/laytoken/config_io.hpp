// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <nlohmann/json.hpp>

#include "laytoken/model_config.hpp"
#include "laytoken/synthetic.hpp"
#include "laytoken/trainer.hpp"

namespace laytoken {

/// JSON views of the configuration structs. Readers start from the given
/// defaults and override only the keys present; unknown keys are rejected
/// with ConfigError so typos do not pass silently.
nlohmann::json to_json(const nn::ModelConfig& config);
nlohmann::json to_json(const train::TrainConfig& config);
nlohmann::json to_json(const doc::SyntheticSpec& spec);

nn::ModelConfig model_config_from_json(const nlohmann::json& j, nn::ModelConfig defaults = {});
train::TrainConfig train_config_from_json(const nlohmann::json& j, train::TrainConfig defaults = {});
doc::SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j, doc::SyntheticSpec defaults = {});

}  // namespace laytoken
