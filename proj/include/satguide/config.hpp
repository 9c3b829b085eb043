#pragma once

#include <map>
#include <string>

#include "satguide/grpo.hpp"

namespace satguide {

// Flat key-value text: one "key = value" per line, '#' starts a comment.
std::map<std::string, std::string> parse_kv_file(const std::string& path);

// Keys mirror TrainConfig field names; unknown keys are an error.
TrainConfig parse_train_config(const std::string& path);

std::string train_config_to_kv(const TrainConfig& cfg);

} // namespace satguide
