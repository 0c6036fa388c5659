#pragma once

#include <string>
#include <vector>

#include "lunggan/config.hpp"
#include "lunggan/training.hpp"

namespace lunggan {

// Every recognized configuration key with its default value. Config files
// and --set overrides may only use these keys.
KeyValueConfig default_config();

// Layered resolution: defaults, then the optional config file, then
// key=value override pairs (last one wins). Unknown keys throw
// ValidationError.
KeyValueConfig resolve_config(const std::string& config_file,
                              const std::vector<std::string>& overrides);

// Typed view of the train.* / model.* / eval.* keys.
TrainConfig train_config_from(const KeyValueConfig& cfg);

// Full command-line entry point. Exit codes: 0 success, 2 usage error
// (unknown command or malformed flags), 3 configuration validation error
// naming the offending key, 4 runtime failure (unreadable or inconsistent
// inputs, divergence, numerical breakdown, sampling exhaustion).
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);  // args without program name

}  // namespace lunggan
