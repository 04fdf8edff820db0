#pragma once

// Flat key=value configuration files. One pair per line, '#' starts a
// comment, keys are SimConfig field names.

#include <filesystem>
#include <iosfwd>
#include <string>

#include "iiot/sim.hpp"

namespace iiot {

/// Applies every pair in `in` on top of `base`. Throws ConfigError on unknown
/// keys, malformed lines or values, and on a config that fails check_config.
SimConfig parse_config(std::istream& in, SimConfig base = {});

SimConfig load_config(const std::filesystem::path& path, SimConfig base = {});

/// Serializes every field, one per line, in declaration order.
std::string format_config(const SimConfig& config);

}  // namespace iiot
