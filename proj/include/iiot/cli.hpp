#pragma once

#include <iosfwd>

namespace iiot {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

/// Entry point of the iiot_cli tool. Subcommands: error-curve,
/// attack-strength, snr-curve, alteration, compromise, simulate. CSV goes to
/// --out or, when absent, to `out`; diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace iiot
