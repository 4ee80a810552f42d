#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace infolearn {

inline constexpr const char* kArtifactVersion = "0.1.0";

/// Exit codes of `run_cli`.
enum ExitCode : int {
  kExitOk = 0,
  kExitAborted = 1,  ///< ran to completion but some trial aborted
  kExitError = 2,    ///< bad arguments, config or domain
};

/// Entry point of the `infolearn` tool. Subcommands: bounds, regret, misspec,
/// proxy-check, teach, report. Every run writes manifest.json and config.toml
/// into its output directory before any result file.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Hex FNV-1a hash of a canonical config document.
std::string config_hash(const std::string& canonical_config);

}  // namespace infolearn
