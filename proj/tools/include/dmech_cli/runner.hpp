#pragma once

#include "dmech_cli/config.hpp"

#include <filesystem>
#include <string>

namespace dmech::cli {

enum class LogLevel { Quiet = 0, Info = 1, Debug = 2 };

/// Level selected by the DMECH_LOG environment variable
/// (quiet | info | debug); unset or unrecognized values mean info.
LogLevel log_level_from_env();

struct RunResult {
  int exit_code = 0;    ///< 0 ok, 2 solver failure, 3 invariance/precondition/report failure
  std::string summary;  ///< one human-readable line describing the outcome
};

/// Execute one validated config. CSV artifacts and a machine-readable
/// report.json land in out_dir (created when missing). Never throws for
/// run-level failures -- they are encoded in the exit code and report;
/// only I/O breakage surfaces as exceptions.
RunResult run_config(const RunConfig& cfg, const std::filesystem::path& out_dir,
                     LogLevel level = LogLevel::Info);

}  // namespace dmech::cli
