#pragma once

#include "qlna/config.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qlna::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitValidation = 1,
    kExitNumerical = 2,
    kExitIo = 3,
};

struct CliOptions {
    std::string subcommand;
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::string> variant;  // paper | textbook
    std::optional<std::string> format;   // csv | json; both when empty
};

const std::vector<std::string>& subcommands();

/// Loads the config, applies flag overrides, runs the subcommand and writes its
/// artifacts. Errors are reported on `err` and mapped to an ExitCode.
int run(const CliOptions& options, std::ostream& out, std::ostream& err);

/// Same, for an already parsed config (flag overrides still apply).
int run(const CliOptions& options, RunConfig config, std::ostream& out, std::ostream& err);

}  // namespace qlna::cli
