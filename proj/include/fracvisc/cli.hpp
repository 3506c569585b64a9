#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace fracvisc::cli {

/// Process exit codes; every failure path maps to exactly one of these.
enum ExitCode : int {
    kOk = 0,
    kConfigError = 2,
    kIoError = 3,
    kDomainError = 4,
    kInternalError = 5,
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One validated invocation: a single command plus its config payload.
/// Relative paths inside the payload resolve against config_dir.
struct RunConfig {
    std::string command;  // fit | lsa | gsa | eval | synth
    nlohmann::json payload;
    std::string config_dir;
    std::optional<std::uint64_t> seed_override;
    std::optional<std::string> out_dir_override;
    int threads = 1;
};

/// Executes the command, writing declared artifacts atomically (temp file +
/// rename; nothing is left behind on failure). A short human summary goes to
/// `out`; failures print one machine-parsable line `error: <kind>: <what>` to
/// `err`. Returns an ExitCode value.
int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Full argv entry point used by the fracvisc binary.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace fracvisc::cli
