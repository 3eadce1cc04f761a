#pragma once

// Runs one parsed configuration: manifest.json first, then the result
// tables of the command, then the manifest again with the outcome.

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "qmm/config.hpp"
#include "qmm/errors.hpp"

namespace qmm {

inline constexpr const char* kArtifactVersion = "1.0.0";

enum ExitCode : int {
    exit_ok = 0,
    exit_invalid = 1,
    exit_numerical = 2,
    exit_not_detected = 3,
};

struct RunOptions {
    bool strict = false;
    unsigned jobs = 1;
};

struct CheckSummary {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct RunOutcome {
    int exit_code = exit_ok;
    std::string message;                       // error text, empty on success
    std::vector<std::filesystem::path> files;  // tables written, in order
    std::vector<CheckSummary> checks;
    bool not_detected = false;
};

/// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view data);

/// Maps an error kind to the process exit code.
int exit_code_for(ErrorKind kind) noexcept;

RunOutcome execute(const RunConfig& config, const RunOptions& options = {});

/// Runs fn(0..n-1) on up to `jobs` threads. Results stay in index order;
/// the exception of the lowest failing index is rethrown.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn);

/// Whole command-line entry point of qmmsim.
int run_cli(int argc, char** argv);

}  // namespace qmm
